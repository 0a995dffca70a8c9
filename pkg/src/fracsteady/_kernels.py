"""Dense O(n^2) kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and the environment variable
``FRACSTEADY_NUMBA`` is not one of ``0/false/off/no``. ``set_backend`` switches
at runtime (the benchmark and the tests exercise both).

All kernels work in unit grid spacing. Weights are passed as three vectors:

``g[m]``
    pair weight between interior nodes ``m`` indices apart (``g[0]`` unused);
``delta[k]``
    extra weight from node ``k`` (1-based, ``k >= 2``) onto the node next to
    the boundary, coming from the boundary-cell profile; mirrored on the right;
``kill[i]``
    coefficient of ``u_i`` from the boundary cells, the exterior and the
    adjacent near field (0-based, length ``n``).
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_OFF = {"0", "false", "off", "no"}

BACKEND = (
    "numba"
    if HAVE_NUMBA and os.environ.get("FRACSTEADY_NUMBA", "1").strip().lower() not in _OFF
    else "numpy"
)


def set_backend(name: str) -> None:
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        warnings.warn("numba is not importable, staying on the numpy path")
        return
    BACKEND = name


# ---------------------------------------------------------------- numpy path


def _assemble_unit_numpy(g, delta, kill):
    n = kill.shape[0]
    idx = np.arange(n)
    W = g[np.abs(idx[:, None] - idx[None, :])].copy()
    np.fill_diagonal(W, 0.0)
    half = 0.5 * delta[2 : n + 1]  # nodes 2..n
    W[1:, 0] += half
    W[0, 1:] += half
    W[: n - 1, n - 1] += half[::-1]
    W[n - 1, : n - 1] += half[::-1]
    A = -W
    A[idx, idx] = W.sum(axis=1) + kill
    return A


def _seminorm_unit_sq_numpy(u, g, delta, kill, block=512):
    n = u.shape[0]
    idx = np.arange(n)
    total = 0.0
    for start in range(0, n, block):
        rows = idx[start : start + block]
        W = g[np.abs(rows[:, None] - idx[None, :])]
        W[rows - start, rows] = 0.0
        # raw nodal rule: row i sees the boundary-cell profile of its own far field
        col0 = rows >= 1
        W[col0, 0] += delta[rows[col0] + 1]
        coln = rows <= n - 2
        W[coln, n - 1] += delta[n - rows[coln]]
        D = u[rows][:, None] - u[None, :]
        total += float(np.sum(W * D * D))
    return total + 2.0 * float(np.sum(kill * u * u))


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _assemble_unit_numba(g, delta, kill):
        n = kill.shape[0]
        A = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                if i != j:
                    d = i - j if i > j else j - i
                    A[i, j] = -g[d]
        for i in range(1, n):
            w = 0.5 * delta[i + 1]
            A[i, 0] -= w
            A[0, i] -= w
            A[n - 1 - i, n - 1] -= w
            A[n - 1, n - 1 - i] -= w
        for i in range(n):
            acc = 0.0
            for j in range(n):
                if j != i:
                    acc -= A[i, j]
            A[i, i] = acc + kill[i]
        return A

    @njit(cache=True)
    def _seminorm_unit_sq_numba(u, g, delta, kill):
        n = u.shape[0]
        total = 0.0
        for i in range(n):
            ui = u[i]
            row = 0.0
            for j in range(n):
                if j == i:
                    continue
                d = i - j if i > j else j - i
                w = g[d]
                if j == 0 and i >= 1:
                    w += delta[i + 1]
                if j == n - 1 and i <= n - 2:
                    w += delta[n - i]
                diff = ui - u[j]
                row += w * diff * diff
            total += row + 2.0 * kill[i] * ui * ui
        return total


def assemble_unit(g, delta, kill) -> np.ndarray:
    """Unit-spacing operator matrix ``diag(rowsum W + kill) - W``."""
    g = np.ascontiguousarray(g, dtype=float)
    delta = np.ascontiguousarray(delta, dtype=float)
    kill = np.ascontiguousarray(kill, dtype=float)
    if BACKEND == "numba":
        return _assemble_unit_numba(g, delta, kill)
    return _assemble_unit_numpy(g, delta, kill)


def seminorm_unit_sq(u, g, delta, kill) -> float:
    """Nodal-rule double sum ``sum_ij w_ij (u_i - u_j)^2 + 2 sum_i kill_i u_i^2``."""
    u = np.ascontiguousarray(u, dtype=float)
    g = np.ascontiguousarray(g, dtype=float)
    delta = np.ascontiguousarray(delta, dtype=float)
    kill = np.ascontiguousarray(kill, dtype=float)
    if BACKEND == "numba":
        return float(_seminorm_unit_sq_numba(u, g, delta, kill))
    return _seminorm_unit_sq_numpy(u, g, delta, kill)
