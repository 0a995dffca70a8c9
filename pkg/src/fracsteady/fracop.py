"""Dense discretization of the integral fractional Laplacian on an interval.

The operator acts on interior nodal values of a function that vanishes outside
``(a, b)``. Row ``i`` approximates ``h * (-Delta)^s u(x_i)`` (lumped mass
``h``), so the discrete eigenproblem reads ``A phi = lambda h phi`` and the
discrete torsion problem ``A e = h 1``.

Quadrature, in units of the mesh width ``h``:

* near field ``|y - x_i| < h``: the symmetric second-difference rule, exact
  for quadratics, giving pair weight ``1/(2 - 2s)`` to each neighbour;
* far interior cells: exact moments of the hat functions against
  ``|t|^(-1-2s)`` (16-point Gauss-Legendre, at machine precision since the
  kernel is smooth away from the diagonal);
* the two boundary cells: the interpolant follows ``dist^s`` instead of a
  straight line, matching the known boundary growth of solutions; its moments
  use Gauss-Jacobi quadrature with weight ``(1 - x)^s``;
* exterior ``R \\ (a, b)``: the closed-form antiderivative of ``|t|^(-1-2s)``.

The matrix is the Hessian of the discrete energy ``(C/2) [u]_h^2`` that
``gagliardo_seminorm`` evaluates, so the quadratic-form identity holds to
rounding. It is symmetric, has the M-matrix sign pattern, and is positive
definite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Union

import numpy as np
import scipy.linalg as sla
from scipy import integrate, special

from . import _kernels
from .errors import (
    InvalidArgumentError,
    SingularOperatorError,
    UnsupportedDimensionError,
)
from .mesh import Grid, GridFunction

SYMMETRY_TOL = 1e-12
SOLVE_RESIDUAL_TOL = 1e-10


def check_order(s: float) -> float:
    s = float(s)
    if not (0.0 < s < 1.0):
        raise InvalidArgumentError(f"fractional order must lie in (0, 1), got {s}")
    return s


@dataclass(frozen=True)
class QuadratureSpec:
    """Per-cell rules and their node counts.

    Hat-function kernel moments on interior cells use Gauss-Legendre; the two
    boundary cells carry a ``dist^s`` profile whose moments use Gauss-Jacobi.
    The exterior of the interval is integrated in closed form.
    """

    interior_rule: str = "hat-function kernel moments, dist^s profile in boundary cells"
    tail_rule: str = "closed-form antiderivative"
    legendre_nodes: int = 16
    jacobi_nodes: int = 40


DEFAULT_QUADRATURE = QuadratureSpec()


# ------------------------------------------------------ normalization constant


def _cosine_series(s: float) -> float:
    # int_0^1 (1 - cos t) t^(-1-2s) dt, termwise from the Taylor series of 1 - cos
    total, k = 0.0, 1
    while True:
        term = 1.0 / (math.factorial(2 * k) * (2 * k - 2 * s))
        total += term if k % 2 else -term
        if term < 1e-18 * total:
            return total
        k += 1


def normalization_constant(N: int, s: float) -> float:
    """``C(N, s) = (int_R^N (1 - cos z_1) / |z|^(N+2s) dz)^(-1)`` for ``N = 1``.

    The integral is split at ``|t| = 1``. Near the origin the Taylor series of
    ``1 - cos t`` is integrated term by term, which avoids cancellation as
    ``s -> 1``. On ``[1, inf)`` the non-oscillatory part has the closed form
    ``1/(2s)`` and the cosine part is a Fourier integral (QUADPACK QAWF).
    """
    if N != 1:
        raise UnsupportedDimensionError(f"only N = 1 is implemented, got N = {N}")
    s = check_order(s)
    cos_tail, _ = integrate.quad(
        lambda t: t ** (-1.0 - 2.0 * s), 1.0, np.inf, weight="cos", wvar=1.0
    )
    # |int_1^inf cos(t) t^(-1-2s)| <= min(1/(2s), 1 + sin 1) by one integration by parts
    if abs(cos_tail) > min(1.0 / (2.0 * s), 1.0 + math.sin(1.0)) + 1e-12:
        raise ArithmeticError(f"oscillatory tail {cos_tail} violates its a-priori bound")
    integral = 2.0 * (_cosine_series(s) + 1.0 / (2.0 * s) - cos_tail)
    return 1.0 / integral


# ------------------------------------------------------------- cell moments


def _power_moment(d0, d1, s):
    """``int_{d0}^{d1} t^(-1-2s) dt`` in closed form."""
    return (d0 ** (-2.0 * s) - d1 ** (-2.0 * s)) / (2.0 * s)


@lru_cache(maxsize=64)
def unit_weights(n: int, s: float, quad: QuadratureSpec = DEFAULT_QUADRATURE):
    """Weight vectors ``(g, delta, kill)`` in unit spacing (see ``_kernels``)."""
    s = check_order(s)
    p = -1.0 - 2.0 * s
    near = 1.0 / (2.0 - 2.0 * s)

    # far cells [m, m+1], m = 1..n: right hat R(m) and left hat L(m+1) moments
    xl, wl = special.roots_legendre(quad.legendre_nodes)
    m = np.arange(1, n + 1, dtype=float)[:, None]
    tau = m + 0.5 * (xl + 1.0)
    ker = 0.5 * wl * tau**p
    R = np.zeros(n + 2)
    L = np.zeros(n + 2)
    R[1 : n + 1] = np.sum(ker * (m + 1.0 - tau), axis=1)
    L[2 : n + 2] = np.sum(ker * (tau - m), axis=1)

    g = np.zeros(n)
    g[1] = near + R[1]
    g[2:] = L[2:n] + R[2:n]

    # boundary cell seen from node k >= 2: tau in [k-1, k], profile (k - tau)^s
    xj, wj = special.roots_jacobi(quad.jacobi_nodes, s, 0.0)
    k = np.arange(2, n + 2, dtype=float)[:, None]
    tau_b = k - 0.5 * (1.0 - xj)
    P = np.zeros(n + 2)
    P[2:] = 2.0 ** (-1.0 - s) * np.sum(wj * tau_b**p, axis=1)

    delta = np.zeros(n + 2)
    delta[2 : n + 1] = P[2 : n + 1] - R[1:n]

    Q = np.zeros(n + 2)
    Q[1] = near
    Q[2:] = L[2:] + R[1 : n + 1] - P[2:]

    i = np.arange(1, n + 1)
    ext = (i ** (-2.0 * s) + (n + 1.0 - i) ** (-2.0 * s)) / (2.0 * s)
    kill = Q[i] + Q[n + 1 - i] + ext
    for arr in (g, delta, kill):
        arr.flags.writeable = False
    return g, delta, kill


# ---------------------------------------------------------------- operator


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    grid: Grid
    s: float
    entries: np.ndarray = field(repr=False)
    c_ns: float

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def h_step(self) -> float:
        return self.grid.h_step

    @cached_property
    def _cho(self):
        try:
            return sla.cho_factor(self.entries, lower=True, check_finite=True)
        except sla.LinAlgError as exc:
            raise SingularOperatorError(f"Cholesky factorization failed: {exc}") from exc

    def matvec(self, u) -> np.ndarray:
        return self.entries @ np.asarray(u, dtype=float)

    def dump(self, path: Union[str, Path]) -> None:
        """Text dump, one matrix row per line, 17 significant digits."""
        np.savetxt(path, self.entries, fmt="%.17g", delimiter=" ")


def assemble_operator(
    grid: Grid, s: float, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> OperatorMatrix:
    s = check_order(s)
    c_ns = normalization_constant(1, s)
    g, delta, kill = unit_weights(grid.n, s, quad)
    A = _kernels.assemble_unit(g, delta, kill)
    A *= c_ns * grid.h_step ** (1.0 - 2.0 * s)
    A.flags.writeable = False
    return OperatorMatrix(grid, s, A, c_ns)


def solve_linear(A: OperatorMatrix, rhs, tol: float = SOLVE_RESIDUAL_TOL) -> GridFunction:
    """Solve ``A u = rhs`` with the cached Cholesky factor.

    Up to three steps of iterative refinement are taken if the residual is
    above ``tol * |rhs|_inf``.
    """
    if isinstance(rhs, GridFunction):
        if rhs.grid != A.grid:
            raise InvalidArgumentError("right-hand side lives on a different grid")
        b = rhs.values
    else:
        b = np.asarray(rhs, dtype=float)
        if b.shape != (A.n,):
            raise InvalidArgumentError(f"expected rhs of length {A.n}, got {b.shape}")
    scale = np.max(np.abs(b))
    if scale == 0.0:
        return GridFunction(A.grid, np.zeros(A.n))
    cho = A._cho
    u = sla.cho_solve(cho, b)
    for _ in range(3):
        r = b - A.entries @ u
        if np.max(np.abs(r)) <= tol * scale:
            return GridFunction(A.grid, u)
        u = u + sla.cho_solve(cho, r)
    r = b - A.entries @ u
    if np.max(np.abs(r)) > tol * scale:
        raise SingularOperatorError(
            f"linear solve residual {np.max(np.abs(r)):.3e} above {tol:.1e} * |rhs|"
        )
    return GridFunction(A.grid, u)


def gagliardo_seminorm(u: GridFunction, s: float, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Discrete Gagliardo seminorm ``[u]`` of the zero-extended interpolant.

    The double integral over ``R x R`` is evaluated with the nodal rule in the
    outer variable and the same per-cell rules as the operator in the inner
    one. Pairs with one point outside the region sampled by the outer rule
    (exterior, boundary cells) are counted for both orderings.
    """
    s = check_order(s)
    grid = u.grid
    g, delta, kill = unit_weights(grid.n, s, quad)
    sq = _kernels.seminorm_unit_sq(u.values, g, delta, kill)
    return math.sqrt(max(sq, 0.0) * grid.h_step ** (1.0 - 2.0 * s))
