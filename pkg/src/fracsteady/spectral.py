"""Principal eigenpair, torsion function and boundary-growth fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.special import gamma

from .errors import EigensolverError, InvalidArgumentError
from .fracop import SOLVE_RESIDUAL_TOL, OperatorMatrix, check_order, solve_linear
from .mesh import GridFunction, boundary_distance

RQ_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-10
MAX_EIG_ITER = 10000


@dataclass(frozen=True)
class EigenPair:
    lambda1: float
    phi1: GridFunction
    residual: float
    iterations: int = 0


@dataclass(frozen=True)
class BoundaryFit:
    lower_c: float
    upper_c: float
    exponent_used: float
    layer_lower_c: float = math.nan
    layer_upper_c: float = math.nan

    @property
    def ratio(self) -> float:
        return self.upper_c / self.lower_c

    @property
    def passed(self) -> bool:
        return self.lower_c > 0 and math.isfinite(self.ratio)


def principal_eigenpair(
    A: OperatorMatrix,
    rq_tol: float = RQ_TOL,
    residual_tol: float = EIG_RESIDUAL_TOL,
    max_iter: int = MAX_EIG_ITER,
) -> EigenPair:
    """Smallest eigenpair of ``A phi = lambda h phi`` by inverse iteration.

    Starts from the constant vector, so every iterate stays positive (the
    inverse of ``A`` is entrywise nonnegative). Stops once successive Rayleigh
    quotients agree to ``rq_tol`` relative and the eigen residual is below
    ``residual_tol``.
    """
    h = A.h_step
    M = A.entries
    cho = A._cho
    v = np.ones(A.n)
    rq_old = math.inf
    for it in range(1, max_iter + 1):
        w = sla.cho_solve(cho, h * v)
        w /= np.max(np.abs(w))
        Aw = M @ w
        rq = float(w @ Aw) / (h * float(w @ w))
        res = float(np.max(np.abs(Aw - rq * h * w)))
        if abs(rq - rq_old) <= rq_tol * abs(rq) and res <= residual_tol:
            break
        rq_old, v = rq, w
    else:
        raise EigensolverError(f"inverse iteration did not converge in {max_iter} steps")
    if w[np.argmax(np.abs(w))] < 0:
        w = -w
    if np.any(w <= 0):
        raise EigensolverError("principal eigenvector is not strictly positive")
    return EigenPair(rq, GridFunction(A.grid, w), res, it)


def rayleigh_quotient(A: OperatorMatrix, v) -> float:
    x = np.asarray(v.values if isinstance(v, GridFunction) else v, dtype=float)
    vv = float(x @ x)
    if vv == 0.0:
        raise InvalidArgumentError("Rayleigh quotient of the zero vector")
    return float(x @ (A.entries @ x)) / (A.h_step * vv)


def torsion_function(A: OperatorMatrix, tol: float = SOLVE_RESIDUAL_TOL) -> GridFunction:
    """Discrete solution of ``(-Delta)^s e = 1`` with zero exterior data."""
    return solve_linear(A, np.full(A.n, A.h_step), tol)


def torsion_constant(s: float) -> float:
    """``kappa(s)``: on ``(-1, 1)`` the torsion function is ``kappa (1 - x^2)^s``."""
    s = check_order(s)
    return gamma(0.5) / (2.0 ** (2 * s) * gamma((1 + 2 * s) / 2) * gamma(1 + s))


def torsion_closed_form(x, s: float, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Closed-form torsion function of an interval, scaled from ``(-1, 1)``."""
    r = 0.5 * (b - a)
    y = (np.asarray(x, dtype=float) - 0.5 * (a + b)) / r
    return torsion_constant(s) * r ** (2 * s) * np.clip(1.0 - y * y, 0.0, None) ** s


def boundary_fit(u: GridFunction, s: float, layer: float = 0.1) -> BoundaryFit:
    """Constants ``min`` and ``max`` of ``u / dist^s`` over the interior nodes.

    The same ratios restricted to the ``layer`` fraction of nodes nearest each
    endpoint are reported alongside (informational only).
    """
    s = check_order(s)
    vals = u.values
    if np.any(vals <= 0):
        raise InvalidArgumentError("boundary fit needs a strictly positive function")
    d = boundary_distance(u.grid).values
    ratio = vals / d**s
    n = u.grid.n
    k = max(1, int(math.ceil(layer * n)))
    edge = np.concatenate([ratio[:k], ratio[-k:]])
    return BoundaryFit(
        float(ratio.min()), float(ratio.max()), s, float(edge.min()), float(edge.max())
    )
