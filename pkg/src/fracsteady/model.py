"""Logistic growth with grazing and constant-yield harvesting.

The steady-state problem is ``(-Delta)^s u = lambda f(u)`` in the interval with
``u = 0`` outside, where

    f(u) = u - u^2/K - c u^2/(1 + u^2) - eps h(x).

This module holds the reaction term, the explicit sub- and supersolution
construction behind the existence result for ``lambda > lambda1`` and its
threshold constants, nodal residual checks, and the energy certificate that
rules out positive solutions when ``lambda <= lambda1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np

from .errors import DegenerateGapError, InvalidArgumentError, TheoremHypothesisError
from .fracop import OperatorMatrix, check_order
from .mesh import GridFunction
from .spectral import EigenPair

RESIDUAL_TOL = 1e-8

Kind = Literal["subsolution", "supersolution"]


@dataclass(frozen=True, eq=False)
class ModelParams:
    lam: float
    K: float
    c: float
    eps: float
    s: float
    h: GridFunction

    def __post_init__(self):
        if not self.lam > 0 or not self.K > 0:
            raise InvalidArgumentError(f"need lambda > 0 and K > 0, got {self.lam}, {self.K}")
        # c = 0 is allowed: the pure logistic case is a useful reference
        if self.c < 0 or self.eps < 0:
            raise InvalidArgumentError(f"need c >= 0 and eps >= 0, got {self.c}, {self.eps}")
        check_order(self.s)
        hv = self.h.values
        if np.any(hv < 0) or abs(hv.max() - 1.0) > 1e-12:
            raise InvalidArgumentError("harvesting profile must be nonnegative with max 1")

    def replace(self, **kw) -> "ModelParams":
        d = dict(lam=self.lam, K=self.K, c=self.c, eps=self.eps, s=self.s, h=self.h)
        d.update(kw)
        return ModelParams(**d)


@dataclass(frozen=True)
class ThresholdSet:
    alpha: float
    theta: float
    eta: float
    m_lambda: float
    sigma_upper: float
    sigma_lower: float
    eps_star: float
    A_super: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path: Optional[Union[str, Path]] = None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def predicts(self, K: float, eps: float) -> bool:
        """Whether ``(K, eps)`` lies in the open box of the existence result."""
        return self.sigma_lower < K < self.sigma_upper and 0.0 < eps < self.eps_star


@dataclass(frozen=True)
class ResidualReport:
    min_residual: float
    max_residual: float
    kind: str
    tol: float
    passed: bool


@dataclass(frozen=True)
class NonexistenceReport:
    violated: bool
    lhs: float
    rhs: float
    lam: float
    lambda1: float


def _values(u, grid=None) -> np.ndarray:
    if isinstance(u, GridFunction):
        if grid is not None and u.grid != grid:
            raise InvalidArgumentError("grid function lives on a different grid")
        return u.values
    v = np.asarray(u, dtype=float)
    if grid is not None and v.shape != (grid.n,):
        raise InvalidArgumentError(f"expected {grid.n} nodal values, got {v.shape}")
    return v


def reaction_values(u: np.ndarray, p: ModelParams) -> np.ndarray:
    u2 = u * u
    return u - u2 / p.K - p.c * u2 / (1.0 + u2) - p.eps * p.h.values


def reaction_derivative_values(u: np.ndarray, p: ModelParams) -> np.ndarray:
    return 1.0 - 2.0 * u / p.K - p.c * 2.0 * u / (1.0 + u * u) ** 2


def reaction(u, p: ModelParams) -> GridFunction:
    """Nodal ``f(u)`` (not multiplied by lambda)."""
    return GridFunction(p.h.grid, reaction_values(_values(u, p.h.grid), p))


def reaction_derivative(u, p: ModelParams) -> GridFunction:
    return GridFunction(p.h.grid, reaction_derivative_values(_values(u, p.h.grid), p))


def thresholds(p: ModelParams, eig: EigenPair, e: GridFunction) -> ThresholdSet:
    """Constants of the sub/supersolution construction for ``lambda > lambda1``.

    ``theta`` is taken as ``(1 - alpha)/2 * min(phi1/e)``, which makes
    ``phi1 - theta e >= (1 + alpha)/2 * phi1 > alpha phi1`` at every node.
    ``A_super`` is the larger of ``lambda K / 4`` and the smallest amplitude
    that puts ``A_super * e`` above the subsolution.
    """
    lam1 = eig.lambda1
    if not p.lam > lam1:
        raise TheoremHypothesisError(
            f"existence needs lambda > lambda1; got lambda = {p.lam:.6g}, lambda1 = {lam1:.6g}"
        )
    phi = _values(eig.phi1, p.h.grid)
    ev = _values(e, p.h.grid)
    alpha = math.sqrt(lam1 / p.lam)
    theta = 0.5 * (1.0 - alpha) * float(np.min(phi / ev))
    gap = phi - theta * ev
    if not theta > 0 or np.any(gap - alpha * phi <= 0):
        raise DegenerateGapError("phi1 - theta*e does not dominate alpha*phi1 at every node")
    m_lambda = (1.0 - alpha) / (2.0 * float(np.max(np.abs(gap))))
    eta = 1.0 + ((1.0 - alpha) / 2.0) ** 2
    sigma_upper = eta / p.c if p.c > 0 else math.inf
    sigma_lower = eta / (2.0 * eta + p.c)
    eps_star = theta * m_lambda / p.lam
    sub = m_lambda * gap
    A_super = max(p.lam * p.K / 4.0, float(np.max(sub / ev)))
    return ThresholdSet(
        alpha=alpha,
        theta=theta,
        eta=eta,
        m_lambda=m_lambda,
        sigma_upper=sigma_upper,
        sigma_lower=sigma_lower,
        eps_star=eps_star,
        A_super=A_super,
    )


def build_supersolution(t: ThresholdSet, e: GridFunction) -> GridFunction:
    return GridFunction(e.grid, t.A_super * e.values)


def build_subsolution(t: ThresholdSet, eig: EigenPair, e: GridFunction) -> GridFunction:
    return GridFunction(e.grid, t.m_lambda * (eig.phi1.values - t.theta * e.values))


def nodal_residual(u, p: ModelParams, A: OperatorMatrix) -> np.ndarray:
    """``A u - lambda h f(u)``; zero at a discrete steady state."""
    v = _values(u, A.grid)
    return A.entries @ v - p.lam * A.h_step * reaction_values(v, p)


def check_subsupersolution(
    u, p: ModelParams, A: OperatorMatrix, kind: Kind, tol: float = RESIDUAL_TOL
) -> ResidualReport:
    """Sign check of the nodal residual.

    Hat functions are nonnegative test functions, so ``r <= 0`` at every node
    is the discrete subsolution inequality and ``r >= 0`` the supersolution
    one. The tolerance is ``tol * (1 + |A u|_inf)``.
    """
    if kind not in ("subsolution", "supersolution"):
        raise InvalidArgumentError(f"kind must be subsolution or supersolution, got {kind!r}")
    v = _values(u, A.grid)
    Au = A.entries @ v
    r = Au - p.lam * A.h_step * reaction_values(v, p)
    scaled_tol = tol * (1.0 + float(np.max(np.abs(Au))))
    rmin, rmax = float(r.min()), float(r.max())
    ok = rmax <= scaled_tol if kind == "subsolution" else rmin >= -scaled_tol
    return ResidualReport(rmin, rmax, kind, scaled_tol, ok)


def nonexistence_certificate(u, p: ModelParams, eig: EigenPair) -> NonexistenceReport:
    """Energy test for a nonnegative candidate ``u``.

    A positive steady state satisfies ``u.A u = lambda h sum f(u) u`` and
    ``u.A u >= lambda1 h sum u^2``, hence

        (lambda - lambda1) h sum u^2 >= lambda h sum (u^2/K + c u^2/(1+u^2) + eps h) u.

    ``violated`` reports that this necessary condition fails for ``u``; for
    ``lambda <= lambda1`` it fails for every positive ``u``.
    """
    v = _values(u, p.h.grid)
    if np.any(v < 0) or not np.any(v > 0):
        raise InvalidArgumentError("certificate needs a nonnegative, nonzero candidate")
    hs = p.h.grid.h_step
    lhs = (p.lam - eig.lambda1) * hs * float(v @ v)
    v2 = v * v
    rhs = p.lam * hs * float(np.sum((v2 / p.K + p.c * v2 / (1.0 + v2) + p.eps * p.h.values) * v))
    tol = 1e-12 * (abs(lhs) + abs(rhs))
    return NonexistenceReport(lhs < rhs - tol, lhs, rhs, p.lam, eig.lambda1)
