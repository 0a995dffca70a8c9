"""Invariant suite behind ``fracsteady verify``.

Every check returns a :class:`Check` row; the suite passes when all rows do.
Random test vectors are drawn from ``numpy.random.default_rng`` seeded by the
``FRACSTEADY_SEED`` environment variable (default 0).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.special import gamma

from .config import Problem
from .errors import FracSteadyError
from .fracop import SYMMETRY_TOL, gagliardo_seminorm, normalization_constant
from .mesh import GridFunction
from .model import (
    build_subsolution,
    build_supersolution,
    check_subsupersolution,
    nonexistence_certificate,
)
from .solver import monotone_solve
from .spectral import rayleigh_quotient, torsion_closed_form

DEFAULT_SEED = 0
N_RANDOM = 20


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ""


def seed_from_env() -> int:
    raw = os.environ.get("FRACSTEADY_SEED", "")
    try:
        return int(raw) if raw.strip() else DEFAULT_SEED
    except ValueError:
        return DEFAULT_SEED


def _le(name, value, limit, detail=""):
    return Check(name, float(value), float(limit), bool(value <= limit), detail)


def _ge(name, value, limit, detail=""):
    return Check(name, float(value), float(limit), bool(value >= limit), detail)


def operator_checks(pb: Problem, rng: np.random.Generator) -> List[Check]:
    A = pb.operator
    M = A.entries
    out = [_le("operator symmetric", np.max(np.abs(M - M.T)) / np.max(np.abs(M)), SYMMETRY_TOL)]
    try:
        A._cho
        out.append(Check("operator positive definite", 1.0, 1.0, True, "Cholesky succeeded"))
    except FracSteadyError as exc:
        out.append(Check("operator positive definite", 0.0, 1.0, False, str(exc)))
        return out
    off = M - np.diag(np.diag(M))
    out.append(_le("off-diagonal entries nonpositive", off.max(), 0.0))
    out.append(_ge("row sums positive", M.sum(axis=1).min(), np.finfo(float).tiny))
    worst = math.inf
    for _ in range(N_RANDOM):
        f = rng.random(A.n) * (rng.random(A.n) < 0.5)
        if not f.any():
            f[0] = 1.0
        worst = min(worst, float(np.min(np.linalg.solve(M, f))))
    out.append(_ge("maximum principle on random loads", worst, 0.0))
    worst = 0.0
    for _ in range(N_RANDOM):
        u = rng.standard_normal(A.n)
        q = float(u @ (M @ u))
        semi = gagliardo_seminorm(GridFunction(A.grid, u), A.s)
        worst = max(worst, abs(0.5 * A.c_ns * semi**2 - q) / abs(q))
    out.append(_le("quadratic form vs seminorm", worst, 1e-8))
    s = A.s
    ref = s * 4.0**s * gamma(0.5 + s) / (math.sqrt(math.pi) * gamma(1.0 - s))
    out.append(_le("normalization constant", abs(normalization_constant(1, s) - ref) / ref, 1e-8))
    return out


def spectral_checks(pb: Problem, rng: np.random.Generator) -> List[Check]:
    A, eig = pb.operator, pb.eig
    out = [
        _le("eigen residual", eig.residual, 1e-9),
        _ge("eigenvector positive", eig.phi1.values.min(), np.finfo(float).tiny),
    ]
    worst = math.inf
    for _ in range(N_RANDOM):
        worst = min(worst, rayleigh_quotient(A, rng.standard_normal(A.n)) - eig.lambda1)
    out.append(_ge("Rayleigh quotients above lambda1", worst, -1e-9))
    cfg = pb.config
    exact = torsion_closed_form(A.grid.nodes, A.s, cfg.a, cfg.b)
    err = np.max(np.abs(pb.torsion.values - exact)) / np.max(exact)
    out.append(_le("torsion vs closed form", err, 0.02))
    return out


def model_checks(pb: Problem) -> List[Check]:
    cfg = pb.config
    lam = pb.resolve_lambda()
    lam1 = pb.eig.lambda1
    if lam <= lam1:
        K = cfg.K if cfg.K is not None else 1.0
        p, _ = pb.params(lam=lam, K=K, eps=cfg.eps or 0.0)
        cert = nonexistence_certificate(pb.eig.phi1, p, pb.eig)
        return [Check("energy certificate fires (lambda <= lambda1)", cert.rhs - cert.lhs, 0.0, cert.violated)]
    p, t = pb.params()
    out = [
        _le("alpha below 1", t.alpha, 1.0 - 1e-15),
        Check("sigma_lower < sigma_upper", t.sigma_lower, t.sigma_upper, t.sigma_lower < t.sigma_upper),
        _ge("eps_star positive", t.eps_star, np.finfo(float).tiny),
        _ge("theta m - lambda eps", t.theta * t.m_lambda - p.lam * p.eps, 0.0),
    ]
    A, e = pb.operator, pb.torsion
    lower = build_subsolution(t, pb.eig, e)
    upper = build_supersolution(t, e)
    sub = check_subsupersolution(lower, p, A, "subsolution", cfg.residual_tol)
    sup = check_subsupersolution(upper, p, A, "supersolution", cfg.residual_tol)
    out.append(_le("subsolution residual max", sub.max_residual, sub.tol, f"K={p.K:.6g} eps={p.eps:.6g}"))
    out.append(_ge("supersolution residual min", sup.min_residual, -sup.tol))
    out.append(_ge("lower <= upper", float(np.min(upper.values - lower.values)), 0.0))
    try:
        rep = monotone_solve(lower, upper, p, A, "minimal", cfg.tol_solve, cfg.max_monotone_iter, verify_pair=False)
        scale = 1.0 + float(np.max(np.abs(rep.solution.values)))
        ok = rep.positive and rep.ordered
        out.append(Check("monotone solve positive and ordered", rep.iterations, cfg.max_monotone_iter, ok))
        out.append(_le("steady-state residual", rep.final_residual, 10.0 * cfg.tol_solve * scale))
        out.append(_le("monotonicity violation", rep.monotone_violation, 1e-10 * scale))
    except FracSteadyError as exc:
        out.append(Check("monotone solve positive and ordered", math.nan, cfg.max_monotone_iter, False, str(exc)))
    return out


def run_suite(pb: Problem, seed: int | None = None) -> List[Check]:
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    groups: List[Callable[[], List[Check]]] = [
        lambda: operator_checks(pb, rng),
        lambda: spectral_checks(pb, rng),
        lambda: model_checks(pb),
    ]
    rows: List[Check] = []
    for grp in groups:
        try:
            rows.extend(grp())
        except FracSteadyError as exc:
            rows.append(Check(type(exc).__name__, math.nan, math.nan, False, str(exc)))
    return rows


def format_table(rows: List[Check]) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'check':<{width}}  {'value':>12}  {'limit':>12}  result"]
    for r in rows:
        tag = "PASS" if r.passed else "FAIL"
        extra = f"  ({r.detail})" if r.detail else ""
        lines.append(f"{r.name:<{width}}  {r.value:>12.4e}  {r.limit:>12.4e}  {tag}{extra}")
    lines.append(f"{sum(r.passed for r in rows)}/{len(rows)} checks passed")
    return "\n".join(lines)
