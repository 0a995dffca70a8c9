"""Steady states by monotone iteration, with Newton as refiner and probe."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Literal, Optional

import numpy as np
import scipy.linalg as sla

from .errors import InvalidArgumentError, InvalidPairError, NonConvergenceError
from .fracop import OperatorMatrix
from .mesh import GridFunction
from .model import (
    ModelParams,
    _values,
    check_subsupersolution,
    reaction_derivative_values,
    reaction_values,
)

TOL_SOLVE = 1e-10
MAX_MONOTONE_ITER = 5000
MAX_NEWTON_ITER = 100

Branch = Literal["minimal", "maximal", "newton"]


@dataclass
class SolveReport:
    solution: GridFunction
    iterations: int
    final_residual: float
    ordered: bool
    monotone_violation: float
    branch: str
    converged: bool = True
    shift: float = math.nan
    singular_jacobian: bool = False
    history: List[np.ndarray] = field(default_factory=list, repr=False)
    residual_history: List[float] = field(default_factory=list, repr=False)

    @property
    def positive(self) -> bool:
        return bool(np.all(self.solution.values > 0))

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "converged": self.converged,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "ordered": self.ordered,
            "positive": self.positive,
            "monotone_violation": self.monotone_violation,
            "shift": self.shift,
            "singular_jacobian": self.singular_jacobian,
            "min_u": float(self.solution.values.min()),
            "max_u": float(self.solution.values.max()),
        }


def residual_vector(u: np.ndarray, p: ModelParams, A: OperatorMatrix) -> np.ndarray:
    return A.entries @ u - p.lam * A.h_step * reaction_values(u, p)


def monotone_shift(p: ModelParams, upper_max: float, samples: int = 4097) -> float:
    """``lambda * max(1, sup |f'|)`` over ``[0, upper_max]`` (dense sampling)."""
    t = np.linspace(0.0, max(upper_max, 0.0), samples)
    # harvesting does not enter f'
    fp = 1.0 - 2.0 * t / p.K - p.c * 2.0 * t / (1.0 + t * t) ** 2
    return p.lam * max(1.0, float(np.max(np.abs(fp))))


def monotone_solve(
    lower,
    upper,
    p: ModelParams,
    A: OperatorMatrix,
    branch: Branch = "minimal",
    tol_solve: float = TOL_SOLVE,
    max_iter: int = MAX_MONOTONE_ITER,
    verify_pair: bool = True,
    keep_history: bool = False,
) -> SolveReport:
    """Shifted fixed-point iteration between an ordered sub/supersolution pair.

    Each step solves ``(A + M h I) u_{k+1} = h (lambda f(u_k) + M u_k)``. The
    shift ``M`` makes ``lambda f(t) + M t`` nondecreasing on ``[0, max upper]``,
    so iterates started at ``lower`` increase and those started at ``upper``
    decrease. Stops when ``|u_{k+1} - u_k| <= tol_solve (1 + |u_k|)``.

    With ``verify_pair`` the residual checks of both functions are enforced;
    the sweep turns it off to probe cells whose constructed subsolution fails.
    """
    lo = _values(lower, A.grid)
    up = _values(upper, A.grid)
    scale = 1.0 + float(np.max(np.abs(up)))
    if np.any(lo > up + 1e-12 * scale):
        raise InvalidPairError("lower function exceeds upper function somewhere")
    if verify_pair:
        for u, kind in ((lo, "subsolution"), (up, "supersolution")):
            rep = check_subsupersolution(u, p, A, kind)
            if not rep.passed:
                raise InvalidPairError(
                    f"{kind} check failed (residual range [{rep.min_residual:.3e}, "
                    f"{rep.max_residual:.3e}], tol {rep.tol:.1e})"
                )
    if branch not in ("minimal", "maximal"):
        raise InvalidArgumentError(f"branch must be minimal or maximal, got {branch!r}")

    h = A.h_step
    M = monotone_shift(p, float(up.max()))
    cho = sla.cho_factor(A.entries + M * h * np.eye(A.n), lower=True)
    u = (lo if branch == "minimal" else up).copy()
    sign = 1.0 if branch == "minimal" else -1.0
    violation = 0.0
    history = [u.copy()] if keep_history else []
    converged = False
    it = 0
    diverged = False
    for it in range(1, max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            rhs = h * (p.lam * reaction_values(u, p) + M * u)
        if not np.all(np.isfinite(rhs)):
            # only possible when the pair is not a valid sub/supersolution pair
            diverged = True
            break
        u_new = sla.cho_solve(cho, rhs, check_finite=False)
        step = u_new - u
        violation = max(violation, float(np.max(-sign * step)))
        done = float(np.max(np.abs(step))) <= tol_solve * (1.0 + float(np.max(np.abs(u))))
        u = u_new
        if keep_history:
            history.append(u.copy())
        if done:
            converged = True
            break

    with np.errstate(over="ignore", invalid="ignore"):
        res = float(np.max(np.abs(residual_vector(u, p, A))))
    if not math.isfinite(res):
        res = math.inf
    ordered = bool(
        np.all(u >= lo - 1e-10 * scale) and np.all(u <= up + 1e-10 * scale)
    )
    report = SolveReport(
        solution=GridFunction(A.grid, u),
        iterations=it,
        final_residual=res,
        ordered=ordered,
        monotone_violation=max(violation, 0.0),
        branch=branch,
        converged=converged,
        shift=M,
        history=history,
    )
    if diverged:
        raise NonConvergenceError(f"monotone iteration ({branch}) diverged after {it} steps", report)
    if not converged:
        raise NonConvergenceError(
            f"monotone iteration ({branch}) hit the cap of {max_iter} steps, "
            f"residual {res:.3e}",
            report,
        )
    return report


def newton_solve(
    u0,
    p: ModelParams,
    A: OperatorMatrix,
    tol: Optional[float] = None,
    max_iter: int = MAX_NEWTON_ITER,
    keep_history: bool = True,
) -> SolveReport:
    """Damped Newton on ``F(u) = A u - lambda h f(u)``.

    Step halving until ``|F|_inf`` decreases (at most 30 halvings). Stops at
    ``|F|_inf <= tol * (1 + |u|_inf)``, default ``tol = TOL_SOLVE``. A singular
    Jacobian ends the iteration with ``singular_jacobian`` set instead of
    raising.
    """
    tol = TOL_SOLVE if tol is None else tol
    u = _values(u0, A.grid).astype(float).copy()
    h = A.h_step
    F = residual_vector(u, p, A)
    fn = float(np.max(np.abs(F)))
    history = [u.copy()] if keep_history else []
    res_hist = [fn]
    singular = False
    converged = fn <= tol * (1.0 + float(np.max(np.abs(u))))
    it = 0
    while not converged and it < max_iter:
        it += 1
        J = A.entries - p.lam * h * np.diag(reaction_derivative_values(u, p))
        try:
            du = sla.solve(J, -F, assume_a="sym")
        except (sla.LinAlgError, ValueError):
            singular = True
            break
        if not np.all(np.isfinite(du)):
            singular = True
            break
        step = 1.0
        for _ in range(31):
            trial = u + step * du
            F_trial = residual_vector(trial, p, A)
            fn_trial = float(np.max(np.abs(F_trial)))
            if fn_trial < fn:
                break
            step *= 0.5
        else:
            break
        u, F, fn = trial, F_trial, fn_trial
        if keep_history:
            history.append(u.copy())
        res_hist.append(fn)
        converged = fn <= tol * (1.0 + float(np.max(np.abs(u))))

    report = SolveReport(
        solution=GridFunction(A.grid, u),
        iterations=it,
        final_residual=fn,
        ordered=True,
        monotone_violation=0.0,
        branch="newton",
        converged=converged,
        singular_jacobian=singular,
        history=history,
        residual_history=res_hist,
    )
    if not converged and not singular and it >= max_iter:
        raise NonConvergenceError(f"Newton hit the cap of {max_iter} steps, |F| = {fn:.3e}", report)
    return report


def weak_residual(u, v, p: ModelParams, A: OperatorMatrix, reaction_override=None) -> float:
    """``v . A u - lambda h sum f(u) v``, the discrete weak form.

    ``reaction_override`` replaces ``f(u)`` by given nodal values (used for
    manufactured solutions such as the torsion function with ``f = 1/lambda``).
    """
    uu = _values(u, A.grid)
    vv = _values(v, A.grid)
    f = reaction_values(uu, p) if reaction_override is None else _values(reaction_override, A.grid)
    return float(vv @ (A.entries @ uu)) - p.lam * A.h_step * float(f @ vv)
