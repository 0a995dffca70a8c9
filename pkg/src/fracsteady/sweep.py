"""Parameter sweeps over two of (lambda/lambda1, K, c, eps) and existence maps."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .config import Axis, ConfigError, Problem
from .errors import InvalidPairError, NonConvergenceError
from .model import build_subsolution, build_supersolution, check_subsupersolution
from .solver import monotone_solve

log = logging.getLogger(__name__)

MAP_HEADER = ("param1", "param2", "theorem_predicts", "solver_found", "residual", "iterations")


@dataclass(frozen=True)
class Cell:
    theorem_predicts: bool
    solver_found: bool
    residual: float
    iterations: int
    values: Tuple[float, float]
    branch: str = ""
    note: str = ""


@dataclass
class ExistenceMap:
    axes: List[Axis]
    cells: Dict[Tuple[int, int], Cell] = field(default_factory=dict)

    def axis_name(self, k: int) -> str:
        ax = self.axes[k]
        return f"{ax.param} (relative)" if ax.scale == "theorem" else ax.param

    def axis_values(self, k: int) -> tuple:
        return self.axes[k].values

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.axes[0].values), len(self.axes[1].values)

    def unsolved_predicted(self) -> List[Tuple[int, int]]:
        return [ij for ij, c in sorted(self.cells.items()) if c.theorem_predicts and not c.solver_found]

    def to_csv(self, path: Union[str, Path]) -> Path:
        if not self.cells:
            raise ValueError("empty sweep")
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MAP_HEADER)
            for (i, j), c in sorted(self.cells.items()):
                w.writerow(
                    [
                        f"{c.values[0]:.17g}",
                        f"{c.values[1]:.17g}",
                        int(c.theorem_predicts),
                        int(c.solver_found),
                        f"{c.residual:.17g}",
                        c.iterations,
                    ]
                )
        return path


def _resolve(problem: Problem, assignment: Dict[str, Tuple[float, str]]):
    kw = {}
    for param, (value, scale) in assignment.items():
        if param == "lambda_over_lambda1":
            kw["lam"] = value * problem.eig.lambda1
        elif scale == "theorem":
            kw[f"{param}_rel"] = value
        else:
            kw[param] = value
    return problem.params(**kw)


def _emitted_value(param: str, p) -> float:
    return {"K": p.K, "c": p.c, "eps": p.eps}.get(param, math.nan)


def solve_cell(problem: Problem, assignment: Dict[str, Tuple[float, str]]) -> Cell:
    """Classify one parameter point and try to compute a positive steady state.

    The minimal branch from the constructed subsolution is used when that
    function passes its residual check; otherwise the maximal branch is run
    from the supersolution, so cells outside the predicted box are still
    probed.
    """
    cfg = problem.config
    try:
        p, t = _resolve(problem, assignment)
    except ConfigError as exc:
        return Cell(False, False, math.nan, 0, (math.nan, math.nan), note=str(exc))
    vals = tuple(
        v if k == "lambda_over_lambda1" else _emitted_value(k, p) for k, (v, _) in assignment.items()
    )
    if t is None:
        return Cell(False, False, math.nan, 0, vals, note="lambda <= lambda1")

    predicts = t.predicts(p.K, p.eps)
    A, e = problem.operator, problem.torsion
    upper = build_supersolution(t, e)
    lower = build_subsolution(t, problem.eig, e)
    sub_ok = check_subsupersolution(lower, p, A, "subsolution", cfg.residual_tol).passed
    try:
        branch = "minimal" if sub_ok else "maximal"
        rep = monotone_solve(
            lower, upper, p, A, branch, cfg.tol_solve, cfg.max_monotone_iter, verify_pair=False
        )
    except NonConvergenceError as exc:
        r = exc.report
        return Cell(predicts, False, r.final_residual, r.iterations, vals, r.branch, "no convergence")
    except InvalidPairError as exc:
        return Cell(predicts, False, math.nan, 0, vals, note=str(exc))

    scale = 1.0 + float(np.max(np.abs(rep.solution.values)))
    found = rep.converged and rep.positive and rep.final_residual <= 10.0 * cfg.tol_solve * scale
    note = "" if sub_ok else "subsolution check failed; maximal branch"
    if predicts and not sub_ok:
        log.warning("constructed subsolution fails its residual check at %s", assignment)
    return Cell(predicts, found, rep.final_residual, rep.iterations, vals, rep.branch, note)


def run_sweep(problem: Problem, axes: Optional[List[Axis]] = None, workers: Optional[int] = None) -> ExistenceMap:
    """Evaluate every cell of the two-axis grid on a bounded thread pool.

    Results are keyed by index, so the map does not depend on ``workers``.
    """
    axes = list(problem.config.axes if axes is None else axes)
    if len(axes) != 2 or any(len(a.values) == 0 for a in axes):
        raise ConfigError("a sweep needs two non-empty axes")
    workers = problem.config.workers if workers is None else workers
    problem.warm()
    jobs = {}
    for i, x in enumerate(axes[0].values):
        for j, y in enumerate(axes[1].values):
            jobs[(i, j)] = {axes[0].param: (x, axes[0].scale), axes[1].param: (y, axes[1].scale)}
    emap = ExistenceMap(axes)
    if workers == 1:
        for ij, job in jobs.items():
            emap.cells[ij] = solve_cell(problem, job)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {ij: pool.submit(solve_cell, problem, job) for ij, job in jobs.items()}
            for ij, fut in futures.items():
                emap.cells[ij] = fut.result()
    return emap
