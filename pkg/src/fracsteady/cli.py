"""Command-line front end.

    fracsteady eig     [--config cfg.json] [--out DIR]
    fracsteady torsion [--config cfg.json] [--out DIR]
    fracsteady solve   [--config cfg.json] [--out DIR]
    fracsteady sweep   [--config cfg.json] [--out DIR] [--workers N]
    fracsteady verify  [--config cfg.json]

Exit status: 0 when every assertion of the subcommand holds, 1 on a numerical
failure, 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .config import ConfigError, Problem, RunConfig
from .errors import FracSteadyError, InvalidArgumentError, NonConvergenceError
from .mesh import GridFunction
from .model import (
    build_subsolution,
    build_supersolution,
    check_subsupersolution,
    nonexistence_certificate,
)
from .solver import monotone_solve, newton_solve
from .spectral import boundary_fit, torsion_closed_form, torsion_constant
from .svg import SolutionOverlay, emit_svg
from .sweep import run_sweep
from .verify import format_table, run_suite

log = logging.getLogger("fracsteady")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_json_safe(data), indent=2, sort_keys=True) + "\n")


def _setup(cfg: RunConfig) -> Problem:
    if cfg.s >= 0.5:
        log.warning(
            "s = %g >= 1/2: the existence theory assumes 1 > 2s; the discretization "
            "is still well defined, results are reported as observations",
            cfg.s,
        )
    pb = Problem(cfg)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    if cfg.dump_operator:
        pb.operator.dump(cfg.dump_operator)
        log.info("operator matrix written to %s", cfg.dump_operator)
    return pb


def _base_summary(pb: Problem) -> dict:
    cfg = pb.config
    return {"a": cfg.a, "b": cfg.b, "n": cfg.n, "s": cfg.s, "h_step": pb.grid.h_step}


def _fit_dict(fit) -> dict:
    return {
        "lower_c": fit.lower_c,
        "upper_c": fit.upper_c,
        "ratio": fit.ratio,
        "layer_lower_c": fit.layer_lower_c,
        "layer_upper_c": fit.layer_upper_c,
    }


def cmd_eig(pb: Problem) -> int:
    out = Path(pb.config.out_dir)
    eig = pb.eig
    eig.phi1.to_csv(out / "eigenfunction.csv", header="phi1")
    summary = _base_summary(pb)
    summary.update(
        lambda1=eig.lambda1,
        residual=eig.residual,
        iterations=eig.iterations,
        boundary_fit=_fit_dict(boundary_fit(eig.phi1, pb.config.s)),
    )
    write_json(out / "eig.json", summary)
    print(f"lambda1 = {eig.lambda1:.12g}  (residual {eig.residual:.2e}, {eig.iterations} iterations)")
    return EXIT_OK


def cmd_torsion(pb: Problem) -> int:
    cfg = pb.config
    out = Path(cfg.out_dir)
    e = pb.torsion
    e.to_csv(out / "torsion.csv", header="e")
    exact = torsion_closed_form(pb.grid.nodes, cfg.s, cfg.a, cfg.b)
    err = float(np.max(np.abs(e.values - exact)) / np.max(exact))
    summary = _base_summary(pb)
    summary.update(
        max_e=e.sup_norm(),
        kappa=torsion_constant(cfg.s),
        relative_error_vs_closed_form=err,
        boundary_fit=_fit_dict(boundary_fit(e, cfg.s)),
    )
    write_json(out / "torsion.json", summary)
    print(f"max e = {e.sup_norm():.12g}, relative error vs closed form {err:.3e}")
    return EXIT_OK


def _nonexistence_probe(pb: Problem, lam: float) -> int:
    cfg = pb.config
    lam1 = pb.eig.lambda1
    print(
        f"theorem hypothesis violated: lambda = {lam:.6g} <= lambda1 = {lam1:.6g}; "
        "no sub/supersolution pair is built, running the nonexistence probe"
    )
    K = cfg.K if cfg.K is not None else 1.0
    eps = cfg.eps if cfg.eps is not None else 0.0
    p, _ = pb.params(lam=lam, K=K, eps=eps)
    phi = pb.eig.phi1
    checks = [nonexistence_certificate(phi, p, pb.eig)]
    try:
        rep = newton_solve(
            GridFunction(pb.grid, 0.1 * phi.values), p, pb.operator, cfg.tol_solve, cfg.max_newton_iter
        )
    except NonConvergenceError as exc:
        rep = exc.report
    for u in rep.history:
        if np.all(u > 0):
            checks.append(nonexistence_certificate(u, p, pb.eig))
    all_fire = all(c.violated for c in checks)
    out = Path(cfg.out_dir)
    report = {
        "hypothesis": "lambda > lambda1",
        "hypothesis_holds": False,
        "lambda": lam,
        "lambda1": lam1,
        "K": K,
        "c": p.c,
        "eps": eps,
        "probe": rep.to_dict(),
        "certificates_checked": len(checks),
        "certificates_fired": sum(c.violated for c in checks),
        "all_fired": all_fire,
    }
    write_json(out / "report.json", report)
    rep.solution.to_csv(out / "solution.csv", header="u")
    print(
        f"energy certificate fired on {report['certificates_fired']}/{len(checks)} "
        f"positive candidates; Newton ended at max u = {rep.solution.sup_norm():.3e}"
    )
    return EXIT_OK if all_fire else EXIT_NUMERIC


def cmd_solve(pb: Problem) -> int:
    cfg = pb.config
    lam = pb.resolve_lambda()
    if lam <= pb.eig.lambda1:
        return _nonexistence_probe(pb, lam)
    out = Path(cfg.out_dir)
    p, t = pb.params()
    write_json(out / "thresholds.json", t.to_dict())
    A, e = pb.operator, pb.torsion
    lower = build_subsolution(t, pb.eig, e)
    upper = build_supersolution(t, e)
    sub = check_subsupersolution(lower, p, A, "subsolution", cfg.residual_tol)
    sup = check_subsupersolution(upper, p, A, "supersolution", cfg.residual_tol)
    branch = "minimal"
    if not sub.passed:
        log.warning(
            "constructed subsolution fails its residual check (max residual %.3e > %.1e); "
            "running the maximal branch from the supersolution instead",
            sub.max_residual,
            sub.tol,
        )
        branch = "maximal"
    try:
        rep = monotone_solve(
            lower, upper, p, A, branch, cfg.tol_solve, cfg.max_monotone_iter, verify_pair=False
        )
    except NonConvergenceError as exc:
        rep = exc.report
    scale = 1.0 + rep.solution.sup_norm()
    found = rep.converged and rep.positive and rep.final_residual <= 10.0 * cfg.tol_solve * scale
    report = {
        "lambda": p.lam,
        "lambda1": pb.eig.lambda1,
        "K": p.K,
        "c": p.c,
        "eps": p.eps,
        "theorem_predicts": t.predicts(p.K, p.eps),
        "subsolution_check": {"passed": sub.passed, "max_residual": sub.max_residual, "tol": sub.tol},
        "supersolution_check": {"passed": sup.passed, "min_residual": sup.min_residual, "tol": sup.tol},
        "solver": rep.to_dict(),
        "solution_found": found,
    }
    write_json(out / "report.json", report)
    rep.solution.to_csv(out / "solution.csv", header="u")
    if cfg.svg:
        overlay = SolutionOverlay(
            pb.grid.nodes,
            {"subsolution": lower.values, "solution": rep.solution.values, "supersolution": upper.values},
            title=f"lambda = {p.lam:.4g}, K = {p.K:.4g}, c = {p.c:.4g}, eps = {p.eps:.4g}",
        )
        emit_svg(overlay, out / "solution.svg")
    print(
        f"{rep.branch} branch: {'converged' if rep.converged else 'NOT converged'} in "
        f"{rep.iterations} steps, residual {rep.final_residual:.3e}, max u = {rep.solution.sup_norm():.6g}"
    )
    return EXIT_OK if found else EXIT_NUMERIC


def cmd_sweep(pb: Problem) -> int:
    cfg = pb.config
    if not cfg.axes:
        raise ConfigError("sweep needs sweep.axes in the configuration")
    out = Path(cfg.out_dir)
    emap = run_sweep(pb)
    emap.to_csv(out / "map.csv")
    if cfg.svg:
        emit_svg(emap, out / "map.svg")
    missed = emap.unsolved_predicted()
    n_pred = sum(c.theorem_predicts for c in emap.cells.values())
    n_found = sum(c.solver_found for c in emap.cells.values())
    print(f"{len(emap.cells)} cells: {n_pred} predicted, {n_found} solved, {len(missed)} predicted but unsolved")
    for ij in missed:
        log.error("predicted cell %s not solved: %s", ij, emap.cells[ij])
    return EXIT_OK if not missed else EXIT_NUMERIC


def cmd_verify(pb: Problem) -> int:
    rows = run_suite(pb)
    print(format_table(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC


COMMANDS = {
    "eig": cmd_eig,
    "torsion": cmd_torsion,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration (defaults if omitted)")
    common.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    common.add_argument("--dump-operator", type=Path, help="write the dense operator matrix as text")
    common.add_argument("--workers", type=int, help="sweep worker threads (overrides sweep.workers)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="fracsteady",
        description="Positive steady states of a fractional logistic model with grazing and harvesting.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "eig": "principal eigenpair (eigenfunction.csv, eig.json)",
        "torsion": "torsion function (torsion.csv, torsion.json)",
        "solve": "steady state between the constructed sub/supersolutions",
        "sweep": "existence map over two parameters (map.csv, map.svg)",
        "verify": "invariant suite with a pass/fail table",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = RunConfig.load(args.config)
        if args.out is not None:
            cfg.out_dir = str(args.out)
        if args.dump_operator is not None:
            cfg.dump_operator = str(args.dump_operator)
        if args.workers is not None:
            cfg.workers = args.workers
        cfg.validate()
        pb = _setup(cfg)
        return COMMANDS[args.command](pb)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FracSteadyError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
