import json
import re
import subprocess
import sys

import numpy as np
import pytest

from fracsteady.cli import main
from fracsteady.config import Axis, ConfigError, Problem, RunConfig
from fracsteady.svg import SolutionOverlay, emit_svg
from fracsteady.sweep import ExistenceMap, run_sweep

SMALL = {"mesh": {"n": 96}, "operator": {"s": 0.4}}


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_verify_defaults_exit_zero(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and re.search(r"(\d+)/\1 checks passed", out)


def test_eig_and_torsion_outputs(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert main(["eig", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert main(["torsion", "--config", cfg, "--out", str(tmp_path)]) == 0
    eig = json.loads((tmp_path / "eig.json").read_text())
    assert eig["n"] == 96 and eig["lambda1"] > 0
    assert (tmp_path / "eigenfunction.csv").read_text().startswith("x,phi1\n")
    tor = json.loads((tmp_path / "torsion.json").read_text())
    assert tor["relative_error_vs_closed_form"] < 0.05
    data = np.loadtxt(tmp_path / "torsion.csv", delimiter=",", skiprows=1)
    assert data.shape == (96, 2)


def test_solve_outputs_and_ordering(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 0
    for name in ("solution.csv", "report.json", "thresholds.json", "solution.svg"):
        assert (tmp_path / name).exists()
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["solution_found"] and rep["theorem_predicts"]
    svg = (tmp_path / "solution.svg").read_text()
    curves = re.findall(r'data-label="([^"]+)"[^>]*points="([^"]+)"', svg)
    assert [c[0] for c in curves] == ["subsolution", "solution", "supersolution"]
    ys = [np.array([float(p.split(",")[1]) for p in pts.split()]) for _, pts in curves]
    # SVG y grows downwards: lower function has the larger coordinate
    assert np.all(ys[0] >= ys[1]) and np.all(ys[1] >= ys[2])


def test_solve_below_lambda1_runs_probe(tmp_path, capsys):
    cfg = write(tmp_path, {**SMALL, "model": {"lambda_over_lambda1": 0.5}})
    assert main(["solve", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "theorem hypothesis violated" in out
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["all_fired"] and not rep["hypothesis_holds"]
    assert not (tmp_path / "thresholds.json").exists()


def test_sweep_predicted_cells_solved(tmp_path):
    cfg = {
        **SMALL,
        "sweep": {
            "axes": [
                {"param": "K", "scale": "theorem", "linspace": [0.2, 0.8, 3]},
                {"param": "eps", "values": [0.0, 1e-3, 1.0]},
            ]
        },
    }
    path = write(tmp_path, cfg)
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "a")]) == 0
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "b"), "--workers", "3"]) == 0
    a = (tmp_path / "a" / "map.csv").read_text()
    assert a == (tmp_path / "b" / "map.csv").read_text()
    assert (tmp_path / "a" / "map.svg").read_text() == (tmp_path / "b" / "map.svg").read_text()
    lines = a.splitlines()
    assert lines[0] == "param1,param2,theorem_predicts,solver_found,residual,iterations"
    assert len(lines) == 10
    rows = [ln.split(",") for ln in lines[1:]]
    # eps = 0 sits on the boundary of the predicted box, huge eps far outside it
    assert all(r[2] == "0" for r in rows if float(r[1]) in (0.0, 1.0))
    assert all(r[3] == "1" for r in rows if r[2] == "1")
    assert (tmp_path / "a" / "map.svg").read_text().count('class="cell"') == 9


def test_outputs_deterministic(tmp_path):
    cfg = write(tmp_path, SMALL)
    for d in ("r1", "r2"):
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for name in ("solution.csv", "report.json", "thresholds.json", "solution.svg"):
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()


def test_dump_operator(tmp_path):
    cfg = write(tmp_path, {"mesh": {"n": 10}})
    dump = tmp_path / "A.txt"
    assert main(["eig", "--config", cfg, "--out", str(tmp_path), "--dump-operator", str(dump)]) == 0
    A = np.loadtxt(dump)
    assert A.shape == (10, 10) and np.allclose(A, A.T)


@pytest.mark.parametrize(
    "cfg",
    [
        {"mesh": {"n": 1}},
        {"mesh": {"a": 1.0, "b": 0.0}},
        {"mesh": {"n": 2.5}},
        {"operator": {"s": 1.2}},
        {"model": {"c": -1}},
        {"model": {"lambda": 1.0, "lambda_over_lambda1": 2.0}},
        {"model": {"K": "big"}},
        {"bogus": {}},
        {"mesh": {"profile": [1.0, -1.0]}},
        {"sweep": {"axes": [{"param": "K", "values": []}, {"param": "eps", "values": [1]}]}},
        {"sweep": {"axes": [{"param": "lambda_over_lambda1", "scale": "theorem", "values": [2]}]}},
        {"sweep": {"axes": [{"param": "K", "linspace": [0, 1]}, {"param": "eps", "values": [1]}]}},
        {"sweep": {"workers": 0}},
        [1, 2],
    ],
)
def test_malformed_config_is_usage_error(tmp_path, cfg, capsys):
    path = write(tmp_path, cfg)
    assert main(["eig", "--config", path, "--out", str(tmp_path)]) == 2
    assert "usage error" in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    assert main(["eig", "--config", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["eig", "--config", str(tmp_path / "bad.json")]) == 2


def test_bad_subcommand():
    assert main(["explode"]) == 2


def test_sweep_without_axes_is_usage_error(tmp_path):
    assert main(["sweep", "--config", write(tmp_path, SMALL), "--out", str(tmp_path)]) == 2


def test_half_order_warning(tmp_path, caplog):
    cfg = write(tmp_path, {"mesh": {"n": 16}, "operator": {"s": 0.6}})
    with caplog.at_level("WARNING"):
        assert main(["eig", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert any("1/2" in r.getMessage() for r in caplog.records)


def test_absolute_lambda(tmp_path):
    cfg = RunConfig.from_dict({"mesh": {"n": 32}, "model": {"lambda": 10.0, "K": 0.5, "eps": 0.0}})
    pb = Problem(cfg)
    p, t = pb.params()
    assert p.lam == 10.0 and p.K == 0.5 and t is not None


def test_config_linspace_axis():
    cfg = RunConfig.from_dict(
        {"sweep": {"axes": [{"param": "c", "linspace": [0, 2, 5]}, {"param": "K", "values": [1, 2]}]}}
    )
    assert cfg.axes[0] == Axis("c", (0.0, 0.5, 1.0, 1.5, 2.0), "absolute")


def test_empty_sweep_is_error(tmp_path):
    emap = ExistenceMap([Axis("K", ()), Axis("eps", ())])
    with pytest.raises(ValueError):
        emit_svg(emap, tmp_path / "m.svg")
    assert not (tmp_path / "m.svg").exists()
    with pytest.raises(ValueError):
        emap.to_csv(tmp_path / "m.csv")
    with pytest.raises(ConfigError):
        run_sweep(Problem(RunConfig(n=16)), [Axis("K", ()), Axis("eps", (1.0,))])


def test_sweep_over_lambda_ratio():
    pb = Problem(RunConfig(n=48, K=0.6, eps=0.0))
    emap = run_sweep(pb, [Axis("lambda_over_lambda1", (0.5, 1.5, 3.0)), Axis("c", (0.0, 1.0))])
    assert emap.shape == (3, 2)
    for j in range(2):
        low = emap.cells[(0, j)]
        assert not low.theorem_predicts and not low.solver_found
    assert all(c.solver_found for c in emap.cells.values() if c.theorem_predicts)


def test_emit_svg_unwritable(tmp_path):
    overlay = SolutionOverlay(np.linspace(0, 1, 5), {"u": np.ones(5)})
    with pytest.raises(OSError):
        emit_svg(overlay, tmp_path / "missing-dir" / "u.svg")


def test_emit_svg_rejects_unknown_artifact(tmp_path):
    with pytest.raises(TypeError):
        emit_svg(object(), tmp_path / "x.svg")


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, {"mesh": {"n": 16}, "operator": {"s": 0.3}})
    res = subprocess.run(
        [sys.executable, "-m", "fracsteady", "eig", "--config", cfg, "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and "lambda1 =" in res.stdout
