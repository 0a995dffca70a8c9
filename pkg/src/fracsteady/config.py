"""JSON run configuration and the shared problem setup.

Schema (every section and key is optional; defaults shown)::

    {
      "mesh":       {"a": -1.0, "b": 1.0, "n": 256, "profile": "sine"},
      "operator":   {"s": 0.5},
      "model":      {"lambda_over_lambda1": 2.0, "c": 1.0,
                     "K": null, "K_rel": 0.5, "eps": null, "eps_rel": 0.5},
      "tolerances": {"tol_solve": 1e-10, "residual": 1e-8, "linear_solve": 1e-10,
                     "max_monotone_iter": 5000, "max_newton_iter": 100},
      "sweep":      {"axes": [{"param": "K", "scale": "theorem",
                               "linspace": [0.1, 0.9, 5]},
                              {"param": "eps", "scale": "theorem",
                               "values": [0.2, 0.5, 0.8]}],
                     "workers": 1},
      "output":     {"dir": "out", "svg": true, "dump_operator": null}
    }

``lambda`` (absolute) may replace ``lambda_over_lambda1``. ``profile`` is
``"sine"``, ``"bump"`` or a list of interior nodal values. ``K``/``eps``
override the relative positions ``K_rel``/``eps_rel``, which place the value
inside the existence box: ``K = sigma_lower + K_rel (sigma_upper -
sigma_lower)`` and ``eps = eps_rel * eps_star``. Sweep axes take ``values``
or ``linspace: [start, stop, num]``; ``scale: "theorem"`` reads them as such
relative positions, ``lambda_over_lambda1`` is always relative to lambda1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .errors import FracSteadyError
from .fracop import OperatorMatrix, assemble_operator
from .mesh import GridFunction, Interval, build_grid, harvesting_profile
from .model import ModelParams, thresholds
from .spectral import EigenPair, principal_eigenpair, torsion_function

SWEEP_PARAMS = ("lambda_over_lambda1", "K", "c", "eps")


class ConfigError(FracSteadyError, ValueError):
    """Malformed configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class Axis:
    param: str
    values: tuple
    scale: str = "absolute"


@dataclass
class RunConfig:
    a: float = -1.0
    b: float = 1.0
    n: int = 256
    profile: Union[str, list] = "sine"
    s: float = 0.5
    lam: Optional[float] = None
    lambda_over_lambda1: Optional[float] = 2.0
    c: float = 1.0
    K: Optional[float] = None
    K_rel: float = 0.5
    eps: Optional[float] = None
    eps_rel: float = 0.5
    tol_solve: float = 1e-10
    residual_tol: float = 1e-8
    linear_solve_tol: float = 1e-10
    max_monotone_iter: int = 5000
    max_newton_iter: int = 100
    axes: List[Axis] = field(default_factory=list)
    workers: int = 1
    out_dir: str = "out"
    svg: bool = True
    dump_operator: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {"mesh", "operator", "model", "tolerances", "sweep", "output"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config sections: {sorted(extra)}")
        cfg = cls()
        mesh, op, mod, tol, sw, out = (
            _section(d, k) for k in ("mesh", "operator", "model", "tolerances", "sweep", "output")
        )

        _take(cfg, mesh, {"a": float, "b": float, "n": int, "profile": None}, "mesh")
        _take(cfg, op, {"s": float}, "operator")
        if "lambda" in mod and "lambda_over_lambda1" in mod:
            raise ConfigError("give either model.lambda or model.lambda_over_lambda1, not both")
        if "lambda" in mod:
            cfg.lam = _num(mod["lambda"], "model.lambda")
            cfg.lambda_over_lambda1 = None
        mod = {k: v for k, v in mod.items() if k != "lambda"}
        _take(
            cfg,
            mod,
            {"lambda_over_lambda1": float, "c": float, "K": float, "K_rel": float, "eps": float, "eps_rel": float},
            "model",
        )
        tol = dict(tol)
        if "residual" in tol:
            tol["residual_tol"] = tol.pop("residual")
        if "linear_solve" in tol:
            tol["linear_solve_tol"] = tol.pop("linear_solve")
        _take(
            cfg,
            tol,
            {
                "tol_solve": float,
                "residual_tol": float,
                "linear_solve_tol": float,
                "max_monotone_iter": int,
                "max_newton_iter": int,
            },
            "tolerances",
        )
        if "axes" in sw:
            cfg.axes = [_axis(a, i) for i, a in enumerate(_list(sw["axes"], "sweep.axes"))]
        if "workers" in sw:
            cfg.workers = int(_num(sw["workers"], "sweep.workers"))
        extra = set(sw) - {"axes", "workers"}
        if extra:
            raise ConfigError(f"unknown keys in sweep: {sorted(extra)}")
        out = dict(out)
        if "dir" in out:
            out["out_dir"] = str(out.pop("dir"))
        _take(cfg, out, {"out_dir": str, "svg": bool, "dump_operator": None}, "output")
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Union[str, Path, None]) -> "RunConfig":
        if path is None:
            return cls()
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def validate(self) -> None:
        try:
            Interval(self.a, self.b)
            harvesting_profile(build_grid(Interval(self.a, self.b), self.n), self.profile)
        except FracSteadyError as exc:
            raise ConfigError(str(exc)) from exc
        if not 0.0 < self.s < 1.0:
            raise ConfigError(f"operator.s must lie in (0, 1), got {self.s}")
        if self.lam is not None and not self.lam > 0:
            raise ConfigError("model.lambda must be positive")
        if self.lambda_over_lambda1 is not None and not self.lambda_over_lambda1 > 0:
            raise ConfigError("model.lambda_over_lambda1 must be positive")
        if self.c < 0:
            raise ConfigError("model.c must be nonnegative")
        if self.K is not None and not self.K > 0:
            raise ConfigError("model.K must be positive")
        if self.eps is not None and self.eps < 0:
            raise ConfigError("model.eps must be nonnegative")
        if not (self.tol_solve > 0 and self.residual_tol > 0 and self.linear_solve_tol > 0):
            raise ConfigError("tolerances must be positive")
        if self.max_monotone_iter < 1 or self.max_newton_iter < 1:
            raise ConfigError("iteration caps must be positive")
        if self.workers < 1:
            raise ConfigError("sweep.workers must be >= 1")
        if self.axes and len(self.axes) != 2:
            raise ConfigError("sweep.axes needs exactly two axes")
        if len({ax.param for ax in self.axes}) != len(self.axes):
            raise ConfigError("sweep axes must be distinct parameters")


def _section(d, name):
    v = d.get(name, {})
    if not isinstance(v, dict):
        raise ConfigError(f"section {name!r} must be an object")
    return v


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where} must be a finite number, got {v!r}")
    return float(v)


def _list(v, where):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where} must be a non-empty list")
    return v


def _take(cfg, section, spec, where):
    extra = set(section) - set(spec)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")
    for key, typ in spec.items():
        if key not in section:
            continue
        v = section[key]
        if v is None:
            setattr(cfg, key, None)
        elif typ is float:
            setattr(cfg, key, _num(v, f"{where}.{key}"))
        elif typ is int:
            x = _num(v, f"{where}.{key}")
            if x != int(x):
                raise ConfigError(f"{where}.{key} must be an integer")
            setattr(cfg, key, int(x))
        elif typ is bool:
            if not isinstance(v, bool):
                raise ConfigError(f"{where}.{key} must be true or false")
            setattr(cfg, key, v)
        elif typ is str:
            setattr(cfg, key, str(v))
        else:
            setattr(cfg, key, v)


def _axis(spec, i) -> Axis:
    where = f"sweep.axes[{i}]"
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be an object")
    param = spec.get("param")
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"{where}.param must be one of {SWEEP_PARAMS}, got {param!r}")
    scale = spec.get("scale", "absolute")
    if scale not in ("absolute", "theorem"):
        raise ConfigError(f"{where}.scale must be 'absolute' or 'theorem'")
    if scale == "theorem" and param not in ("K", "eps"):
        raise ConfigError(f"{where}: theorem scale only applies to K and eps")
    if ("values" in spec) == ("linspace" in spec):
        raise ConfigError(f"{where} needs exactly one of 'values' or 'linspace'")
    if "values" in spec:
        vals = tuple(_num(v, f"{where}.values") for v in _list(spec["values"], f"{where}.values"))
    else:
        ls = _list(spec["linspace"], f"{where}.linspace")
        if len(ls) != 3:
            raise ConfigError(f"{where}.linspace must be [start, stop, num]")
        num = _num(ls[2], f"{where}.linspace[2]")
        if num < 1 or num != int(num):
            raise ConfigError(f"{where}.linspace num must be a positive integer")
        vals = tuple(float(v) for v in np.linspace(_num(ls[0], where), _num(ls[1], where), int(num)))
    return Axis(param, vals, scale)


@dataclass
class Problem:
    """Grid, operator, eigenpair and torsion function shared by all model runs."""

    config: RunConfig

    @cached_property
    def grid(self):
        return build_grid(Interval(self.config.a, self.config.b), self.config.n)

    @cached_property
    def h(self) -> GridFunction:
        return harvesting_profile(self.grid, self.config.profile)

    @cached_property
    def operator(self) -> OperatorMatrix:
        return assemble_operator(self.grid, self.config.s)

    @cached_property
    def eig(self) -> EigenPair:
        return principal_eigenpair(self.operator)

    @cached_property
    def torsion(self) -> GridFunction:
        return torsion_function(self.operator, self.config.linear_solve_tol)

    def warm(self) -> "Problem":
        # force the cached pieces before handing the problem to worker threads
        self.h, self.operator, self.eig, self.torsion, self.operator._cho  # noqa: B018
        return self

    def resolve_lambda(self, ratio: Optional[float] = None) -> float:
        if ratio is not None:
            return ratio * self.eig.lambda1
        if self.config.lam is not None:
            return self.config.lam
        return self.config.lambda_over_lambda1 * self.eig.lambda1

    def params(
        self,
        lam: Optional[float] = None,
        c: Optional[float] = None,
        K: Optional[float] = None,
        eps: Optional[float] = None,
        K_rel: Optional[float] = None,
        eps_rel: Optional[float] = None,
    ) -> tuple:
        """Resolve a full parameter set; returns ``(ModelParams, ThresholdSet | None)``.

        The threshold set is ``None`` when ``lambda <= lambda1``.
        """
        cfg = self.config
        lam = self.resolve_lambda() if lam is None else lam
        c = cfg.c if c is None else c
        probe = ModelParams(lam, 1.0, c, 0.0, cfg.s, self.h)
        t = None
        if lam > self.eig.lambda1:
            t = thresholds(probe, self.eig, self.torsion)
        if K is None:
            K = cfg.K
        if K is None:
            rel = cfg.K_rel if K_rel is None else K_rel
            if t is None or not math.isfinite(t.sigma_upper):
                raise ConfigError("model.K is required when lambda <= lambda1 or c = 0")
            K = t.sigma_lower + rel * (t.sigma_upper - t.sigma_lower)
        if eps is None:
            eps = cfg.eps
        if eps is None:
            rel = cfg.eps_rel if eps_rel is None else eps_rel
            eps = 0.0 if t is None else rel * t.eps_star
        p = ModelParams(lam, K, c, eps, cfg.s, self.h)
        if t is not None:
            t = thresholds(p, self.eig, self.torsion)
        return p, t
