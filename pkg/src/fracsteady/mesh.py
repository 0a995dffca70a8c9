"""Uniform grids on an interval and grid functions with zero exterior data.

Only interior nodal values are stored. Every grid function is understood to
vanish at both endpoints and on the whole complement of the interval, which
is exactly the exterior Dirichlet condition of the nonlocal problem.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import InvalidArgumentError, InvalidDomainError, InvalidProfileError


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.a >= self.b:
            raise InvalidDomainError(f"need a < b, got ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class Grid:
    """``n`` equispaced interior nodes ``x_i = a + i*h``, ``i = 1..n``."""

    interval: Interval
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise InvalidDomainError(f"need at least 2 interior nodes, got n={self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h_step(self) -> float:
        return self.interval.length / (self.n + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        i = np.arange(1, self.n + 1, dtype=float)
        x = self.interval.a + i * self.h_step
        x.flags.writeable = False
        return x

    def is_symmetric(self) -> bool:
        return abs(self.interval.a + self.interval.b) <= 1e-14 * self.interval.length


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Interior nodal values of a function that is zero outside the interval."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise InvalidArgumentError(
                f"expected {self.grid.n} nodal values, got shape {v.shape}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __len__(self):
        return self.grid.n

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def to_csv(self, path: Union[str, Path], header: str = "value") -> None:
        """Write ``x,<header>`` rows with 17 significant digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", header])
            for xi, vi in zip(self.x, self.values):
                w.writerow([f"{xi:.17g}", f"{vi:.17g}"])

    @classmethod
    def from_csv(cls, path: Union[str, Path], interval: Interval) -> "GridFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        grid = build_grid(interval, data.shape[0])
        if not np.allclose(grid.nodes, data[:, 0], rtol=0, atol=1e-12 * interval.length):
            raise InvalidArgumentError(f"{path}: nodes do not match a uniform grid on {interval}")
        return cls(grid, data[:, 1])


def build_grid(interval: Interval, n: int) -> Grid:
    return Grid(interval, n)


def boundary_distance(grid: Grid) -> GridFunction:
    """Distance from each interior node to the nearer endpoint."""
    # index form rather than min(x - a, b - x): exactly mirror-symmetric
    i = np.arange(1, grid.n + 1)
    return GridFunction(grid, np.minimum(i, grid.n + 1 - i) * grid.h_step)


ProfileKind = Union[str, Sequence[float], np.ndarray]


def harvesting_profile(grid: Grid, kind: ProfileKind = "sine") -> GridFunction:
    """Nonnegative harvesting profile with sup-norm exactly one.

    ``kind`` is ``"sine"`` (``sin(pi (x-a)/(b-a))``), ``"bump"`` (the smooth
    compactly supported bump ``exp(1 - 1/(1 - r^2))`` centred on the
    interval), or an explicit sequence of interior nodal values, which is
    rescaled by its maximum.
    """
    a, L = grid.interval.a, grid.interval.length
    x = grid.nodes
    if isinstance(kind, str):
        if kind == "sine":
            v = np.sin(np.pi * (x - a) / L)
        elif kind == "bump":
            r = (2.0 * (x - a) / L) - 1.0
            v = np.zeros_like(x)
            inside = np.abs(r) < 1.0
            v[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        else:
            raise InvalidProfileError(f"unknown profile kind {kind!r}")
        v = np.clip(v, 0.0, None)
    else:
        v = np.asarray(kind, dtype=float)
        if v.shape != (grid.n,):
            raise InvalidProfileError(f"custom profile needs {grid.n} values, got {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidProfileError("custom profile must be finite and nonnegative")
    peak = v.max()
    if peak <= 0:
        raise InvalidProfileError("profile is identically zero")
    v = v / peak
    v[np.argmax(v)] = 1.0
    return GridFunction(grid, v)
