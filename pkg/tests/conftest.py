import os
import sys

import numpy as np
import pytest

from fracsteady import (
    Interval,
    assemble_operator,
    build_grid,
    harvesting_profile,
    principal_eigenpair,
    torsion_function,
)
from fracsteady.config import Problem, RunConfig


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("FRACSTEADY_SEED", "0")))


@pytest.fixture(scope="session")
def unit_interval():
    return Interval(-1.0, 1.0)


@pytest.fixture(scope="session")
def setup_factory():
    """Cached (grid, A, eig, e, h) for ((-1, 1), n, s)."""
    cache = {}

    def make(n, s):
        key = (n, s)
        if key not in cache:
            grid = build_grid(Interval(-1.0, 1.0), n)
            A = assemble_operator(grid, s)
            cache[key] = (grid, A, principal_eigenpair(A), torsion_function(A), harvesting_profile(grid))
        return cache[key]

    return make


@pytest.fixture(scope="session")
def default_problem():
    return Problem(RunConfig()).warm()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
