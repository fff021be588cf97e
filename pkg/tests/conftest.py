"""Shared solutions (solved once per session) and the acceptance summary printer."""

from __future__ import annotations

import pytest

from crestwave import Parameters, build_grid, solve_critical, solve_fixed_point
from crestwave.profile import solve_on_window_grid

CRITICAL_MUS = (0.75, 1.0, 1.5)

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def default_grid():
    return build_grid()


@pytest.fixture(scope="session")
def critical(default_grid):
    """Critical-curve solutions on the default grid, keyed by mu."""
    return {mu: solve_critical(mu, default_grid) for mu in CRITICAL_MUS}


@pytest.fixture(scope="session")
def critical_refined(critical):
    """The same solutions at twice the node density."""
    fine = build_grid(points_per_decade=64)
    return {
        mu: solve_critical(mu, fine, nu_guess=rep.params.nu, g0=rep.g) for mu, rep in critical.items()
    }


@pytest.fixture(scope="session")
def critical_window(critical):
    """The same solutions on grids wide enough for the asymptotic windows."""
    return {mu: solve_on_window_grid(rep) for mu, rep in critical.items()}


@pytest.fixture(scope="session")
def pinned(default_grid):
    """Prescribed damped Picard run at (1, 1/4); ends pinned to the grid edge."""
    return solve_fixed_point(Parameters(1.0, 0.25), default_grid)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
