import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crestwave.errors import ParameterError
from crestwave.grid import GridFunction, build_grid, grid_function
from crestwave.solver import (
    SolverOptions,
    check_xgprime_bounded,
    dilation_drift,
    monotonicity_defect,
    project_X1,
    refinement_residual,
    solve_fixed_point,
)
from crestwave.system import Parameters, big_G, is_even

# Newton on (g, nu) with the gauge x0 = 1, default grid; agrees with ppd 64 to 1e-12
NU_STAR_1 = 0.198176278173
# drift of the gauged iteration at (1, 1/4) per unit damping; stable under ppd 32 -> 64
DRIFT_1_QUARTER = -0.6445


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(damping=0.0),
        dict(damping=1.5),
        dict(tol_residual=0.0),
        dict(max_iters=0),
        dict(acceleration="newton"),
        dict(continuation_lambdas=(0.5, 0.9)),
        dict(continuation_lambdas=(0.6, 0.5, 1.0)),
    ],
)
def test_options_validation(kwargs):
    with pytest.raises(ParameterError):
        SolverOptions(**kwargs)


def test_default_continuation():
    assert SolverOptions().lambdas(Parameters(1.0, 0.25)) == pytest.approx((1 / 3, 2 / 3, 1.0))
    assert SolverOptions(continuation_lambdas=(0.5, 1.0)).lambdas(Parameters(1.0, 0.25)) == (0.5, 1.0)


@settings(max_examples=20, deadline=None)
@given(amp=st.floats(0.01, 1.0), seed=st.integers(0, 2**16))
def test_projection_lands_in_cone(amp, seed):
    grid = build_grid()
    p = Parameters(1.0, 0.25)
    rng = np.random.default_rng(seed)
    g = GridFunction(grid, amp * rng.standard_normal(grid.size) / (1 + grid.nodes**2))
    q = project_X1(g, p)
    assert is_even(big_G(q, p))
    assert monotonicity_defect(q, p) <= 1e-12
    again = project_X1(q, p)
    assert np.allclose(again.values, q.values, atol=1e-14)


def test_xgprime_of_lorentzian():
    """sup |x g'| for 1/(1+x^2) is 1/2, attained at x = 1 (brute-force maximum)."""
    grid = build_grid(points_per_decade=64)
    t = np.linspace(0.01, 10, 200001)
    brute = np.max(2 * t**2 / (1 + t**2) ** 2)
    assert brute == pytest.approx(0.5, abs=1e-9)
    val = check_xgprime_bounded(grid_function(grid, lambda x: 1 / (1 + x * x)))
    assert val == pytest.approx(brute, abs=1e-3)


def test_prescribed_iteration_is_edge_pinned(pinned):
    """Damped Picard meets the residual target, but x0 sits on the grid edge."""
    assert pinned.status == "edge_pinned"
    assert not pinned.converged
    assert pinned.final_residual <= 1e-6
    assert pinned.x0 is not None and pinned.x0 < 1e-5
    assert pinned.edge_margin < 0.1
    assert pinned.drift == pytest.approx(DRIFT_1_QUARTER, abs=2e-3)
    assert "truncation" in pinned.message
    assert [s.lam for s in pinned.stages] == pytest.approx([1 / 3, 2 / 3, 1.0])


def test_dilation_drift_is_nonzero_off_the_critical_curve(default_grid):
    drift, residual, _ = dilation_drift(Parameters(1.0, 0.25), default_grid)
    assert drift == pytest.approx(DRIFT_1_QUARTER, abs=2e-3)
    assert residual < 0.5


def test_anderson_runs(default_grid):
    rep = solve_fixed_point(
        Parameters(1.0, 0.25), default_grid, SolverOptions(acceleration="anderson", max_iters=200)
    )
    assert rep.status in {"converged", "edge_pinned", "stagnated", "max_iters", "diverged"}
    assert len(rep.history) == rep.iterations


def test_critical_solution(critical, critical_refined):
    rep = critical[1.0]
    assert rep.converged and rep.status == "converged"
    assert rep.params.nu == pytest.approx(NU_STAR_1, abs=1e-9)
    assert rep.x0 == pytest.approx(1.0, abs=1e-9)
    assert rep.final_residual < 1e-10
    assert critical_refined[1.0].params.nu == pytest.approx(rep.params.nu, abs=1e-9)
    # the critical curve decreases with mu
    nus = [critical[mu].params.nu for mu in sorted(critical)]
    assert nus == sorted(nus, reverse=True)


def test_refinement_residual_small_for_critical_solution(critical):
    rep = critical[1.0]
    assert refinement_residual(rep.g, rep.params) < 1e-7


def test_history_is_recorded(pinned):
    assert len(pinned.history) == pinned.iterations
    assert all(math.isfinite(r) for r in pinned.history)
