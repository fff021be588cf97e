import math

import numpy as np
import pytest

from crestwave.errors import InconsistentStateError
from crestwave.grid import GridFunction, build_grid
from crestwave.system import Parameters, apply_T, dilate
from crestwave.verification import (
    VerificationReport,
    calibrate,
    check_apriori_estimate,
    check_lemma_bounds,
    check_lipschitz_T,
    check_X1_membership,
    even_bump,
    lipschitz_ratios,
    skipped,
    verify_state,
)

P = Parameters(1.0, 0.25)


@pytest.fixture(scope="module")
def zero(default_grid):
    return GridFunction(default_grid, np.zeros(default_grid.size))


def test_zero_is_in_the_cone(zero):
    rec = check_X1_membership(zero, P)
    assert rec.passed, rec.line()


def test_decreasing_G_is_rejected_with_location(default_grid):
    """G = -ln(1 + x^2) is even but decreasing on (0, inf)."""
    x = default_grid.nodes
    g = GridFunction(default_grid, -(1.0 + 0.5 * (P.mu - P.nu)) * np.log1p(x * x))
    rec = check_X1_membership(g, P)
    assert rec.passed is False
    assert rec.measured["max_decrease"] > 0
    assert "decreases" in rec.measured["violation"]


def test_odd_G_is_rejected(default_grid):
    x = default_grid.nodes
    g = GridFunction(default_grid, 0.1 * np.arctan(x))
    rec = check_X1_membership(g, P)
    assert rec.passed is False and rec.measured["evenness"] > 1e-3


def test_lemma_bounds_at_zero(zero):
    state = apply_T(zero, P)
    for rec in check_lemma_bounds(state, P):
        assert rec.passed, rec.line()


def test_calibration_is_reproducible(default_grid):
    a, b = calibrate(P, default_grid), calibrate(P, default_grid)
    assert a == b
    assert a.provenance.startswith("g0-") and len(a.provenance) == 15
    assert calibrate(Parameters(1.0, 0.3), default_grid).provenance != a.provenance


def test_lipschitz_zero_perturbation(zero):
    assert lipschitz_ratios(zero, P, 0.0) == (0.0, 0.0)


def test_lipschitz_at_zero(zero):
    for rec in check_lipschitz_T(P, zero):
        assert rec.passed, rec.line()


def test_even_bump(default_grid):
    b = even_bump(default_grid, 0.0)
    assert np.allclose(b, b[::-1])
    assert b.max() <= 1.0 and b.max() > 0.99


def test_apriori_needs_a_bracket():
    """Dilating g = 0 by 1e8 moves x0 from 0.352 to 3.5e-9, below x_min."""
    grid = build_grid()
    g = dilate(GridFunction(grid, np.zeros(grid.size)), 1e8, P)
    state = apply_T(g, P, strict=False)
    with pytest.raises(InconsistentStateError):
        check_apriori_estimate(state)


def test_apriori_on_critical_solution(critical, critical_refined):
    recs = check_apriori_estimate(critical[1.0].system, refined=critical_refined[1.0].system)
    for rec in recs:
        assert rec.passed, rec.line()
    assert recs[0].measured["x0"] == pytest.approx(1.0, abs=1e-9)


def test_verify_state_critical(critical):
    rep = verify_state(critical[1.0].system)
    assert rep.passed, rep.text()
    assert rep.summary().startswith("PASS")


def test_verify_state_pinned_fails_resolution(pinned):
    rep = verify_state(pinned.system, lipschitz=False)
    failed = {c.name for c in rep.checks if c.passed is False}
    assert failed == {"crest_scale_resolved"}
    assert rep.counts["SKIP"] == 1


def test_report_bookkeeping():
    rep = VerificationReport()
    rep.add(skipped("x", "ref", "target", "why"))
    assert rep.passed and rep.counts == {"PASS": 0, "FAIL": 0, "SKIP": 1}
    assert "why" in rep.text()
    assert rep.to_dict()["summary"] == "PASS: 0 passed, 0 failed, 1 skipped"
    assert math.isfinite(len(rep.text()))
