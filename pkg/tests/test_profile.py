import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import make_interp_spline

from crestwave.errors import ParameterError, WindowError
from crestwave.grid import split
from crestwave.profile import (
    ALL_EXPONENTS,
    SelfSimilarWave,
    asymptotic_exponents,
    evaluate_spacetime,
    limiting_velocity_direction,
    reconstruct_profile,
    similarity_law_s,
    surface_tension_diagnostic,
    velocity_asymptotics,
    window_grid,
)
from crestwave.system import Parameters
from crestwave.verification import profile_checks


@pytest.fixture(scope="module")
def state(critical):
    return critical[1.0].system


@pytest.fixture(scope="module")
def profile(state):
    return reconstruct_profile(state)


@pytest.fixture(scope="module")
def wave(profile):
    return SelfSimilarWave(profile)


def test_geometry_checks_pass(state, profile):
    for rec in profile_checks(state, profile):
        assert rec.passed, rec.line()


def test_corner_angle_and_turning(profile):
    nu, mu = profile.params.nu, profile.params.mu
    assert profile.interior_angle == pytest.approx(nu * math.pi, abs=1e-10)
    left, right = profile.corner_tangents
    assert left - right == pytest.approx((1 - nu) * math.pi)
    assert profile.total_turning == pytest.approx((mu - nu) * math.pi, abs=1e-4)


def test_symmetric_normalization_centres_the_corner(profile):
    left, right = profile.corner_tangents
    assert left + right == pytest.approx(0.0, abs=1e-10)


def test_crest_gauge_puts_unit_arclength_at_x0(critical, profile):
    """The critical solutions use x0 = 1; the crest gauge sends x0 to beta = 1."""
    assert critical[1.0].x0 == pytest.approx(1.0, abs=1e-9)
    grid = profile.grid
    beta = make_interp_spline(grid.s, split(profile.beta)[0], k=5)(0.0)
    assert float(beta) == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(profile.beta) > 0)


def test_explicit_scale_is_linear(state, profile):
    other = reconstruct_profile(state, scale=2.0 * profile.scale)
    assert np.allclose(other.beta, 2.0 * profile.beta, rtol=1e-12)
    assert np.allclose(other.zeta, 2.0 * profile.zeta, rtol=1e-9, atol=1e-12)


def test_asymptotic_normalization_fixes_far_tangent(state):
    prof = reconstruct_profile(state, normalization="asymptotic")
    assert prof.b_plus_inf == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ParameterError):
        velocity_asymptotics(prof)


@pytest.mark.parametrize("kwargs", [dict(normalization="weird"), dict(scale=-1.0), dict(scale="unit")])
def test_reconstruct_rejects_bad_options(state, kwargs):
    with pytest.raises(ParameterError):
        reconstruct_profile(state, **kwargs)


def test_taylor_coefficient_positive(profile):
    assert np.all(profile.a > 0)
    assert np.allclose(np.abs(profile.U), profile.a, rtol=1e-12)


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(-50, 50), t=st.floats(0.05, 5), lam=st.floats(0.2, 5))
def test_self_similarity(wave, alpha, t, lam):
    Z, Zt, A = evaluate_spacetime(wave, alpha, t)
    Z2, Zt2, A2 = evaluate_spacetime(wave, lam * alpha, lam * t)
    assert Z2 == pytest.approx(lam * Z, rel=1e-9, abs=1e-12)
    assert Zt2 == pytest.approx(Zt, rel=1e-9, abs=1e-12)
    assert A2 == pytest.approx(A / lam, rel=1e-9, abs=1e-12)


def test_crest_is_fixed_in_time(wave):
    for t in (0.1, 1.0, 10.0):
        assert evaluate_spacetime(wave, 0.0, t)[0] == 0


@pytest.mark.parametrize("t", [0.0, -1.0, float("nan")])
def test_nonpositive_time_rejected(wave, t):
    with pytest.raises(ParameterError):
        evaluate_spacetime(wave, 1.0, t)
    with pytest.raises(ParameterError):
        wave.Z(1.0, t)


def test_default_grid_does_not_cover_exponent_windows(profile):
    with pytest.raises(WindowError):
        asymptotic_exponents(profile)


@pytest.mark.parametrize(
    "mu,lo,hi",
    [(0.75, 1e-15, 1e7), (1.0, 1e-23, 1e5)],
)
def test_window_grid_extent(critical, mu, lo, hi):
    g = window_grid(critical[mu].params)
    assert g.x_min == pytest.approx(lo) and g.x_max == pytest.approx(hi)


def test_limiting_velocity_direction():
    assert limiting_velocity_direction(Parameters(1.0, 0.2)) == pytest.approx(-math.pi / 2)
    assert limiting_velocity_direction(Parameters(1.5, 0.2)) == pytest.approx(-math.pi / 4)


def test_similarity_laws():
    assert similarity_law_s(True, True) == frozenset()
    assert similarity_law_s(True, False) == {0.5}
    assert similarity_law_s(False, True) == {1.5}
    assert 0.123 in similarity_law_s(False, False)
    assert similarity_law_s(False, False) is ALL_EXPONENTS


def test_tension_diagnostic_validation(profile):
    with pytest.raises(ParameterError):
        surface_tension_diagnostic(profile, -1.0)
    rep = surface_tension_diagnostic(profile, 0.0, times=(1e-3,))
    assert rep.crossover_alpha == (0.0,)
