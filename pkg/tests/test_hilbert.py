import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import make_interp_spline

from crestwave.errors import UnsupportedInputError
from crestwave.grid import build_grid, grid_function
from crestwave.hilbert import TailModel, check_H1_zero, hilbert_transform
from crestwave.system import branch_angle

# principal values from scipy.integrate.quad(weight="cauchy") plus regular tails
H_QUARTIC = {0.7: 0.5947200812656795, 3.0: 0.2586976028731272}


def _lorentz(a, c):
    return lambda x: a / ((x - c) ** 2 + a * a)


def test_lorentzian_pair():
    g = build_grid()
    f = grid_function(g, lambda x: 1 / (1 + x * x), tail_exponent=2.0)
    Hf = hilbert_transform(f)
    x = g.nodes
    assert np.max(np.abs(Hf.values - x / (1 + x * x))) < 1e-8


def test_odd_input_with_slow_decay():
    g = build_grid()
    f = grid_function(g, lambda x: x / (1 + x * x), zero_exponent=1.0, tail_exponent=1.0)
    assert np.max(np.abs(hilbert_transform(f).values + 1 / (1 + g.nodes**2))) < 1e-9


@pytest.mark.parametrize("x0", sorted(H_QUARTIC))
def test_against_cauchy_weight_quadrature(x0):
    g = build_grid(points_per_decade=64)
    f = grid_function(g, lambda x: 1 / (1 + x**4), tail_exponent=4.0)
    Hf = hilbert_transform(f)
    # the oracle points are not nodes: compare with a spline in ln x
    pos = g.nodes > 0
    spline = make_interp_spline(np.log(g.nodes[pos]), Hf.values[pos], k=5)
    assert float(spline(math.log(x0))) == pytest.approx(H_QUARTIC[x0], abs=1e-9)


def test_shifted_log_trace():
    """H[arg(x - i) - arg(x - 2i)] = ln(x^2 + 1)/2 - ln(x^2 + 4)/2 (no additive constant)."""
    g = build_grid()
    x = g.nodes
    f = grid_function(
        g, lambda x: branch_angle(x) - (np.arctan(x / 2) - math.pi / 2), zero_exponent=1.0, tail_exponent=1.0
    )
    ref = 0.5 * np.log(x * x + 1) - 0.5 * np.log(x * x + 4)
    assert np.max(np.abs(hilbert_transform(f).values - ref)) < 1e-9


def test_constant_zero_model_costs_order_x_min():
    """A function vanishing linearly at 0 but declared with the constant model is off by O(x_min)."""
    g = build_grid()
    f = grid_function(g, lambda x: x / (1 + x * x), tail_exponent=1.0)
    err = np.abs(hilbert_transform(f).values + 1 / (1 + g.nodes**2))
    assert 1e-8 < np.max(err) < 10 * g.x_min


def test_constant_has_zero_transform():
    assert check_H1_zero(build_grid()) < 1e-12
    assert check_H1_zero(build_grid(), constant=-3.5) < 1e-11


def test_rejects_non_decaying_and_complex():
    g = build_grid()
    with pytest.raises(UnsupportedInputError):
        hilbert_transform(grid_function(g, np.ones_like, tail_exponent=0.0))
    with pytest.raises(UnsupportedInputError):
        hilbert_transform(grid_function(g, lambda x: 1j / (1 + x * x), tail_exponent=2.0))


def test_tail_model_fit():
    g = build_grid()
    f = grid_function(g, lambda x: 3 / (1 + x * x) + x / (1 + x * x) ** 2, tail_exponent=2.0)
    tm = TailModel.fit(f)
    assert tm.coeff_plus == pytest.approx(3.0, rel=1e-6) and tm.coeff_minus == pytest.approx(3.0, rel=1e-6)
    assert tm.acceptable


@settings(max_examples=20, deadline=None)
@given(a=st.floats(0.01, 100.0), c=st.floats(-1.0, 1.0))
def test_shifted_lorentzians(a, c):
    """H[a/((x-c)^2+a^2)] = (x-c)/((x-c)^2+a^2).

    The shift is at most the width: a peak much narrower than its distance
    from the origin is under-resolved in ``ln|x|``.  A shifted peak has a
    linear part at 0 that the constant zero model misses, worth about
    ``x_min |f'(0)| ~ x_min / a^2``.
    """
    c = c * a
    g = build_grid()
    f = grid_function(g, _lorentz(a, c), tail_exponent=2.0)
    x = g.nodes
    ref = (x - c) / ((x - c) ** 2 + a * a)
    err = np.max(np.abs(hilbert_transform(f).values - ref))
    assert err * a < 1e-6 + 10 * g.x_min / a


@settings(max_examples=20, deadline=None)
@given(w=st.lists(st.floats(-2, 2), min_size=2, max_size=2), a=st.floats(0.2, 5.0))
def test_linearity_and_parity(w, a):
    g = build_grid()
    e = grid_function(g, lambda x: 1 / (a * a + x * x), tail_exponent=2.0)
    o = grid_function(g, lambda x: x / (a * a + x * x) ** 2, tail_exponent=3.0)
    both = e.with_values(w[0] * e.values + w[1] * o.values, tail_exponent=2.0)
    He, Ho = hilbert_transform(e).values, hilbert_transform(o).values
    assert np.allclose(hilbert_transform(both).values, w[0] * He + w[1] * Ho, atol=1e-9)
    # even input -> odd output and vice versa
    assert np.allclose(He, -He[::-1], atol=1e-12)
    assert np.allclose(Ho, Ho[::-1], atol=1e-12)
