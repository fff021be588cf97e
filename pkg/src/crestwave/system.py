"""The map ``g -> T[g]`` whose fixed points encode the self-similar crest.

Given ``g`` on the grid:

* ``(h^-1)'(x) = |x|**(nu-1) (x**2+1)**((mu-nu)/2) e**g(x)`` and ``h^-1`` is
  its odd antiderivative;
* ``F' = kappa / (x h^-1 (h^-1)')`` with ``kappa`` chosen so that the total
  increment of ``F`` is the turning angle ``(mu-nu) pi``; ``F(inf) = 0``;
* ``f = F - (mu-nu) theta`` with ``theta(x) = arg(x - i)`` in ``(-pi, 0)``,
  which removes the jump of ``F`` between the two infinities;
* ``T[g] = H f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import bisect

from .errors import (
    InconsistentStateError,
    NumericalFailureError,
    ParameterError,
    UnsupportedInputError,
)
from .grid import (
    FIT_TOLERANCE,
    Grid,
    GridFunction,
    integrate_from_infinity,
    integrate_from_zero,
    integrate_total_with_tails,
    join,
    split,
    zero_coeffs,
)
from .hilbert import hilbert_matrix

#: relative tolerance for "G is even" when choosing the model of f near 0
EVEN_TOLERANCE = 1e-8
#: allowed downward steps of F, relative to the turning angle
MONOTONE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Parameters:
    """Angle parameters with ``1/2 < mu <= 2`` and ``0 < nu < 1/2``.

    ``nu pi`` is the interior angle of the crest and ``mu pi`` the angle
    between the two branches at infinity.
    """

    mu: float
    nu: float

    def __post_init__(self) -> None:
        mu, nu = float(self.mu), float(self.nu)
        if not (math.isfinite(mu) and 0.5 < mu <= 2.0):
            raise ParameterError(f"mu={self.mu} outside the admissible window 1/2 < mu <= 2")
        if not (math.isfinite(nu) and 0.0 < nu < 0.5):
            raise ParameterError(f"nu={self.nu} outside the admissible window 0 < nu < 1/2")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @property
    def phi(self) -> float:
        """Signed downward turn of the tangent at the crest, ``(nu - 1) pi``."""
        return (self.nu - 1.0) * math.pi

    @property
    def turning(self) -> float:
        """Total increase of the tangent angle, ``(mu - nu) pi``."""
        return (self.mu - self.nu) * math.pi

    @property
    def lambda0(self) -> float:
        """Largest ``lambda`` of the homotopy ``g = lambda T[g]`` for which the a priori bound is known."""
        d = 2.0 * (self.mu - self.nu)
        return min((1.0 - 2.0 * self.nu) / d, (2.0 * self.mu - 1.0) / d, 1.0)

    @property
    def zero_exponent_f(self) -> float:
        """Exponent ``1 - 2 nu`` of the odd remainder ``f`` at the origin."""
        return 1.0 - 2.0 * self.nu

    @property
    def tail_exponent_f(self) -> float:
        """Decay exponent ``min(1, 2 mu - 1)`` of ``f`` at infinity."""
        return min(1.0, 2.0 * self.mu - 1.0)


def branch_angle(x: np.ndarray) -> np.ndarray:
    """``arg(x - i)``: continuous, from ``-pi`` at ``-inf`` to ``0`` at ``+inf``."""
    return np.arctan(x) - 0.5 * np.pi


def big_G(g: GridFunction, params: Parameters) -> np.ndarray:
    """``G = g + (mu-nu)/2 ln(x**2 + 1)`` at the nodes."""
    x = g.grid.nodes
    return g.values + 0.5 * (params.mu - params.nu) * np.log1p(x * x)


def is_even(values: np.ndarray, tol: float = EVEN_TOLERANCE) -> bool:
    scale = max(float(np.max(np.abs(values))), 1.0)
    return float(np.max(np.abs(values - values[::-1]))) <= tol * scale


@dataclass(frozen=True)
class SystemState:
    """Everything computed while evaluating ``T`` at one ``g``."""

    params: Parameters
    g: GridFunction
    hinv_prime: GridFunction
    hinv: GridFunction
    kappa: float
    F: GridFunction
    f: GridFunction
    Tg: GridFunction
    residual_sup: float
    F_mismatch: float = 0.0
    """``|F(0+) - F(0-)|`` of the two one-sided integrations."""

    @property
    def grid(self) -> Grid:
        return self.g.grid

    @property
    def F_prime(self) -> np.ndarray:
        return self.kappa / (self.grid.nodes * self.hinv.values * self.hinv_prime.values)


def eval_hinv_prime(g: GridFunction, params: Parameters) -> GridFunction:
    x = np.abs(g.grid.nodes)
    values = x ** (params.nu - 1.0) * (x * x + 1.0) ** (0.5 * (params.mu - params.nu)) * np.exp(g.values)
    return GridFunction(g.grid, values, zero_exponent=params.nu - 1.0, tail_exponent=1.0 - params.mu)


def eval_hinv(hinv_prime: GridFunction) -> GridFunction:
    """Antiderivative vanishing at ``0`` (odd when ``hinv_prime`` is even)."""
    out = integrate_from_zero(hinv_prime)
    if hinv_prime.tail_exponent is not None:
        out = GridFunction(
            out.grid,
            out.values,
            zero_exponent=out.zero_exponent,
            tail_exponent=hinv_prime.tail_exponent - 1.0,
            error_estimate=out.error_estimate,
        )
    return out


def _F_prime_unscaled(hinv: GridFunction, hinv_prime: GridFunction, params: Parameters) -> GridFunction:
    x = hinv.grid.nodes
    values = 1.0 / (x * hinv.values * hinv_prime.values)
    if not np.all(values > 0):
        raise InconsistentStateError("1/(x h^-1 (h^-1)') must be positive; h^-1 is not increasing")
    return GridFunction(
        hinv.grid,
        values,
        zero_exponent=-2.0 * params.nu,
        tail_exponent=2.0 * params.mu,
    )


def eval_kappa(hinv: GridFunction, hinv_prime: GridFunction, params: Parameters) -> float:
    """``kappa = (mu-nu) pi / int 1/(x h^-1 (h^-1)') dx``."""
    integral = integrate_total_with_tails(_F_prime_unscaled(hinv, hinv_prime, params))
    if not (integral > 0 and math.isfinite(integral)):
        raise InconsistentStateError(f"normalization integral is {integral}, expected positive")
    return params.turning / integral


def _eval_F(kappa: float, hinv: GridFunction, hinv_prime: GridFunction, params: Parameters):
    fp = _F_prime_unscaled(hinv, hinv_prime, params)
    outer_plus, outer_minus = integrate_from_infinity(fp)
    plus = -kappa * outer_plus
    minus = -params.turning + kappa * outer_minus
    if np.any(np.diff(plus) < -MONOTONE_TOLERANCE * params.turning) or np.any(
        np.diff(minus) > MONOTONE_TOLERANCE * params.turning
    ):
        raise NumericalFailureError("F lost monotonicity beyond tolerance")
    # one-sided values at 0 from the inner closures
    p0 = fp.zero_exponent
    first = fp.grid.x_min ** (p0 + 1) / (p0 + 1)
    c_plus, c_minus = zero_coeffs(fp)
    at_zero_plus = plus[0] - kappa * c_plus * first
    at_zero_minus = minus[0] + kappa * c_minus * first
    mismatch = abs(at_zero_plus - at_zero_minus)
    F = GridFunction(hinv.grid, join(plus, minus), zero_exponent=0.0, tail_exponent=0.0)
    return F, float(mismatch)


def eval_F(kappa: float, hinv: GridFunction, hinv_prime: GridFunction, params: Parameters) -> GridFunction:
    """``F`` with ``F(inf) = 0`` and ``F(-inf) = -(mu-nu) pi``, integrated inward from each end."""
    return _eval_F(kappa, hinv, hinv_prime, params)[0]


def remainder(F: GridFunction, params: Parameters) -> GridFunction:
    """``f = F - (mu-nu) arg(x - i)``, which decays at both infinities."""
    x = F.grid.nodes
    values = F.values - (params.mu - params.nu) * branch_angle(x)
    # f is odd exactly when G is even; otherwise f(0) != 0 and is continued as a constant
    p0 = params.zero_exponent_f if _odd(values) else 0.0
    return GridFunction(F.grid, values, zero_exponent=p0, tail_exponent=params.tail_exponent_f)


def _odd(values: np.ndarray) -> bool:
    scale = max(float(np.max(np.abs(values))), 1.0)
    return float(np.max(np.abs(values + values[::-1]))) <= EVEN_TOLERANCE * scale


def outer_decade_sup(g: GridFunction) -> float:
    k = g.grid.points_per_decade
    plus, minus = split(g.values)
    return max(float(np.max(np.abs(plus[-k:]))), float(np.max(np.abs(minus[-k:]))))


def check_admissible(g: GridFunction) -> None:
    """Reject ``g`` that does not (approximately) vanish at both infinities."""
    outer = outer_decade_sup(g)
    if outer > 10.0 * FIT_TOLERANCE:
        raise UnsupportedInputError(
            f"g is not small on the outer decade (max |g| = {outer:.3g}); "
            "T is defined on functions vanishing at infinity"
        )


def apply_T(g: GridFunction, params: Parameters, strict: bool = True) -> SystemState:
    """Evaluate ``T[g]`` and return every intermediate quantity.

    With ``strict`` the input must be small on the outer decade; iterative
    solvers pass ``strict=False`` and judge admissibility of the result.
    """
    if strict:
        check_admissible(g)
    hp = eval_hinv_prime(g, params)
    hinv = eval_hinv(hp)
    kappa = eval_kappa(hinv, hp, params)
    F, mismatch = _eval_F(kappa, hinv, hp, params)
    f = remainder(F, params)
    mat = hilbert_matrix(g.grid, f.zero_exponent, f.tail_exponent)
    Tg = GridFunction(g.grid, mat @ f.values, zero_exponent=0.0)
    residual = float(np.max(np.abs(g.values - Tg.values)))
    return SystemState(params, g, hp, hinv, kappa, F, f, Tg, residual, mismatch)


# {{{ dilation structure


def separation(state: SystemState) -> np.ndarray:
    """``F(x) - F(-x)`` on the positive nodes (ascending)."""
    plus, minus = split(state.F.values)
    return plus - minus


def crest_scale(state: SystemState, xtol: float = 1e-13) -> float | None:
    """The ``x0 > 0`` with ``F(x0) - F(-x0) = (1/2 - nu) pi``, or ``None`` if not on the grid.

    The left side increases from ``0`` to ``(mu - nu) pi``; it is interpolated
    by a quintic spline in ``ln x`` and the root is bracketed and bisected.
    """
    grid = state.grid
    target = (0.5 - state.params.nu) * math.pi
    diff = separation(state) - target
    if not diff[0] < 0 < diff[-1]:
        return None
    spline = make_interp_spline(grid.s, diff, k=5)
    k = int(np.argmax(diff > 0))
    root = bisect(spline, grid.s[k - 1], grid.s[k], xtol=xtol)
    return float(math.exp(root))


def edge_margin(x0: float | None, grid: Grid) -> float:
    """Decades between ``x0`` and the nearer end of the grid (``-inf`` if ``x0`` is missing)."""
    if x0 is None:
        return -math.inf
    return min(math.log10(x0 / grid.x_min), math.log10(grid.x_max / x0))


def dilate(g: GridFunction, c: float, params: Parameters, target: Grid | None = None) -> GridFunction:
    """The member ``g_c`` of the dilation family through ``g``.

    ``g_c(x) = g(cx) + (mu-nu)/2 ln((x^2 + c^-2) / (x^2 + 1))``, i.e.
    ``G_c(x) = G(cx) - (mu-nu) ln c``; ``T`` commutes with this map.  Samples
    are shifted in ``s = ln|x|`` by a quintic spline; past the ends ``g`` is
    continued as a constant near ``0`` and by the decay model at infinity.
    With ``target`` the result is sampled on another grid (``c = 1`` then
    simply transfers ``g``).
    """
    grid = g.grid
    target = grid if target is None else target
    shift = math.log(c)
    t = target.s + shift
    p = params.tail_exponent_f
    out = []
    for half in split(g.values):
        spline = make_interp_spline(grid.s, half, k=5)
        inside = spline(np.clip(t, grid.s[0], grid.s[-1]))
        below = np.full_like(t, half[0])
        above = half[-1] * np.exp(-p * (t - grid.s[-1]))
        out.append(np.where(t < grid.s[0], below, np.where(t > grid.s[-1], above, inside)))
    x = target.half
    correction = 0.5 * (params.mu - params.nu) * np.log((x * x + c**-2) / (x * x + 1.0))
    values = join(out[0] + correction, out[1] + correction)
    if target is grid:
        return g.with_values(values)
    return GridFunction(target, values, g.zero_exponent, g.tail_exponent)


# }}}
