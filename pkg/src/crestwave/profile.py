"""Physical wave reconstructed from a solution of the fixed-point system.

The similarity variable ``beta = alpha / t`` is arclength along the interface.
Its nodes are the images ``beta_j = h^-1(x_j)`` of the x-grid, so every
beta-derivative is a pushforward of an x-derivative: ``d/dbeta = (1/(h^-1)')
d/dx``.  On that grid:

* phase ``b = F + C`` (``C`` fixes the normalization) and tangent angle
  ``psi = b + phi chi`` with ``chi`` the indicator of ``beta > 0``;
* interface ``zeta(beta) = int_0^beta e^{i psi}``, with ``zeta(0) = 0``;
* Taylor coefficient ``a = beta^2 b'``, velocity ``W = zeta - beta zeta'``
  (evaluated as ``-i int_0^beta gamma b' zeta'``) and acceleration
  ``U = i a zeta'``.

The space-time fields are ``Z(alpha, t) = t zeta(alpha/t)``,
``Z_t = W(alpha/t)`` and ``A = a(alpha/t) / t``.

Solutions come in a dilation family, and dilating ``g`` rescales the wave
(``zeta -> lam zeta(beta / lam)``).  The arclength unit is therefore a free
choice; by default it is fixed so that the crest scale ``x0`` (where
``F(x0) - F(-x0) = (1/2 - nu) pi``) sits at ``beta = 1``, which puts the
crossover between the corner regime and the far field near ``|beta| = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from .errors import InversionError, ParameterError, WindowError
from .grid import (
    Grid,
    GridFunction,
    integrate_from_zero,
    join,
    log_derivative,
    split,
)
from .grid import build_grid
from .system import Parameters, SystemState, crest_scale

NORMALIZATIONS = ("symmetric", "asymptotic")

INNER_WINDOW = (1e-3, 1e-1)
OUTER_WINDOW = (1e1, 1e3)
INNER_WINDOW_DECADES = 3.0
OUTER_WINDOW_DECADES = math.log10(2 * OUTER_WINDOW[1])


@dataclass(frozen=True, eq=False)
class WaveProfile:
    """Interface, phase and velocity sampled at ``beta_j = h^-1(x_j)``.

    Arrays follow the node order of the underlying x-grid (negative half
    first).  ``zeta_prime`` is stored as the unit phase ``e^{i psi}``.
    """

    params: Parameters
    grid: Grid
    normalization: str
    kappa: float
    """``scale**2`` times the system's kappa (the pure-imaginary identity's constant in these units)."""
    beta: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    b_prime: np.ndarray = field(repr=False)
    zeta: np.ndarray = field(repr=False)
    zeta_prime: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    hinv_prime: np.ndarray = field(repr=False)
    scale: float = 1.0
    """Factor applied to ``h^-1`` to obtain ``beta``."""
    b_zero: float = 0.0
    """``b(0)``; the tangent angle is ``b(0)`` just left of the crest and ``b(0) + phi`` just right."""
    b_plus_inf: float = 0.0
    b_minus_inf: float = 0.0

    @property
    def phi(self) -> float:
        return self.params.phi

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def psi(self) -> np.ndarray:
        return np.angle(self.zeta_prime)

    @property
    def corner_tangents(self) -> tuple[float, float]:
        """Tangent angles just left and just right of the crest."""
        return self.b_zero, self.b_zero + self.phi

    @property
    def interior_angle(self) -> float:
        """Angle between the two branches at the crest, seen from the fluid."""
        left, right = self.corner_tangents
        return math.pi - (left - right)

    @property
    def total_turning(self) -> float:
        return self.b_plus_inf - self.b_minus_inf

    def d_dbeta(self, values: np.ndarray, order: int = 1) -> np.ndarray:
        """Derivative along the profile via ``d/dbeta = (1/(x (h^-1)')) d/ds``."""
        out = np.asarray(values)
        scale = self.x * self.hinv_prime
        for _ in range(order):
            out = _log_derivative_complex(out, self.grid) / scale
        return out

    @cached_property
    def b_second(self) -> np.ndarray:
        return self.d_dbeta(self.b_prime)


def _log_derivative_complex(values: np.ndarray, grid: Grid) -> np.ndarray:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return log_derivative(values.real, grid) + 1j * log_derivative(values.imag, grid)
    return log_derivative(values, grid)


def crest_unit(state: SystemState) -> float:
    """``1 / h^-1(x0)``: the arclength factor that puts the crest scale at ``beta = 1``."""
    x0 = crest_scale(state)
    if x0 is None:
        raise InversionError("crest scale x0 is not on the grid; pass an explicit scale")
    spline = make_interp_spline(state.grid.s, np.log(split(state.hinv.values)[0]), k=5)
    return float(math.exp(-spline(math.log(x0))))


def reconstruct_profile(
    state: SystemState,
    params: Parameters | None = None,
    normalization: str = "symmetric",
    scale: float | str = "crest",
) -> WaveProfile:
    """Build ``(zeta, b, a, W, U)`` from a solved state.

    ``beta = scale * h^-1(x)``; ``scale="crest"`` uses :func:`crest_unit`.
    """
    params = params or state.params
    if normalization not in NORMALIZATIONS:
        raise ParameterError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    if scale == "crest":
        scale = crest_unit(state)
    elif isinstance(scale, str) or not scale > 0:
        raise ParameterError(f"scale must be 'crest' or a positive number, got {scale!r}")
    scale = float(scale)
    grid = state.grid
    beta = scale * state.hinv.values
    plus, minus = split(beta)
    if not (np.all(np.diff(plus) > 0) and np.all(np.diff(minus) < 0) and plus[0] > 0 > minus[0]):
        raise InversionError("h^-1 is not strictly increasing; cannot invert for h")

    F_plus, F_minus = split(state.F.values)
    # one-sided limits of F at 0 from the inner power model of F'
    fp = state.F_prime
    p0 = 1.0 - 2.0 * params.nu
    fp_plus, fp_minus = split(fp)
    F0_plus = F_plus[0] - fp_plus[0] * grid.x_min / p0
    F0_minus = F_minus[0] + fp_minus[0] * grid.x_min / p0
    F0 = 0.5 * (F0_plus + F0_minus)
    if normalization == "symmetric":
        shift = 0.5 * (1.0 - params.nu) * math.pi - F0
    else:
        shift = 0.0
    b = state.F.values + shift

    x = grid.nodes
    chi = (x > 0).astype(float)
    psi = b + params.phi * chi
    zeta_prime = np.exp(1j * psi)

    speed = scale * state.hinv_prime.values
    integrand_re = GridFunction(grid, speed * zeta_prime.real, zero_exponent=params.nu - 1.0)
    integrand_im = GridFunction(grid, speed * zeta_prime.imag, zero_exponent=params.nu - 1.0)
    zeta = integrate_from_zero(integrand_re).values + 1j * integrate_from_zero(integrand_im).values

    b_prime = fp / speed
    a = beta**2 * b_prime
    # W = zeta - beta zeta' = -i int_0^beta gamma b' zeta' dgamma; the integral
    # form avoids the cancellation of two O(beta) terms near the crest
    w_integrand = beta * fp * zeta_prime
    p_w = -params.nu
    W = -1j * (
        integrate_from_zero(GridFunction(grid, w_integrand.real, zero_exponent=p_w)).values
        + 1j * integrate_from_zero(GridFunction(grid, w_integrand.imag, zero_exponent=p_w)).values
    )
    U = 1j * a * zeta_prime
    return WaveProfile(
        params=params,
        grid=grid,
        normalization=normalization,
        kappa=scale**2 * state.kappa,
        beta=beta,
        b=b,
        b_prime=b_prime,
        zeta=zeta,
        zeta_prime=zeta_prime,
        a=a,
        W=W,
        U=U,
        hinv_prime=speed,
        scale=scale,
        b_zero=F0 + shift,
        b_plus_inf=shift,
        b_minus_inf=shift - params.turning,
    )


def window_grid(params: Parameters, points_per_decade: int = 16, margin: float = 1.5) -> Grid:
    """x-grid whose image covers ``|beta|`` in ``[1e-3, 2e3]`` (crest units) with margin.

    Near the crest ``beta ~ x**nu`` and far away ``beta ~ x**mu``, so the
    inner window needs about ``3 / nu`` decades below ``x0 = 1`` and the outer
    one ``3.3 / mu`` above it.
    """
    lo = -(INNER_WINDOW_DECADES / params.nu + margin / params.nu)
    hi = OUTER_WINDOW_DECADES / params.mu + margin / params.mu
    return build_grid(10.0 ** math.floor(lo), 10.0 ** math.ceil(max(hi, 4.0)), points_per_decade)


# {{{ evaluation off the nodes


class _HalfSpline:
    """Quintic spline in ``ln|beta|`` on one half-line."""

    def __init__(self, beta_abs: np.ndarray, values: np.ndarray) -> None:
        self.u = np.log(beta_abs)
        self.lo, self.hi = float(beta_abs[0]), float(beta_abs[-1])
        self.spline = make_interp_spline(self.u, values, k=5)

    def __call__(self, beta_abs: np.ndarray) -> np.ndarray:
        return self.spline(np.log(beta_abs))


@dataclass(frozen=True, eq=False)
class SelfSimilarWave:
    """``Z(alpha, t) = t zeta(alpha/t)`` and friends, evaluable anywhere with ``t > 0``.

    Inside the sampled range the profile is interpolated by quintic splines in
    ``ln|beta|``.  Outside it the interface continues along its end tangents
    (a straight corner near ``beta = 0`` and the asymptotic directions far
    away), ``a`` follows its power laws ``|beta|**(1/nu - 1)`` and
    ``|beta|**(1/mu - 1)``, and ``W`` is continued consistently with both.
    """

    profile: WaveProfile

    @cached_property
    def _splines(self) -> dict:
        p = self.profile
        out = {}
        for side, idx in (("plus", split(np.arange(p.grid.size))[0]), ("minus", split(np.arange(p.grid.size))[1])):
            babs = np.abs(p.beta[idx])
            out[side] = {
                "zeta_re": _HalfSpline(babs, p.zeta[idx].real),
                "zeta_im": _HalfSpline(babs, p.zeta[idx].imag),
                "log_a": _HalfSpline(babs, np.log(p.a[idx])),
                "psi": _HalfSpline(babs, np.unwrap(np.angle(p.zeta_prime[idx]))),
                "ends": (babs[0], babs[-1], idx[0], idx[-1]),
            }
        return out

    def _side(self, beta: float) -> dict:
        return self._splines["plus" if beta > 0 else "minus"]

    def zeta(self, beta: float) -> complex:
        return complex(self._eval(beta)[0])

    def zeta_prime(self, beta: float) -> complex:
        return complex(self._eval(beta)[1])

    def a(self, beta: float) -> float:
        return float(self._eval(beta)[2])

    def W(self, beta: float) -> complex:
        z, zp, _ = self._eval(beta)
        return complex(z - beta * zp)

    def _eval(self, beta: float):
        """``(zeta, zeta', a)`` at one value of ``beta``."""
        beta = float(beta)
        if beta == 0.0:
            return 0.0j, complex(np.exp(1j * self.profile.b_zero)), 0.0
        p = self.profile
        side = self._side(beta)
        lo, hi, i_lo, i_hi = side["ends"]
        sign = 1.0 if beta > 0 else -1.0
        babs = abs(beta)
        nu, mu = p.params.nu, p.params.mu
        if babs < lo:
            zp = p.zeta_prime[i_lo]
            z = p.zeta[i_lo] * (babs / lo)
            a = p.a[i_lo] * (babs / lo) ** (1.0 / nu - 1.0)
            return z, zp, a
        if babs > hi:
            zp = p.zeta_prime[i_hi]
            z = p.zeta[i_hi] + sign * (babs - hi) * zp
            a = p.a[i_hi] * (babs / hi) ** (1.0 / mu - 1.0)
            return z, zp, a
        z = side["zeta_re"](babs) + 1j * side["zeta_im"](babs)
        zp = np.exp(1j * side["psi"](babs))
        a = np.exp(side["log_a"](babs))
        return complex(z), complex(zp), float(a)

    def Z(self, alpha: float, t: float) -> complex:
        _check_time(t)
        return t * self.zeta(alpha / t)

    def A(self, alpha: float, t: float) -> float:
        _check_time(t)
        return self.a(alpha / t) / t


def _check_time(t: float) -> None:
    if not t > 0:
        raise ParameterError(f"the self-similar fields are defined for t > 0, got t={t}")


def evaluate_spacetime(wave: SelfSimilarWave, alpha: float, t: float) -> tuple[complex, complex, float]:
    """``(Z, Z_t, A)`` at ``(alpha, t)``: ``(t zeta(beta), W(beta), a(beta)/t)`` with ``beta = alpha/t``."""
    _check_time(t)
    beta = alpha / t
    z, zp, a = wave._eval(beta)
    return complex(t * z), complex(z - beta * zp), float(a / t)


# }}}


# {{{ equation residuals


def pde_residual(wave: SelfSimilarWave, samples, step: float) -> float:
    """``sup |Z_tt - i A Z_alpha| / sup |Z_tt|`` with centered differences of size ``step``."""
    num = 0.0
    den = 0.0
    for alpha, t in samples:
        z0 = wave.Z(alpha, t)
        ztt = (wave.Z(alpha, t + step) - 2.0 * z0 + wave.Z(alpha, t - step)) / step**2
        za = (wave.Z(alpha + step, t) - wave.Z(alpha - step, t)) / (2.0 * step)
        num = max(num, abs(ztt - 1j * wave.A(alpha, t) * za))
        den = max(den, abs(ztt))
    return num / den


def beta_form_residual(profile: WaveProfile) -> float:
    """``sup |beta^2 zeta'' - i a zeta'|`` on the nodes, with ``zeta''`` differentiated numerically."""
    zeta_second = profile.d_dbeta(profile.zeta_prime)
    return float(np.max(np.abs(profile.beta**2 * zeta_second - 1j * profile.a * profile.zeta_prime)))


DEFAULT_PDE_SAMPLES = tuple(
    (alpha, t) for t in (0.5, 1.0, 2.0) for alpha in (-3.0, -1.0, -0.3, 0.3, 1.0, 3.0)
)


@dataclass(frozen=True)
class PDEResidualReport:
    residual: float
    """Relative residual at the requested step."""
    steps: tuple[float, ...]
    residuals: tuple[float, ...]
    observed_order: float
    """Mean ``log2`` ratio over the step-halving sequence."""
    beta_form: float


def check_pde_residual(
    wave: SelfSimilarWave,
    samples=DEFAULT_PDE_SAMPLES,
    step: float = 1e-4,
    refinement_steps: tuple[float, ...] = (4e-2, 2e-2, 1e-2),
) -> PDEResidualReport:
    """Residual of ``Z_tt = i A Z_alpha`` and of ``beta^2 zeta'' = i a zeta'``.

    The order of the finite differences is observed on ``refinement_steps``
    (large enough that truncation error dominates interpolation error).
    """
    res = pde_residual(wave, samples, step)
    seq = tuple(pde_residual(wave, samples, k) for k in refinement_steps)
    ratios = [math.log2(a / b) / math.log2(ka / kb) for a, b, ka, kb in zip(seq, seq[1:], refinement_steps, refinement_steps[1:])]
    return PDEResidualReport(res, tuple(refinement_steps), seq, float(np.mean(ratios)), beta_form_residual(wave.profile))


def check_pure_imaginary_identity(state: SystemState, profile: WaveProfile) -> tuple[float, float]:
    """``x (conj(W) o h^-1)' (zeta o h^-1)'`` against ``i kappa``.

    ``W`` and ``zeta`` are differentiated numerically as functions of ``x``;
    returns ``(sup |E - i kappa| / kappa, sup |Re E| / kappa)`` with kappa in
    the profile's arclength units.
    """
    grid = state.grid
    x = grid.nodes
    dW = _log_derivative_complex(np.conj(profile.W), grid)
    dz = _log_derivative_complex(profile.zeta, grid)
    expr = dW * dz / x
    kappa = profile.kappa
    return float(np.max(np.abs(expr - 1j * kappa)) / kappa), float(np.max(np.abs(expr.real)) / kappa)


# }}}


# {{{ asymptotics


def _window_slope(beta: np.ndarray, values: np.ndarray, window: tuple[float, float]) -> float:
    lo, hi = window
    mask = (beta >= lo) & (beta <= hi)
    if beta.size == 0 or beta[0] > lo * 1.0001 or beta[-1] < hi * 0.9999 or mask.sum() < 4:
        raise WindowError(
            f"profile covers |beta| in [{beta[0]:.3g}, {beta[-1]:.3g}], window [{lo:g}, {hi:g}] is not covered"
        )
    return float(np.polyfit(np.log(beta[mask]), np.log(np.abs(values[mask])), 1)[0])


@dataclass(frozen=True)
class ExponentFit:
    name: str
    window: tuple[float, float]
    fitted: float
    predicted: float

    @property
    def error(self) -> float:
        """Relative deviation (absolute when the prediction is 0)."""
        diff = abs(self.fitted - self.predicted)
        return diff / abs(self.predicted) if self.predicted != 0 else diff


def asymptotic_exponents(
    profile: WaveProfile,
    params: Parameters | None = None,
    inner: tuple[float, float] = INNER_WINDOW,
    outer: tuple[float, float] = OUTER_WINDOW,
) -> dict[str, ExponentFit]:
    """Log-log slopes of ``b'``, ``|b''|``, ``h`` and ``b(inf) - b`` on the positive side."""
    params = params or profile.params
    nu, mu = params.nu, params.mu
    beta = split(profile.beta)[0]
    bp = split(profile.b_prime)[0]
    bpp = split(profile.b_second)[0]
    h = profile.grid.half
    decay = profile.b_plus_inf - split(profile.b)[0]
    fits = [
        ("b_prime_inner", inner, bp, 1 / nu - 3),
        ("b_prime_outer", outer, bp, 1 / mu - 3),
        ("b_second_inner", inner, bpp, 1 / nu - 4),
        ("b_second_outer", outer, bpp, 1 / mu - 4),
        ("h_inner", inner, h, 1 / nu),
        ("h_outer", outer, h, 1 / mu),
        ("b_decay_outer", outer, decay, 1 / mu - 2),
    ]
    return {name: ExponentFit(name, win, _window_slope(beta, vals, win), pred) for name, win, vals, pred in fits}


def limiting_velocity_direction(params: Parameters) -> float:
    """Argument of ``-i e^{i (mu - 1) pi / 2}`` (symmetric normalization)."""
    return float(np.angle(-1j * np.exp(0.5j * (params.mu - 1.0) * math.pi)))


@dataclass(frozen=True)
class VelocityReport:
    regime: str
    """``growing`` (mu < 1), ``logarithmic`` (mu = 1) or ``bounded`` (mu > 1)."""
    direction_error_deg: float
    increment_exponent: float
    """Fitted exponent of ``|W(2 beta) - W(beta)|`` over the outer window."""
    predicted_increment_exponent: float
    regime_ok: bool
    details: dict


def velocity_asymptotics(
    profile: WaveProfile,
    params: Parameters | None = None,
    window: tuple[float, float] = OUTER_WINDOW,
) -> VelocityReport:
    """Far-field behaviour of ``W`` on ``beta > 0``.

    Dyadic increments ``W(2 beta) - W(beta)`` isolate the growth: they scale
    like ``beta**(1/mu - 1)`` and their direction tends to
    ``-i e^{i (mu-1) pi/2}``, measured on ``W(2 hi) - W(hi)`` at the end
    of the window.  ``mu < 1``: growth exponent within 10%;
    ``mu = 1``: real increments vanish while imaginary increments settle at a
    negative constant (logarithmic growth); ``mu > 1``: increments decay and
    ``sup |W|`` is stable when the range doubles.
    """
    params = params or profile.params
    if profile.normalization != "symmetric":
        raise ParameterError("velocity directions refer to the symmetric normalization")
    wave = SelfSimilarWave(profile)
    lo, hi = window
    beta_plus = split(profile.beta)[0]
    if beta_plus[-1] < 2 * hi:
        raise WindowError(f"profile reaches beta = {beta_plus[-1]:.3g}; need at least {2 * hi:g}")
    betas = np.geomspace(lo, hi, 25)
    inc = np.array([wave.W(2 * b) - wave.W(b) for b in betas])
    slope = float(np.polyfit(np.log(betas), np.log(np.abs(inc)), 1)[0])
    predicted = 1.0 / params.mu - 1.0
    # direction of the increment at the end of the window, well inside the grid
    last = wave.W(2 * hi) - wave.W(hi)
    target = limiting_velocity_direction(params)
    err = abs((np.angle(last) - target + math.pi) % (2 * math.pi) - math.pi)
    details: dict = {}
    if params.mu < 1.0:
        regime = "growing"
        ok = abs(slope - predicted) <= 0.1 * abs(predicted)
    elif params.mu == 1.0:
        regime = "logarithmic"
        re_inc = np.abs(inc.real)
        im_inc = inc.imag
        details = {"max_real_increment": float(re_inc[-1]), "imag_increment_spread": float(np.ptp(im_inc[-8:]) / abs(im_inc[-1]))}
        ok = bool(np.all(im_inc < 0) and re_inc[-1] < 0.05 * abs(im_inc[-1]) and details["imag_increment_spread"] < 0.1)
    else:
        regime = "bounded"
        w_half = np.max(np.abs(profile.W[(profile.beta > 0) & (profile.beta <= hi)]))
        w_full = np.max(np.abs(profile.W[(profile.beta > 0) & (profile.beta <= 2 * hi)]))
        details = {"sup_W_half_range": float(w_half), "sup_W_full_range": float(w_full)}
        ok = bool(slope < 0 and abs(w_full - w_half) <= 0.01 * w_full)
    return VelocityReport(regime, math.degrees(err), slope, predicted, bool(ok), details)


# }}}


# {{{ surface tension


@dataclass(frozen=True)
class CrossoverReport:
    sigma: float
    times: tuple[float, ...]
    crossover_alpha: tuple[float, ...]
    exponent: float
    """Fitted slope of ``ln alpha_c`` against ``ln t`` (2/3 expected)."""


def tension_ratio(profile: WaveProfile, sigma: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``alpha`` and ``|sigma zeta' t^-2 b''| / |Z_tt|`` on the positive nodes.

    ``|Z_tt| = |U| / t = a / t``, so the ratio is ``sigma |b''| / (t a)``.
    """
    _check_time(t)
    beta = split(profile.beta)[0]
    bpp = split(profile.b_second)[0]
    a = split(profile.a)[0]
    return t * beta, sigma * np.abs(bpp) / (t * a)


def surface_tension_crossover(profile: WaveProfile, sigma: float, t: float) -> float:
    """Largest ``alpha > 0`` where the tension/acceleration ratio equals 1."""
    alpha, ratio = tension_ratio(profile, sigma, t)
    if sigma == 0:
        return 0.0
    lr = np.log(ratio)
    above = np.nonzero(lr > 0)[0]
    if above.size == 0 or above[-1] == lr.size - 1:
        raise WindowError(f"no crossover of the tension ratio inside the profile at t={t:g}")
    k = above[-1]
    u = np.log(alpha)
    spline = make_interp_spline(u, lr, k=5)
    return float(math.exp(brentq(spline, u[k], u[k + 1], xtol=1e-14)))


def surface_tension_diagnostic(
    wave: SelfSimilarWave | WaveProfile, sigma: float, times=(1e-3, 1e-4, 1e-5, 1e-6)
) -> CrossoverReport:
    """Crossover scale of surface tension against time and its power law in ``t``."""
    profile = wave.profile if isinstance(wave, SelfSimilarWave) else wave
    if sigma < 0:
        raise ParameterError("sigma must be non-negative")
    times = tuple(float(t) for t in times)
    alphas = tuple(surface_tension_crossover(profile, sigma, t) for t in times)
    if sigma == 0:
        return CrossoverReport(sigma, times, alphas, float("nan"))
    slope = float(np.polyfit(np.log(times), np.log(alphas), 1)[0])
    return CrossoverReport(float(sigma), times, alphas, slope)


# }}}


class _AllExponents:
    """Every ``s``: the similarity laws place no restriction."""

    def __contains__(self, item) -> bool:
        return True

    def __repr__(self) -> str:
        return "ALL_EXPONENTS"


ALL_EXPONENTS = _AllExponents()


def similarity_law_s(gravity_on: bool, tension_on: bool):
    """Exponents ``s`` for which the rescaling ``Z -> lambda^-1 Z(lambda alpha, lambda^s t)`` is a symmetry.

    Without gravity or surface tension every ``s`` works; gravity alone
    forces ``s = 1/2``, surface tension alone ``s = 3/2``; with both there is
    none.
    """
    if gravity_on and tension_on:
        return frozenset()
    if gravity_on:
        return frozenset({0.5})
    if tension_on:
        return frozenset({1.5})
    return ALL_EXPONENTS


def solve_on_window_grid(report, points_per_decade: int = 16):
    """Re-solve a critical-curve solution on :func:`window_grid`, starting from ``report``."""
    from .solver import solve_critical

    params = report.params
    return solve_critical(
        params.mu, window_grid(params, points_per_decade), nu_guess=params.nu, g0=report.g
    )
