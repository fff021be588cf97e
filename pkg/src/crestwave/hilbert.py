"""Principal-value Hilbert transform ``Hf(x) = (1/pi) p.v. int f(y) / (x - y) dy``.

For a target ``x > 0`` the transform is folded onto the half-line,

    pi Hf(x) = int_0^inf [ (f(y) - f(x)) / (x - y) + (f(-y) - f(x)) / (x + y) ] dy,

which is exact because ``p.v. int_0^inf 2x / (x^2 - y^2) dy = 0``.  In
``s = ln y`` the bracket times ``y`` is smooth (the singularity at ``y = x``
is removable, with limit ``-x f'(x)``) and decays exponentially at both ends,
so the trapezoid rule in ``s`` converges spectrally.  The data is continued
beyond ``[x_min, x_max]`` onto a log-extended auxiliary mesh with the power
models ``C |y|**p0`` and ``C |y|**(-p_inf)``, and what lies beyond that mesh is
added from convergent series.  Targets ``x < 0`` follow from
``Hf(-x) = -H[f(-.)](x)``.

Everything is linear in the samples, so the operator is assembled once per
(grid, exponents) as a dense matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UnsupportedInputError
from .grid import (
    FIT_TOLERANCE,
    Grid,
    GridFunction,
    derivative_matrix,
    fit_tail_coeffs,
    join,
    split,
)

#: decades of model-continued mesh added on each end
EXTENSION_DECADES = 8
#: terms of the closing series (x/X and Y/x are <= 10**-EXTENSION_DECADES)
_SERIES_TERMS = 4


@dataclass(frozen=True)
class TailModel:
    """Power-law decay ``f ~ C+- |x|**(-exponent)`` fitted on the outer decade."""

    exponent: float
    coeff_plus: float
    coeff_minus: float
    residual: float = 0.0
    """Largest deviation of the fitted exponent from ``exponent`` on the outer decade."""

    @classmethod
    def fit(cls, f: GridFunction, exponent: float | None = None) -> TailModel:
        p = f.tail_exponent if exponent is None else exponent
        if p is None:
            raise UnsupportedInputError("no tail exponent given for the tail model")
        c_plus, c_minus = fit_tail_coeffs(f, p)
        residual = 0.0
        grid = f.grid
        k = grid.points_per_decade
        s = grid.s[-k:]
        for half in split(f.values):
            tail = half[-k:]
            if np.all(tail != 0) and np.all(np.sign(tail) == np.sign(tail[-1])):
                slope = -np.polyfit(s, np.log(np.abs(tail)), 1)[0]
                residual = max(residual, abs(slope - p))
        return cls(float(p), c_plus, c_minus, float(residual))

    @property
    def acceptable(self) -> bool:
        return self.residual <= FIT_TOLERANCE


def _power_integral_near_zero(a: float, upper: float, x: np.ndarray, sign: int) -> np.ndarray:
    """``int_0^upper y**a / (x - sign*y) dy`` for ``upper << x`` (series in upper/x)."""
    out = np.zeros_like(x)
    for m in range(_SERIES_TERMS):
        out += sign**m * upper ** (a + m + 1) / ((a + m + 1) * x ** (m + 1))
    return out


def _power_integral_to_infinity(p: float, lower: float, x: np.ndarray, sign: int) -> np.ndarray:
    """``int_lower^inf y**(-p) / (x - sign*y) dy`` for ``x << lower``, without the m=0 term."""
    out = np.zeros_like(x)
    for m in range(1, _SERIES_TERMS):
        out += -(sign**(m + 1)) * x**m * lower ** (-p - m) / (p + m)
    return out


@lru_cache(maxsize=16)
def hilbert_matrix(
    grid: Grid,
    zero_exponent: float = 0.0,
    tail_exponent: float = 1.0,
    decades: int = EXTENSION_DECADES,
) -> np.ndarray:
    """Dense matrix of the Hilbert transform on ``grid`` (full node ordering).

    ``zero_exponent`` and ``tail_exponent`` select the power models used to
    continue the data past the innermost and outermost nodes.  A tail exponent
    of ``0`` is accepted only for the symmetric-truncation check of constants:
    the divergent leading tail terms are then dropped, which is exact when the
    two tails are equal.
    """
    if tail_exponent < 0:
        raise UnsupportedInputError(f"tail exponent {tail_exponent} < 0: input does not decay")
    n, h = grid.n_half, grid.h
    x = grid.half
    ext = int(round(decades * math.log(10) / h))
    n_ext = n + 2 * ext
    y = np.exp(math.log(grid.x_min) + h * (np.arange(n_ext) - ext))
    lower, upper = float(y[0]), float(y[-1])

    # continuation of one half-line's samples onto the extended mesh
    cont = np.zeros((n_ext, n))
    cont[ext : ext + n] = np.eye(n)
    cont[:ext, 0] = (y[:ext] / grid.x_min) ** zero_exponent
    cont[ext + n :, -1] = (y[ext + n :] / grid.x_max) ** (-tail_exponent)

    w = np.full(n_ext, h)
    w[0] = w[-1] = 0.5 * h
    wy = w * y

    rows = np.arange(n) + ext
    diff = x[:, None] - y[None, :]
    diff[np.arange(n), rows] = 1.0
    kern_a = wy[None, :] / diff
    kern_a[np.arange(n), rows] = 0.0
    kern_b = wy[None, :] / (x[:, None] + y[None, :])

    # coefficients on the extended samples of f(+y) and f(-y)
    on_plus = kern_a.copy()
    on_minus = kern_b.copy()
    # removable point y = x of the first term: value -x f'(x) = -df/ds
    d_ext = derivative_matrix(n_ext) / h
    on_plus -= w[rows][:, None] * d_ext[rows]
    # the subtracted f(x) terms and the analytic p.v. pieces outside [lower, upper]
    self_coeff = -(kern_a.sum(axis=1) + kern_b.sum(axis=1))
    self_coeff += np.log((upper + x) / (upper - x)) - np.log((x + lower) / (x - lower))

    mat_plus = on_plus @ cont
    mat_minus = on_minus @ cont
    mat_plus[np.arange(n), np.arange(n)] += self_coeff

    # closures: int_0^lower and int_upper^inf of f(+-y) against 1/(x -+ y)
    near_plus = _power_integral_near_zero(zero_exponent, lower, x, +1)
    near_minus = _power_integral_near_zero(zero_exponent, lower, x, -1)
    scale0 = grid.x_min ** (-zero_exponent)
    mat_plus[:, 0] += near_plus * scale0
    mat_minus[:, 0] += near_minus * scale0

    far_plus = _power_integral_to_infinity(tail_exponent, lower=upper, x=x, sign=+1)
    far_minus = _power_integral_to_infinity(tail_exponent, lower=upper, x=x, sign=-1)
    if tail_exponent > 0:
        lead = upper ** (-tail_exponent) / tail_exponent
        far_plus = far_plus - lead
        far_minus = far_minus + lead
    scale_inf = grid.x_max**tail_exponent
    mat_plus[:, -1] += far_plus * scale_inf
    mat_minus[:, -1] += far_minus * scale_inf

    # assemble in full ordering: columns [minus reversed | plus]
    pos_rows = np.hstack([mat_minus[:, ::-1], mat_plus]) / math.pi
    neg_rows = -pos_rows[:, ::-1]
    full = np.vstack([neg_rows[::-1], pos_rows])
    full.setflags(write=False)
    return full


def hilbert_transform(f: GridFunction, tail: TailModel | None = None) -> GridFunction:
    """Hilbert transform of a real function decaying at both infinities.

    The tail exponent comes from ``tail`` (or ``f.tail_exponent``); the
    continuation coefficients are anchored at ``+-x_max`` so the operator stays
    linear in the samples.  ``f.zero_exponent`` (default ``0``) selects the
    model near the origin.
    """
    p = tail.exponent if tail is not None else f.tail_exponent
    if p is None or p <= 0:
        raise UnsupportedInputError(
            f"hilbert_transform needs a decaying input (tail exponent > 0), got {p}"
        )
    if np.iscomplexobj(f.values):
        raise UnsupportedInputError("hilbert_transform expects real samples")
    p0 = 0.0 if f.zero_exponent is None else float(f.zero_exponent)
    mat = hilbert_matrix(f.grid, p0, float(p))
    return GridFunction(f.grid, mat @ f.values)


def check_H1_zero(grid: Grid, constant: float = 1.0) -> float:
    """``max |H[constant]|`` over the nodes with symmetric truncation at infinity."""
    mat = hilbert_matrix(grid, 0.0, 0.0)
    return float(np.max(np.abs(mat @ np.full(grid.size, float(constant)))))


__all__ = [
    "TailModel",
    "check_H1_zero",
    "hilbert_matrix",
    "hilbert_transform",
    "join",
]
