"""Symmetric log-graded meshes on the real line and power-law aware quadrature.

Every function handled by the solver behaves like a pure power of |x| at both
ends of the real line, so the mesh is geometric on ``[x_min, x_max]`` (uniform
in ``s = ln|x|``) and mirrored onto the negative axis.  Integrals over the
resolved range use high-order Newton-Cotes rules in ``s``; the pieces
``[0, x_min]`` and ``[x_max, inf)`` are closed analytically from fitted power
laws.

Values of a grid function are stored for the full node vector, negative half
first (ascending ``x``).  Internally most routines work with the two halves
indexed by ``|x|`` ascending, see :func:`split` and :func:`join`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import DivergentTailError, NonIntegrableSingularityError, ParameterError

#: stencil sizes of the cell-integration and differentiation rules
CELL_STENCIL = 8
DIFF_STENCIL = 9

#: exponent fit tolerance used to validate GridFunction metadata
FIT_TOLERANCE = 0.05


# {{{ stencils


def stencil_weights(offsets: np.ndarray, moments: np.ndarray) -> np.ndarray:
    """Weights ``w`` with ``sum_j w_j z_j**p == moments[p]`` for each power ``p``."""
    z = np.asarray(offsets, dtype=float)
    vander = np.vander(z, len(z), increasing=True).T
    return np.linalg.solve(vander, moments)


def fd_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    m = len(offsets)
    moments = np.zeros(m)
    moments[order] = math.factorial(order)
    return stencil_weights(offsets, moments)


@lru_cache(maxsize=32)
def cumulative_matrix(n: int, stencil: int = CELL_STENCIL) -> np.ndarray:
    """Matrix ``C`` with ``(C @ phi)[k] ~ int_0^k phi(u) du`` on unit-spaced nodes.

    Each cell ``[k, k+1]`` is integrated exactly for polynomials of degree
    ``stencil - 1`` using the ``stencil`` nearest nodes (shifted at the ends).
    """
    if n < stencil:
        raise ParameterError(f"need at least {stencil} nodes per half-line, got {n}")
    moments = np.array([1.0 / (p + 1) for p in range(stencil)])
    cells = np.zeros((n - 1, n))
    half = stencil // 2 - 1
    for k in range(n - 1):
        j0 = min(max(k - half, 0), n - stencil)
        offsets = np.arange(j0, j0 + stencil) - k
        cells[k, j0 : j0 + stencil] = stencil_weights(offsets, moments)
    out = np.zeros((n, n))
    out[1:] = np.cumsum(cells, axis=0)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def derivative_matrix(n: int, order: int = 1, stencil: int = DIFF_STENCIL) -> np.ndarray:
    """Finite-difference matrix for ``d^order/du^order`` on unit-spaced nodes."""
    if n < stencil:
        raise ParameterError(f"need at least {stencil} nodes per half-line, got {n}")
    out = np.zeros((n, n))
    half = stencil // 2
    for k in range(n):
        j0 = min(max(k - half, 0), n - stencil)
        offsets = np.arange(j0, j0 + stencil) - k
        out[k, j0 : j0 + stencil] = fd_weights(offsets, order)
    out.setflags(write=False)
    return out


# }}}


# {{{ grid


@dataclass(frozen=True, eq=False)
class Grid:
    """Sign-symmetric geometric mesh; ``0`` is a cell boundary, not a node."""

    x_min: float
    x_max: float
    points_per_decade: int
    half: np.ndarray = field(repr=False)
    """Positive nodes, ascending."""
    h: float
    """Uniform spacing in ``s = ln|x|``."""

    @property
    def n_half(self) -> int:
        return self.half.size

    @property
    def size(self) -> int:
        return 2 * self.half.size

    @property
    def nodes(self) -> np.ndarray:
        return join(self.half, -self.half)

    @property
    def s(self) -> np.ndarray:
        return np.log(self.half)

    @property
    def inner_cutoff(self) -> float:
        return float(self.half[0])

    @property
    def outer_cutoff(self) -> float:
        return float(self.half[-1])

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights for ``int_{x_min<|x|<x_max} f dx`` per node."""
        w = self.h * self.half * cumulative_matrix(self.n_half)[-1]
        return join(w, w)

    def spec(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "points_per_decade": self.points_per_decade,
        }


def build_grid(x_min: float = 1e-6, x_max: float = 1e6, points_per_decade: int = 32) -> Grid:
    """Geometric mesh on ``[x_min, x_max]`` mirrored to the negative axis.

    The positive half holds ``points_per_decade * log10(x_max / x_min)`` nodes
    (rounded), both endpoints included.
    """
    if not (np.isfinite(x_min) and np.isfinite(x_max)):
        raise ParameterError("grid bounds must be finite")
    if not 0 < x_min < 1 < x_max:
        raise ParameterError(f"need 0 < x_min < 1 < x_max, got x_min={x_min}, x_max={x_max}")
    if int(points_per_decade) != points_per_decade or points_per_decade < 16:
        raise ParameterError(f"points_per_decade must be an integer >= 16, got {points_per_decade}")
    if x_max / x_min < 1e4 * (1 - 1e-12):
        raise ParameterError("x_max / x_min must be at least 1e4")
    n = int(round(points_per_decade * math.log10(x_max / x_min)))
    half = np.geomspace(x_min, x_max, n)
    half[0], half[-1] = x_min, x_max
    h = math.log(x_max / x_min) / (n - 1)
    half.setflags(write=False)
    return Grid(float(x_min), float(x_max), int(points_per_decade), half, h)


def split(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full node vector -> (values at +x_k, values at -x_k), both by ascending |x|."""
    values = np.asarray(values)
    n = values.shape[0] // 2
    return values[n:], values[:n][::-1]


def join(plus: np.ndarray, minus: np.ndarray) -> np.ndarray:
    return np.concatenate([np.asarray(minus)[::-1], np.asarray(plus)])


def mirror(values: np.ndarray) -> np.ndarray:
    """Values of ``x -> f(-x)`` on the same grid."""
    return np.asarray(values)[::-1]


# }}}


# {{{ grid functions


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on a :class:`Grid` with power-law metadata at ``0`` and ``+-inf``.

    ``zero_exponent`` is ``p0`` with ``f ~ C |x|**p0`` as ``x -> 0``;
    ``tail_exponent`` is ``p_inf`` with ``f ~ C+- |x|**(-p_inf)`` as
    ``x -> +-inf`` (negative values describe growth).
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    zero_exponent: float | None = None
    tail_exponent: float | None = None
    tail_coeffs: tuple[float, float] | None = None
    error_estimate: float | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.shape != (self.grid.size,):
            raise ParameterError(
                f"expected {self.grid.size} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterError("grid function values must be finite at every node")
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def plus(self) -> np.ndarray:
        return split(self.values)[0]

    @property
    def minus(self) -> np.ndarray:
        return split(self.values)[1]

    def with_values(self, values: np.ndarray, **changes) -> GridFunction:
        return replace(self, values=np.asarray(values), error_estimate=None, **changes)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def fitted_exponents(self) -> dict[str, float]:
        return fit_exponents(self)

    def metadata_consistent(self, tol: float = FIT_TOLERANCE) -> bool:
        """Check stored exponents against log-log fits on the end decades."""
        fit = fit_exponents(self)
        ok = True
        if self.zero_exponent is not None:
            ok &= all(
                abs(fit[k] - self.zero_exponent) <= tol
                for k in ("zero_plus", "zero_minus")
                if np.isfinite(fit[k])
            )
        if self.tail_exponent is not None:
            ok &= all(
                abs(fit[k] - self.tail_exponent) <= tol
                for k in ("tail_plus", "tail_minus")
                if np.isfinite(fit[k])
            )
        return bool(ok)


def grid_function(grid: Grid, func, **meta) -> GridFunction:
    """Sample a vectorized callable on ``grid``."""
    return GridFunction(grid, np.asarray(func(grid.nodes)), **meta)


def _slope(logx: np.ndarray, logy: np.ndarray) -> float:
    if not np.all(np.isfinite(logy)):
        return float("nan")
    return float(np.polyfit(logx, logy, 1)[0])


def fit_exponents(f: GridFunction) -> dict[str, float]:
    """Least-squares log-log slopes over the innermost and outermost decades.

    Returns ``zero_*`` as the fitted ``p0`` and ``tail_*`` as the fitted
    ``p_inf`` (sign flipped so that decay is positive).  Halves that vanish
    identically give ``nan``.
    """
    grid = f.grid
    k = max(int(round(grid.points_per_decade)), 2)
    s = grid.s
    out = {}
    with np.errstate(divide="ignore"):
        for name, half in zip(("plus", "minus"), split(f.values)):
            mag = np.log(np.abs(half))
            out[f"zero_{name}"] = _slope(s[:k], mag[:k])
            out[f"tail_{name}"] = -_slope(s[-k:], mag[-k:])
    return out


def fit_tail_coeffs(f: GridFunction, exponent: float | None = None) -> tuple[float, float]:
    """Signed ``C+-`` of ``f ~ C+- |x|**(-p)``, anchored at ``+-x_max``."""
    p = f.tail_exponent if exponent is None else exponent
    if p is None:
        raise ParameterError("tail exponent unknown")
    plus, minus = split(f.values)
    scale = f.grid.x_max ** p
    return float(plus[-1] * scale), float(minus[-1] * scale)


def zero_coeffs(f: GridFunction, exponent: float | None = None) -> tuple[float, float]:
    """Signed ``C+-`` of ``f ~ C+- |x|**p0`` as ``x -> 0+-``, anchored at ``x_min``."""
    p = f.zero_exponent if exponent is None else exponent
    if p is None:
        raise ParameterError("zero exponent unknown")
    plus, minus = split(f.values)
    scale = f.grid.x_min ** (-p)
    return float(plus[0] * scale), float(minus[0] * scale)


# }}}


# {{{ quadrature


def _half_cumulative(grid: Grid, half_values: np.ndarray, stencil: int = CELL_STENCIL) -> np.ndarray:
    """``int_{x_min}^{x_k} f dx`` for one half-line (values by ascending |x|)."""
    q = cumulative_matrix(grid.n_half, stencil)
    return grid.h * (q @ (half_values * grid.half))


def integrate_from_zero(fp: GridFunction) -> GridFunction:
    """Antiderivative ``F(x) = int_0^x fp`` vanishing at ``0``.

    The cell ``[0, x_min]`` on each side uses the power model ``C |x|**p0``
    anchored at the innermost node.  The returned function carries
    ``zero_exponent = p0 + 1`` and a relative ``error_estimate`` obtained by
    comparing with a lower-order rule.
    """
    p0 = fp.zero_exponent
    if p0 is None:
        raise ParameterError("integrate_from_zero needs zero_exponent metadata")
    if p0 <= -1:
        raise NonIntegrableSingularityError(f"zero exponent {p0} <= -1 is not integrable at 0")
    grid = fp.grid
    c_plus, c_minus = zero_coeffs(fp)
    first = grid.x_min ** (p0 + 1) / (p0 + 1)
    plus, minus = split(fp.values)
    out_plus = c_plus * first + _half_cumulative(grid, plus)
    out_minus = -(c_minus * first + _half_cumulative(grid, minus))
    low_plus = c_plus * first + _half_cumulative(grid, plus, stencil=CELL_STENCIL - 2)
    low_minus = -(c_minus * first + _half_cumulative(grid, minus, stencil=CELL_STENCIL - 2))
    out, low = join(out_plus, out_minus), join(low_plus, low_minus)
    floor = 1e-12 * max(np.max(np.abs(out)), np.finfo(float).tiny)
    err = np.max(np.abs(out - low) / np.maximum(np.abs(out), floor))
    return GridFunction(
        grid,
        out,
        zero_exponent=p0 + 1,
        error_estimate=float(err),
    )


def tail_integrals(fp: GridFunction) -> tuple[float, float]:
    """``int_{x_max}^inf fp`` and ``int_{-inf}^{-x_max} fp`` from the tail model."""
    p = fp.tail_exponent
    if p is None:
        raise ParameterError("tail integration needs tail_exponent metadata")
    if p <= 1:
        raise DivergentTailError(f"tail exponent {p} <= 1: integral diverges")
    c_plus, c_minus = fp.tail_coeffs if fp.tail_coeffs is not None else fit_tail_coeffs(fp)
    scale = fp.grid.x_max ** (1 - p) / (p - 1)
    return c_plus * scale, c_minus * scale


def zero_integrals(fp: GridFunction) -> tuple[float, float]:
    """``int_0^{x_min} fp`` and ``int_{-x_min}^0 fp`` from the zero model."""
    p0 = fp.zero_exponent
    if p0 is None:
        raise ParameterError("zero closure needs zero_exponent metadata")
    if p0 <= -1:
        raise NonIntegrableSingularityError(f"zero exponent {p0} <= -1 is not integrable at 0")
    c_plus, c_minus = zero_coeffs(fp)
    first = fp.grid.x_min ** (p0 + 1) / (p0 + 1)
    return c_plus * first, c_minus * first


def integrate_total_with_tails(fp: GridFunction) -> float:
    """``int_{-inf}^{inf} fp`` with power-law closures at ``0`` and ``+-inf``."""
    tail_plus, tail_minus = tail_integrals(fp)
    zero_plus, zero_minus = (0.0, 0.0) if fp.zero_exponent is None else zero_integrals(fp)
    body = float(np.dot(fp.grid.weights, fp.values))
    return body + tail_plus + tail_minus + zero_plus + zero_minus


def integrate_from_infinity(fp: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Outer antiderivatives per half.

    Returns ``(int_{x_k}^inf fp, int_{-inf}^{-x_k} fp)`` indexed by ascending
    ``|x|``; both include the tail closure.
    """
    grid = fp.grid
    tail_plus, tail_minus = tail_integrals(fp)
    plus, minus = split(fp.values)
    cum_plus = _half_cumulative(grid, plus)
    cum_minus = _half_cumulative(grid, minus)
    return tail_plus + cum_plus[-1] - cum_plus, tail_minus + cum_minus[-1] - cum_minus


def log_derivative(f: GridFunction | np.ndarray, grid: Grid | None = None, order: int = 1) -> np.ndarray:
    """``(x d/dx)``-type derivative ``d^order f / ds^order`` with ``s = ln|x|``.

    Each half-line is differentiated separately, so the stencils never cross
    ``x = 0``.  On the negative half ``s`` increases with ``|x|``.
    """
    if isinstance(f, GridFunction):
        grid, values = f.grid, f.values
    else:
        values = np.asarray(f)
    d = derivative_matrix(grid.n_half, order) / grid.h**order
    plus, minus = split(values)
    return join(d @ plus, d @ minus)


def derivative(f: GridFunction) -> np.ndarray:
    """``f'(x)`` at every node via the log-variable stencil."""
    x = f.grid.nodes
    return log_derivative(f) / x


# }}}
