"""Fixed points of ``T``.

:func:`solve_fixed_point` runs damped Picard iteration
``g <- P[(1 - theta) g + theta lambda T[g]]`` along an increasing sequence of
``lambda`` ending at 1, where ``P`` symmetrizes ``G`` and restores its
monotonicity.  Because ``T`` commutes with a one-parameter dilation, fixed
points (when they exist) come in families; the run reports the crest scale
``x0`` of the result and flags solutions whose scale sits at the edge of the
grid, which are artifacts of truncating the line rather than fixed points
of ``T``.

:func:`dilation_drift` measures how fast the iteration slides along the
dilation orbit once the shape has settled, and :func:`solve_critical` finds,
for a given ``mu``, the ``nu`` at which that drift vanishes together with the
fixed point there (Newton's method with the gauge ``x0 = 1``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, isotonic_regression

from .errors import NumericalFailureError, ParameterError
from .grid import Grid, GridFunction, build_grid, join, log_derivative, split
from .system import (
    Parameters,
    SystemState,
    apply_T,
    big_G,
    crest_scale,
    dilate,
    edge_margin,
)

log = logging.getLogger(__name__)

#: decreases of G on [0, inf) below this are left to the symmetrization alone
MONOTONE_SLACK = 1e-12
#: a solution counts only if x0 is at least this many decades inside the grid
EDGE_MARGIN_DECADES = 2.0


@dataclass(frozen=True)
class SolverOptions:
    damping: float = 0.5
    tol_residual: float = 1e-6
    max_iters: int = 2000
    """Iteration cap per continuation stage."""
    continuation_lambdas: tuple[float, ...] | None = None
    """``None`` selects ``(lambda0, (lambda0 + 1)/2, 1)``."""
    acceleration: str = "off"
    """``"off"`` or ``"anderson"`` (secant mixing)."""
    depth: int = 3
    edge_margin: float = EDGE_MARGIN_DECADES
    diagnose_drift: bool = True
    """Measure the dilation drift when the result is pinned to the grid edge."""

    def __post_init__(self) -> None:
        if not 0 < self.damping <= 1:
            raise ParameterError(f"damping must lie in (0, 1], got {self.damping}")
        if not self.tol_residual > 0:
            raise ParameterError("tol_residual must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ParameterError("max_iters must be a positive integer")
        if self.acceleration not in ("off", "anderson"):
            raise ParameterError(f"unknown acceleration {self.acceleration!r}")
        if self.depth < 1:
            raise ParameterError("acceleration depth must be >= 1")
        lams = self.continuation_lambdas
        if lams is not None:
            lams = tuple(float(v) for v in lams)
            if not lams or lams[-1] != 1.0:
                raise ParameterError("continuation must end at lambda = 1")
            if any(not 0 < v <= 1 for v in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
                raise ParameterError("continuation lambdas must increase strictly within (0, 1]")
            object.__setattr__(self, "continuation_lambdas", lams)

    def lambdas(self, params: Parameters) -> tuple[float, ...]:
        if self.continuation_lambdas is not None:
            return self.continuation_lambdas
        lam0 = params.lambda0
        if lam0 >= 1.0:
            return (1.0,)
        return (lam0, 0.5 * (lam0 + 1.0), 1.0)


@dataclass(frozen=True)
class StageResult:
    lam: float
    iterations: int
    residual: float
    g_sup: float
    status: str


@dataclass(frozen=True)
class SolveReport:
    converged: bool
    status: str
    """``converged``, ``edge_pinned``, ``max_iters``, ``stagnated`` or ``diverged``."""
    iterations: int
    final_residual: float
    g: GridFunction
    system: SystemState
    history: tuple[float, ...]
    """Residual ``||g - lambda T[g]||`` after every iteration, all stages."""
    stages: tuple[StageResult, ...] = ()
    x0: float | None = None
    edge_margin: float = -math.inf
    drift: float | None = None
    """Dilation drift ``d ln(x0) / d(step)`` per unit damping (0 for a true fixed point)."""
    message: str = ""
    g_sup_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def params(self) -> Parameters:
        return self.system.params

    @property
    def grid(self) -> Grid:
        return self.g.grid


# {{{ cone projection


def project_X1(g: GridFunction, params: Parameters) -> GridFunction:
    """Make ``G`` even and non-decreasing on ``[0, inf)``; return the matching ``g``.

    The even part is the mean of ``G(x)`` and ``G(-x)``; an isotonic
    (least-squares monotone) fit is applied only when ``G`` decreases by more
    than :data:`MONOTONE_SLACK` somewhere.
    """
    G = big_G(g, params)
    G = 0.5 * (G + G[::-1])
    plus, _ = split(G)
    if np.any(np.diff(plus) < -MONOTONE_SLACK):
        plus = isotonic_regression(plus).x
    G = join(plus, plus)
    x = g.grid.nodes
    return g.with_values(G - 0.5 * (params.mu - params.nu) * np.log1p(x * x))


def monotonicity_defect(g: GridFunction, params: Parameters) -> float:
    """Largest decrease of ``G`` between consecutive nodes on ``[0, inf)``."""
    plus, _ = split(big_G(g, params))
    return float(max(0.0, -np.min(np.diff(plus))))


# }}}


# {{{ Picard / secant iteration


class _Anderson:
    """Type-II Anderson (secant) mixing on the residual ``r = Phi(g) - g``."""

    def __init__(self, depth: int, damping: float) -> None:
        self.depth = depth
        self.damping = damping
        self.dg: list[np.ndarray] = []
        self.dr: list[np.ndarray] = []
        self.last: tuple[np.ndarray, np.ndarray] | None = None

    def step(self, g: np.ndarray, r: np.ndarray) -> np.ndarray:
        if self.last is not None:
            self.dg.append(g - self.last[0])
            self.dr.append(r - self.last[1])
            if len(self.dg) > self.depth:
                self.dg.pop(0)
                self.dr.pop(0)
        self.last = (g.copy(), r.copy())
        new = g + self.damping * r
        if self.dr:
            dR = np.stack(self.dr, axis=1)
            dG = np.stack(self.dg, axis=1)
            gamma = np.linalg.lstsq(dR, r, rcond=None)[0]
            new = new - (dG + self.damping * dR) @ gamma
        return new


def _run_stage(g: GridFunction, params: Parameters, lam: float, opts: SolverOptions, history, sups):
    theta = opts.damping
    mixer = _Anderson(opts.depth, theta) if opts.acceleration == "anderson" else None
    best = math.inf
    since_best = 0
    start = None
    state = None
    for it in range(1, opts.max_iters + 1):
        state = apply_T(g, params, strict=False)
        r = lam * state.Tg.values - g.values
        res = float(np.max(np.abs(r)))
        if not math.isfinite(res):
            raise NumericalFailureError(f"non-finite residual at lambda={lam}, iteration {it}")
        history.append(res)
        sups.append(g.sup())
        start = res if start is None else start
        if res <= opts.tol_residual:
            return g, state, it, res, "converged"
        if res < 0.999 * best:
            best, since_best = res, 0
        else:
            since_best += 1
        if res > 1e3 * max(start, 1.0):
            return g, state, it, res, "diverged"
        if since_best > 200:
            return g, state, it, res, "stagnated"
        if mixer is None:
            new = g.values + theta * r
        else:
            new = mixer.step(g.values, r)
        if not np.all(np.isfinite(new)):
            raise NumericalFailureError(f"non-finite iterate at lambda={lam}, iteration {it}")
        g = project_X1(g.with_values(new), params)
    return g, state, opts.max_iters, res, "max_iters"


def solve_fixed_point(
    params: Parameters,
    grid: Grid,
    opts: SolverOptions | None = None,
    g0: GridFunction | None = None,
) -> SolveReport:
    """Damped Picard iteration with ``lambda``-continuation, starting from ``g = 0``."""
    opts = opts or SolverOptions()
    g = g0 if g0 is not None else GridFunction(grid, np.zeros(grid.size))
    g = project_X1(g, params)
    history: list[float] = []
    sups: list[float] = []
    stages = []
    total = 0
    status = "converged"
    state = None
    res = math.inf
    for lam in opts.lambdas(params):
        g, state, its, res, status = _run_stage(g, params, lam, opts, history, sups)
        total += its
        stages.append(StageResult(lam, its, res, g.sup(), status))
        log.info("lambda=%.4g: %s after %d iterations, residual %.3g", lam, status, its, res)
        if status != "converged":
            break
    x0 = crest_scale(state)
    margin = edge_margin(x0, grid)
    drift = None
    message = ""
    if status == "converged" and margin < opts.edge_margin:
        status = "edge_pinned"
        where = "not on the grid" if x0 is None else f"x0 = {x0:.3g}"
        message = (
            f"residual target met but the crest scale is {where} (margin {margin:.2f} decades): "
            "the discrete fixed point is held by the truncation of the line, not a fixed point of T"
        )
        if opts.diagnose_drift:
            drift = dilation_drift(params, grid, damping=opts.damping)[0]
            message += f"; dilation drift {drift:+.4g} per step"
    return SolveReport(
        converged=status == "converged",
        status=status,
        iterations=total,
        final_residual=res,
        g=g,
        system=state,
        history=tuple(history),
        stages=tuple(stages),
        x0=x0,
        edge_margin=margin,
        drift=drift,
        message=message,
        g_sup_history=tuple(sups),
    )


# }}}


# {{{ dilation drift and the critical curve


def dilation_drift(
    params: Parameters,
    grid: Grid,
    damping: float = 0.5,
    iterations: int = 120,
    g0: GridFunction | None = None,
) -> tuple[float, float, GridFunction]:
    """Drift of the gauged iteration along the dilation orbit.

    Each step is a damped Picard step followed by the dilation that returns
    the crest scale to ``x0 = 1``.  The shape settles quickly; what remains is
    a constant rescaling per step, whose logarithm divided by ``damping`` is
    returned together with the residual ``||g - T[g]||`` of the settled shape
    and the shape itself.  A fixed point of ``T`` has zero drift.
    """
    g = g0 if g0 is not None else GridFunction(grid, np.zeros(grid.size))
    state = apply_T(g, params, strict=False)
    x0 = _scale_or_fail(state)
    g = dilate(g, x0, params)
    shift = 0.0
    for _ in range(iterations):
        state = apply_T(g, params, strict=False)
        trial = g.with_values(g.values + damping * (state.Tg.values - g.values))
        x0 = _scale_or_fail(apply_T(trial, params, strict=False))
        shift = math.log(x0)
        g = project_X1(dilate(trial, x0, params), params)
    state = apply_T(g, params, strict=False)
    return shift / damping, state.residual_sup, g


def _scale_or_fail(state: SystemState) -> float:
    x0 = crest_scale(state)
    if x0 is None:
        raise NumericalFailureError("crest scale left the grid during the gauged iteration")
    return x0


def _gauged_residual(u: np.ndarray, nu: float, mu: float, grid: Grid):
    params = Parameters(mu, nu)
    state = apply_T(GridFunction(grid, join(u, u)), params, strict=False)
    x0 = _scale_or_fail(state)
    return state, np.concatenate([u - split(state.Tg.values)[0], [math.log(x0)]])


def critical_nu_bracket(mu: float, grid: Grid, nus=None) -> tuple[float, float]:
    """Adjacent ``nu`` values where the dilation drift changes sign."""
    nus = np.arange(0.05, 0.5, 0.05) if nus is None else np.asarray(nus)
    prev = None
    for nu in nus:
        try:
            d = dilation_drift(Parameters(mu, float(nu)), grid, iterations=60)[0]
        except NumericalFailureError:
            continue
        if prev is not None and np.sign(d) != np.sign(prev[1]):
            return prev[0], float(nu)
        prev = (float(nu), d)
    raise NumericalFailureError(f"no sign change of the dilation drift found for mu={mu}")


def solve_critical(
    mu: float,
    grid: Grid,
    nu_guess: float | None = None,
    tol: float = 1e-10,
    max_newton: int = 20,
    g0: GridFunction | None = None,
) -> SolveReport:
    """Fixed point of ``T`` on the critical curve ``nu = nu*(mu)``, gauged to ``x0 = 1``.

    Unknowns are the positive-half samples of the even ``g`` and ``nu``;
    equations are ``g = T[g]`` at the nodes and ``ln x0 = 0``.  The Jacobian is
    formed by forward differences and the system solved by Newton's method.
    A starting pair ``(g0, nu_guess)``, e.g. a solution from another grid,
    skips the drift search.
    """
    if g0 is not None:
        if nu_guess is None:
            raise ParameterError("g0 needs nu_guess")
        g = dilate(g0, 1.0, Parameters(mu, nu_guess), target=grid)
    elif nu_guess is None:
        lo, hi = critical_nu_bracket(mu, grid)
        nu_guess = brentq(
            lambda nu: dilation_drift(Parameters(mu, nu), grid, iterations=60)[0], lo, hi, xtol=1e-3
        )
    if g0 is None:
        _, _, g = dilation_drift(Parameters(mu, nu_guess), grid, iterations=60)
    n = grid.n_half
    z = np.concatenate([split(g.values)[0], [nu_guess]])
    history = []
    eps = 1e-7
    status = "max_iters"
    for it in range(1, max_newton + 1):
        state, r = _gauged_residual(z[:-1], z[-1], mu, grid)
        res = float(np.max(np.abs(r)))
        history.append(res)
        log.info("critical Newton %d: residual %.3g, nu %.12g", it, res, z[-1])
        if res <= tol:
            status = "converged"
            break
        jac = np.empty((n + 1, n + 1))
        for j in range(n + 1):
            dz = np.zeros(n + 1)
            dz[j] = eps
            jac[:, j] = (_gauged_residual(z[:-1] + dz[:-1], z[-1] + dz[-1], mu, grid)[1] - r) / eps
        z = z + np.linalg.solve(jac, -r)
        if not np.all(np.isfinite(z)) or not 0 < z[-1] < 0.5:
            raise NumericalFailureError("Newton step left the admissible window")
    x0 = crest_scale(state)
    return SolveReport(
        converged=status == "converged",
        status=status,
        iterations=it,
        final_residual=state.residual_sup,
        g=state.g,
        system=state,
        history=tuple(history),
        x0=x0,
        edge_margin=edge_margin(x0, grid),
        drift=0.0 if status == "converged" else None,
        message=f"critical nu*({mu:g}) = {z[-1]:.12g}",
    )


# }}}


def refinement_residual(g: GridFunction, params: Parameters) -> float:
    """``||g - T[g]||`` with ``T`` evaluated on the grid of twice the density.

    ``g`` is transferred by quintic splines in ``ln|x|``.  On a single grid the
    residual only reflects the iteration tolerance; against the finer operator
    it measures the discretization error of the solution itself.
    """
    grid = g.grid
    fine = build_grid(grid.x_min, grid.x_max, 2 * grid.points_per_decade)
    g_fine = dilate(g, 1.0, params, target=fine)
    state = apply_T(g_fine, params, strict=False)
    return state.residual_sup


def check_xgprime_bounded(g: GridFunction) -> float:
    """``sup |x g'(x)|`` over the nodes (``x g' = dg/ds`` with ``s = ln|x|``)."""
    return float(np.max(np.abs(log_derivative(g))))
