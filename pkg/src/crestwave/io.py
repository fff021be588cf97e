"""Run configuration, solution archives and profile exports.

Archives are single JSON documents with a ``format_version`` field.  Floats
are written with Python's shortest round-trip representation, so a reload
reproduces every binary64 value exactly.
"""

from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ArchiveFormatError, ParameterError
from .grid import Grid, GridFunction, build_grid
from .profile import NORMALIZATIONS, SelfSimilarWave, WaveProfile
from .system import Parameters, SystemState, apply_T

FORMAT_VERSION = 1

PROFILE_COLUMNS = (
    "beta",
    "re_zeta",
    "im_zeta",
    "b",
    "a",
    "re_W",
    "im_W",
    "abs_U",
    "tangent_left",
    "tangent_right",
)
CURVE_COLUMNS = ("t", "alpha", "re_Z", "im_Z")


@dataclass
class RunConfig:
    mu: float = 1.0
    nu: float = 0.25
    x_min: float = 1e-6
    x_max: float = 1e6
    points_per_decade: int = 32
    tol: float = 1e-6
    damping: float = 0.5
    max_iters: int = 2000
    acceleration: str = "off"
    critical: bool = False
    """Solve on the critical curve: ``nu`` is replaced by ``nu*(mu)``."""
    normalization: str = "symmetric"
    out: str = "out"
    sigma: float | None = None
    t_values: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])

    def __post_init__(self) -> None:
        if self.normalization not in NORMALIZATIONS:
            raise ParameterError(f"normalization must be one of {NORMALIZATIONS}")
        if any(not t > 0 for t in self.t_values):
            raise ParameterError("t values must be positive")
        if self.sigma is not None and self.sigma < 0:
            raise ParameterError("sigma must be non-negative")
        self.params()

    def params(self) -> Parameters:
        return Parameters(float(self.mu), float(self.nu))

    def grid(self) -> Grid:
        return build_grid(float(self.x_min), float(self.x_max), int(self.points_per_decade))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path: str | Path) -> RunConfig:
    return RunConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_config(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


# {{{ archives


@dataclass
class SolutionArchive:
    config: dict
    mu: float
    nu: float
    grid: dict
    nodes: list[float]
    g: list[float]
    kappa: float
    residual: float
    status: str
    converged: bool
    x0: float | None
    edge_margin: float | None
    drift: float | None
    message: str
    verification: dict | None = None
    format_version: int = FORMAT_VERSION

    def params(self) -> Parameters:
        return Parameters(self.mu, self.nu)

    def build_grid(self) -> Grid:
        return build_grid(self.grid["x_min"], self.grid["x_max"], self.grid["points_per_decade"])

    def state(self) -> SystemState:
        """Recompute the full system state from the stored ``g``."""
        grid = self.build_grid()
        if not np.array_equal(grid.nodes, np.asarray(self.nodes)):
            raise ArchiveFormatError("stored nodes do not match the stored grid specification")
        return apply_T(GridFunction(grid, np.asarray(self.g, dtype=float)), self.params(), strict=False)

    def to_dict(self) -> dict:
        return asdict(self)


def archive_from_report(report, config: RunConfig, verification: dict | None = None) -> SolutionArchive:
    """Snapshot of a :class:`SolveReport` (or the critical-curve equivalent)."""
    params = report.params
    margin = report.edge_margin
    return SolutionArchive(
        config=config.to_dict(),
        mu=params.mu,
        nu=params.nu,
        grid=report.grid.spec(),
        nodes=report.grid.nodes.tolist(),
        g=report.g.values.tolist(),
        kappa=report.system.kappa,
        residual=report.system.residual_sup,
        status=report.status,
        converged=bool(report.converged),
        x0=report.x0,
        edge_margin=margin if math.isfinite(margin) else None,
        drift=report.drift,
        message=report.message,
        verification=verification,
    )


def save_archive(archive: SolutionArchive, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(archive.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_archive(path: str | Path) -> SolutionArchive:
    """Read an archive; any structural problem raises :class:`ArchiveFormatError` before anything is used."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ArchiveFormatError(f"cannot read archive {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ArchiveFormatError("archive must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ArchiveFormatError(f"archive format version {version!r}, expected {FORMAT_VERSION}")
    expected = {f.name for f in fields(SolutionArchive)}
    missing = expected - {"verification"} - set(data)
    if missing or set(data) - expected:
        raise ArchiveFormatError(f"archive keys mismatch: missing {sorted(missing)}, extra {sorted(set(data) - expected)}")
    try:
        archive = SolutionArchive(**data)
        size = len(archive.nodes)
        if len(archive.g) != size or size != 2 * round(
            archive.grid["points_per_decade"] * math.log10(archive.grid["x_max"] / archive.grid["x_min"])
        ):
            raise ArchiveFormatError("node and value counts disagree with the grid specification")
        archive.params()
    except (TypeError, KeyError, ParameterError) as exc:
        raise ArchiveFormatError(f"malformed archive: {exc}") from exc
    return archive


# }}}


# {{{ profile exports


def _row(values) -> list[str]:
    return [repr(float(v)) for v in values]


def write_profile_csv(profile: WaveProfile, path: str | Path) -> Path:
    """Nodes in ascending ``beta`` with the crest ``beta = 0`` as an explicit row.

    Regular rows repeat the tangent angle in both tangent columns; the crest
    row carries the left and right limits.
    """
    path = Path(path)
    left, right = profile.corner_tangents
    psi = profile.b + profile.phi * (profile.beta > 0)
    n = profile.grid.n_half
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for k in range(profile.grid.size):
            if k == n:
                w.writerow(_row([0.0, 0.0, 0.0, profile.b_zero, 0.0, 0.0, 0.0, 0.0, left, right]))
            w.writerow(
                _row(
                    [
                        profile.beta[k],
                        profile.zeta[k].real,
                        profile.zeta[k].imag,
                        profile.b[k],
                        profile.a[k],
                        profile.W[k].real,
                        profile.W[k].imag,
                        abs(profile.U[k]),
                        psi[k],
                        psi[k],
                    ]
                )
            )
    return path


def write_curves_csv(profile: WaveProfile, t_values, path: str | Path) -> Path:
    """``Z(alpha, t) = t zeta(alpha / t)`` at ``alpha = t beta_j`` for every ``t``."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for t in t_values:
            Z = t * profile.zeta
            for alpha, z in zip(t * profile.beta, Z):
                w.writerow(_row([t, alpha, z.real, z.imag]))
    return path


def write_crossover_csv(report, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("sigma", "t", "alpha_c"))
        for t, a in zip(report.times, report.crossover_alpha):
            w.writerow(_row([report.sigma, t, a]))
        w.writerow(("exponent", repr(report.exponent), ""))
    return path


def write_profile_svg(
    profile: WaveProfile,
    path: str | Path,
    extent: float = 3.0,
    arrows: int = 9,
    size: int = 640,
) -> Path:
    """Crest profile for ``|beta| <= extent`` with velocity arrows ``W`` and the two crest tangents.

    The tangents are drawn as the segments ``tangent-left`` and
    ``tangent-right`` leaving the crest; SVG's y axis points down, so the
    physical ``y`` is negated.
    """
    path = Path(path)
    wave = SelfSimilarWave(profile)
    betas = np.linspace(-extent, extent, 601)
    pts = np.array([wave.zeta(b) for b in betas])
    span = max(np.ptp(pts.real), np.ptp(pts.imag), 1e-12)
    scale = 0.8 * size / span
    cx = size / 2 - scale * 0.5 * (pts.real.max() + pts.real.min())
    cy = 0.15 * size

    def sx(z: complex) -> float:
        return cx + scale * z.real

    def sy(z: complex) -> float:
        return cy - scale * z.imag

    poly = " ".join(f"{sx(z):.3f},{sy(z):.3f}" for z in pts)
    left, right = profile.corner_tangents
    seg = 0.25 * extent
    # the left branch is traced towards the crest, so its tangent ray points backwards
    tl = -seg * np.exp(1j * left)
    tr = seg * np.exp(1j * right)
    o = 0j
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<title>crest profile mu={profile.params.mu:g} nu={profile.params.nu:g}</title>',
        f'<polyline id="profile" fill="none" stroke="black" stroke-width="1.5" points="{poly}"/>',
        f'<line id="tangent-left" x1="{sx(o):.6f}" y1="{sy(o):.6f}" x2="{sx(tl):.6f}" y2="{sy(tl):.6f}" stroke="red"/>',
        f'<line id="tangent-right" x1="{sx(o):.6f}" y1="{sy(o):.6f}" x2="{sx(tr):.6f}" y2="{sy(tr):.6f}" stroke="red"/>',
    ]
    wmax = max(abs(wave.W(b)) for b in np.linspace(-extent, extent, arrows)) or 1.0
    for b in np.linspace(-extent, extent, arrows):
        z = wave.zeta(b)
        v = 0.15 * extent * wave.W(b) / wmax
        parts.append(
            f'<line class="velocity" x1="{sx(z):.3f}" y1="{sy(z):.3f}" x2="{sx(z + v):.3f}" y2="{sy(z + v):.3f}" stroke="blue"/>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path


def svg_corner_angle(path: str | Path) -> float:
    """Angle (radians) between the two crest tangent segments of an SVG written above."""
    root = ET.parse(path).getroot()
    vecs = []
    for name in ("tangent-left", "tangent-right"):
        el = next(e for e in root.iter() if e.get("id") == name)
        x1, y1, x2, y2 = (float(el.get(k)) for k in ("x1", "y1", "x2", "y2"))
        vecs.append(complex(x2 - x1, -(y2 - y1)))
    return abs(float(np.angle(vecs[0] / vecs[1])))


# }}}
