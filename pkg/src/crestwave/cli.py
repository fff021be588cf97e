"""Command-line driver: ``crestwave solve | verify | profile | scan``.

Exit codes: 0 success, 2 usage error, 3 no converged solution, 4 failed
verification.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

from .errors import ArchiveFormatError, CrestwaveError, ParameterError, WindowError
from .io import (
    RunConfig,
    SolutionArchive,
    archive_from_report,
    load_archive,
    load_config,
    save_archive,
    write_crossover_csv,
    write_curves_csv,
    write_profile_csv,
    write_profile_svg,
)
from .profile import (
    asymptotic_exponents,
    reconstruct_profile,
    solve_on_window_grid,
    surface_tension_diagnostic,
    velocity_asymptotics,
)
from .solver import SolverOptions, solve_critical, solve_fixed_point
from .system import SystemState, crest_scale, edge_margin
from .verification import VerificationReport, profile_checks, skipped, verify_state

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_VERIFY = 0, 2, 3, 4

DEFAULT_MUS = (0.75, 1.0, 1.5)
DEFAULT_NUS = (0.1, 0.25, 0.4)
#: exponent fits that enter the scan's fit-error column
FIT_NAMES = ("b_prime_inner", "b_prime_outer", "h_inner", "h_outer", "b_decay_outer")
SCAN_COLUMNS = (
    "mu",
    "nu",
    "status",
    "converged",
    "iterations",
    "residual",
    "kappa",
    "g_sup",
    "x0",
    "edge_margin",
    "drift",
    "max_fit_error",
    "velocity_regime_ok",
    "message",
)


def solve(config: RunConfig):
    """Run the configured solver and return its report."""
    grid = config.grid()
    if config.critical:
        return solve_critical(config.mu, grid)
    opts = SolverOptions(
        damping=config.damping,
        tol_residual=config.tol,
        max_iters=config.max_iters,
        acceleration=config.acceleration,
    )
    return solve_fixed_point(config.params(), grid, opts)


def full_verification(state: SystemState, normalization: str = "symmetric", tol: float = 1e-6) -> VerificationReport:
    """State checks plus wave-geometry checks (the latter only when ``x0`` is well inside the grid)."""
    report = verify_state(state, residual_tol=tol)
    x0 = crest_scale(state)
    if edge_margin(x0, state.grid) >= 2.0:
        report.add(*profile_checks(state, reconstruct_profile(state, normalization=normalization)))
    else:
        report.add(
            skipped("profile_geometry", "wave reconstruction", "x0 resolved", "crest scale not resolved on the grid")
        )
    return report


def cmd_solve(config: RunConfig) -> SolutionArchive:
    report = solve(config)
    archive = archive_from_report(report, config)
    verification = full_verification(archive.state(), config.normalization, config.tol)
    archive.verification = verification.to_dict()
    path = save_archive(archive, Path(config.out) / "solution.json")
    print(f"{report.status}: residual {report.final_residual:.3g}, kappa {archive.kappa:.6g}, x0 {archive.x0}")
    if report.message:
        print(report.message)
    print(f"verification {verification.summary()}")
    print(f"wrote {path}")
    return archive


def cmd_verify(archive: SolutionArchive) -> VerificationReport:
    normalization = archive.config.get("normalization", "symmetric")
    report = full_verification(archive.state(), normalization, archive.config.get("tol", 1e-6))
    print(report.text())
    if archive.verification is not None:
        same = report.to_dict() == archive.verification
        print("stored summary reproduced" if same else "stored summary differs from this run")
    return report


def cmd_profile(archive: SolutionArchive, t_values, sigma: float | None, out: str | Path, normalization: str) -> dict:
    """Write profile.csv, curves.csv, profile.svg and (with ``sigma``) crossover.csv."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    profile = reconstruct_profile(archive.state(), normalization=normalization)
    written = {
        "profile": write_profile_csv(profile, out / "profile.csv"),
        "curves": write_curves_csv(profile, t_values, out / "curves.csv"),
        "svg": write_profile_svg(profile, out / "profile.svg"),
    }
    if sigma is not None:
        try:
            rep = surface_tension_diagnostic(profile, sigma)
            written["crossover"] = write_crossover_csv(rep, out / "crossover.csv")
            print(f"surface-tension crossover exponent {rep.exponent:.4f} (2/3 expected)")
        except WindowError as exc:
            print(f"crossover table skipped: {exc}")
    for name, path in written.items():
        print(f"wrote {name}: {path}")
    return written


def _scan_pair(job: tuple[dict, str]) -> dict:
    """Solve one pair and summarise it; failures become rows rather than exceptions."""
    cfg_dict, out = job
    config = RunConfig.from_dict(cfg_dict)
    row = {k: "" for k in SCAN_COLUMNS}
    row.update(mu=config.mu, nu=config.nu)
    try:
        report = solve(config)
        archive = archive_from_report(report, config)
        tag = f"mu{config.mu:g}" + ("_critical" if config.critical else f"_nu{config.nu:g}")
        save_archive(archive, Path(out) / f"{tag}.json")
        row.update(
            nu=report.params.nu,
            status=report.status,
            converged=report.converged,
            iterations=report.iterations,
            residual=report.final_residual,
            kappa=report.system.kappa,
            g_sup=report.g.sup(),
            x0=report.x0 if report.x0 is not None else "",
            edge_margin=report.edge_margin if math.isfinite(report.edge_margin) else "",
            drift=report.drift if report.drift is not None else "",
            message=report.message,
        )
        if report.converged and config.critical:
            wide = solve_on_window_grid(report)
            prof = reconstruct_profile(wide.system)
            fits = asymptotic_exponents(prof)
            row["max_fit_error"] = max(fits[name].error for name in FIT_NAMES)
            row["velocity_regime_ok"] = velocity_asymptotics(prof).regime_ok
    except CrestwaveError as exc:
        row.update(status="error", converged=False, message=str(exc))
    return row


def cmd_scan(mus, nus, config: RunConfig, workers: int | None = None) -> list[dict]:
    """Solve every pair concurrently, write per-pair archives and ``scan.csv``."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    base = config.to_dict()
    if config.critical:
        pairs = [(mu, config.nu) for mu in mus]
    else:
        pairs = [(mu, nu) for mu in mus for nu in nus]
    jobs = []
    for mu, nu in pairs:
        cfg = dict(base, mu=float(mu), nu=float(nu))
        RunConfig.from_dict(cfg)
        jobs.append((cfg, str(out)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_scan_pair, jobs))
    path = out / "scan.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SCAN_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(
            f"mu={r['mu']:g} nu={r['nu']:.6g} {r['status']}: kappa={r['kappa']} g_sup={r['g_sup']} "
            f"x0={r['x0']} fit_err={r['max_fit_error']}"
        )
    print(f"wrote {path}")
    return rows


# {{{ argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    p.add_argument("--mu", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--x-min", dest="x_min", type=float)
    p.add_argument("--x-max", dest="x_max", type=float)
    p.add_argument("--ppd", dest="points_per_decade", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--damping", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--acceleration", choices=("off", "anderson"))
    p.add_argument("--critical", action="store_true", default=None, help="solve on the critical curve nu = nu*(mu)")
    p.add_argument("--normalization", choices=("symmetric", "asymptotic"))
    p.add_argument("--out", help="output directory")
    p.add_argument("--sigma", type=float)
    p.add_argument("--t", dest="t_values", type=float, action="append", help="time value (repeatable)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crestwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="solve the fixed-point system and write an archive")
    _common(p)
    p = sub.add_parser("verify", help="re-run every check on an archive")
    p.add_argument("archive")
    _common(p)
    p = sub.add_parser("profile", help="export the wave profile of an archive")
    p.add_argument("archive")
    _common(p)
    p = sub.add_parser("scan", help="solve a grid of (mu, nu) pairs")
    p.add_argument("--mus", type=float, nargs="+", default=list(DEFAULT_MUS))
    p.add_argument("--nus", type=float, nargs="+", default=list(DEFAULT_NUS))
    p.add_argument("--workers", type=int)
    _common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = load_config(args.config).to_dict() if args.config else {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            data[f.name] = value
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
        if args.command == "solve":
            archive = cmd_solve(config)
            if not archive.converged:
                return EXIT_NOT_CONVERGED
            return EXIT_OK if archive.verification["summary"].startswith("PASS") else EXIT_VERIFY
        if args.command == "verify":
            report = cmd_verify(load_archive(args.archive))
            return EXIT_OK if report.passed else EXIT_VERIFY
        if args.command == "profile":
            archive = load_archive(args.archive)
            if not archive.converged:
                print(f"archive is not a converged solution ({archive.status}); try solve --critical", file=sys.stderr)
                return EXIT_NOT_CONVERGED
            cmd_profile(archive, config.t_values, config.sigma, config.out, config.normalization)
            return EXIT_OK
        rows = cmd_scan(args.mus, args.nus, config, args.workers)
        return EXIT_OK if all(r["converged"] is True for r in rows) else EXIT_NOT_CONVERGED
    except (ParameterError, ArchiveFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CrestwaveError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


# }}}


if __name__ == "__main__":
    raise SystemExit(main())
