"""Command-line front end.

Subcommands::

    tfcluster fidelity-grid --protocol cz --db-min 0 --db-max 20 --db-steps 21 --out grid.csv
    tfcluster cz-verify
    tfcluster build-cluster --d 2 --n 2 --db 10 --eta 1e-4
    tfcluster schedule --d 2 --n 3 --dt 1e-6 --tmem 1e-4 --delta-full 1e8 --out sched

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bogoliubov import cz_bogoliubov
from .cz import cz_sequence
from .gaussian import VACUUM_VARIANCE, db_to_r, fidelity
from .protocols import (
    build_2d_cluster,
    cz_fidelity,
    cz_fidelity_closed_form,
    nullifier_variances,
    two_qumode_fidelity,
    two_qumode_fidelity_closed_form,
)
from .scheduler import ArchitectureConstraints, ScheduleError, compile, memory_count

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2

GRID_TOL = 1e-6
CZ_RESIDUAL_TOL = 1e-10

PROTOCOLS = {
    "two_qumode": (two_qumode_fidelity_closed_form, two_qumode_fidelity),
    "cz": (cz_fidelity_closed_form, cz_fidelity),
}


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    protocol: str
    db_range: tuple
    delta_eta_range: tuple
    out: Path | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise InputError(f"Unknown protocol {self.protocol!r}")
        lo, hi, steps = self.db_range
        if steps < 1 or lo > hi or lo < 0:
            raise InputError(f"Invalid dB range {self.db_range}")
        lo, hi, steps, scale = self.delta_eta_range
        if steps < 1 or lo > hi or lo < 0 or hi > 1:
            raise InputError(f"Invalid delta_eta range {self.delta_eta_range[:3]}")
        if scale not in ("linear", "log"):
            raise InputError(f"Unknown scale {scale!r}")
        if scale == "log" and lo <= 0:
            raise InputError("A log-spaced delta_eta range needs a positive minimum")
        if self.fmt != "csv":
            raise InputError(f"Grid output format must be csv, got {self.fmt!r}")

    def db_values(self) -> np.ndarray:
        lo, hi, steps = self.db_range
        return np.linspace(lo, hi, steps)

    def delta_eta_values(self) -> np.ndarray:
        lo, hi, steps, scale = self.delta_eta_range
        return np.geomspace(lo, hi, steps) if scale == "log" else np.linspace(lo, hi, steps)


def _grid_point(args):
    protocol, db, eta = args
    closed, numeric = PROTOCOLS[protocol]
    f_closed = closed(db, eta)
    f_numeric = numeric(db, eta)
    return db, eta, f_closed, f_numeric, abs(f_closed - f_numeric)


def fidelity_rows(config: SweepConfig, jobs: int = 1) -> list[tuple]:
    """Evaluate the grid, in dB-major order regardless of ``jobs``."""
    points = [(config.protocol, float(db), float(eta)) for db in config.db_values() for eta in config.delta_eta_values()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_grid_point, points, chunksize=max(1, len(points) // (4 * jobs))))
    return [_grid_point(p) for p in points]


def _header_lines(params: dict) -> list[str]:
    lines = [f"# tfcluster {__version__}"]
    lines += [f"# {k} = {v}" for k, v in params.items()]
    lines += [
        f"# vacuum_variance = {VACUUM_VARIANCE}",
        "# quadrature_order = q1,p1,q2,p2,...",
        "# fidelity = Uhlmann fidelity (squared convention) to the lossless protocol output",
    ]
    return lines


def cmd_fidelity_grid(args) -> int:
    config = SweepConfig(
        args.protocol,
        (args.db_min, args.db_max, args.db_steps),
        (args.eta_min, args.eta_max, args.eta_steps, args.eta_scale),
        Path(args.out) if args.out else None,
        args.format or "csv",
    )
    rows = fidelity_rows(config, args.jobs)
    params = {
        "protocol": config.protocol,
        "db_range": config.db_range,
        "delta_eta_range": config.delta_eta_range,
        "seed": args.seed,
        "tolerance": GRID_TOL,
    }
    handle = open(config.out, "w", newline="") if config.out else sys.stdout
    try:
        for line in _header_lines(params):
            handle.write(line + "\n")
        writer = csv.writer(handle)
        writer.writerow(["db", "delta_eta", "f_closed_form", "f_numeric", "abs_diff"])
        for row in rows:
            writer.writerow([repr(float(x)) for x in row])
    finally:
        if config.out:
            handle.close()
    worst = max(row[4] for row in rows)
    print(f"{len(rows)} grid points, max |dF| = {worst:.3e}", file=sys.stderr)
    return EXIT_OK if worst <= GRID_TOL else EXIT_VERIFY


def cz_report() -> dict:
    start = time.perf_counter()
    seq = cz_sequence()
    composed = seq.bogoliubov()
    ideal = cz_bogoliubov()
    residual = float(max(np.max(np.abs(composed.A - ideal.A)), np.max(np.abs(composed.B - ideal.B))))
    return {
        "residual": residual,
        "coupling_sin2_phi_prime": seq.coupling,
        "tms_squeezing_db": seq.squeezing_db,
        "operations": [repr(op) for op in seq.raman_ops],
        "seconds": time.perf_counter() - start,
    }


def cmd_cz_verify(args) -> int:
    report = cz_report()
    print(f"residual      {report['residual']:.3e}")
    print(f"sin^2 phi'    {report['coupling_sin2_phi_prime']:.6f}")
    print(f"TMS squeezing {report['tms_squeezing_db']:.4f} dB")
    for op in report["operations"]:
        print(f"  {op}")
    return EXIT_OK if report["residual"] < CZ_RESIDUAL_TOL else EXIT_VERIFY


def cmd_build_cluster(args) -> int:
    if args.db is None or args.db < 0:
        raise InputError("--db must be given and non-negative")
    r = db_to_r(args.db)
    try:
        result = build_2d_cluster(args.d, args.n, r, args.eta)
        reference = build_2d_cluster(args.d, args.n, r, 0.0) if args.eta else result
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    variances = nullifier_variances(result)
    report = {
        "d": args.d,
        "n": args.n,
        "db": args.db,
        "delta_eta": args.eta,
        "vacuum_variance": VACUUM_VARIANCE,
        "nullifier_variances": {str(v): float(x) for v, x in zip(result.graph.nodes, variances)},
        "max_nullifier_variance": float(np.max(variances)),
        "fidelity_to_lossless": fidelity(result.state, reference.state),
        "memory_count": memory_count(args.d),
    }
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    print(f"memory count {report['memory_count']}")
    return EXIT_OK


def cmd_schedule(args) -> int:
    if args.out is None:
        raise InputError("--out is required")
    try:
        constraints = ArchitectureConstraints(args.tmem, args.delta_full)
        schedule = compile(args.d, args.n, constraints, args.dt)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    base = Path(args.out)
    formats = ("jsonl", "json") if args.format in (None, "both") else (args.format,)
    for fmt in formats:
        schedule.save(base.with_suffix("." + fmt), fmt)
        print(f"wrote {base.with_suffix('.' + fmt)}")
    print(f"{len(schedule.chain_memory_ids)} memories, {schedule.n_bins} time bins")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfcluster", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path")
        p.add_argument("--format", help="output format")
        p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; commands are deterministic")

    grid = sub.add_parser("fidelity-grid", help="closed-form vs numeric fidelity sweep (CSV)")
    grid.add_argument("--protocol", choices=sorted(PROTOCOLS), default="two_qumode")
    grid.add_argument("--db-min", type=float, default=0.0)
    grid.add_argument("--db-max", type=float, default=20.0)
    grid.add_argument("--db-steps", type=int, default=21)
    grid.add_argument("--eta-min", type=float, default=1e-6)
    grid.add_argument("--eta-max", type=float, default=1e-1)
    grid.add_argument("--eta-steps", type=int, default=21)
    grid.add_argument("--eta-scale", choices=("linear", "log"), default="log")
    grid.add_argument("--jobs", type=int, default=1)
    common(grid)
    grid.set_defaults(func=cmd_fidelity_grid)

    verify = sub.add_parser("cz-verify", help="check the three-memory CZ synthesis")
    verify.set_defaults(func=cmd_cz_verify)

    build = sub.add_parser("build-cluster", help="build a lattice and report nullifiers")
    build.add_argument("--d", type=int, default=1)
    build.add_argument("--n", type=int, default=2)
    build.add_argument("--db", type=float, default=10.0)
    build.add_argument("--eta", type=float, default=0.0)
    common(build)
    build.set_defaults(func=cmd_build_cluster)

    sched = sub.add_parser("schedule", help="compile a memory-chain schedule")
    sched.add_argument("--d", type=int, default=1)
    sched.add_argument("--n", type=int, default=2)
    sched.add_argument("--dt", type=float, default=1e-6)
    sched.add_argument("--tmem", type=float, default=1e-4)
    sched.add_argument("--delta-full", type=float, default=1e8)
    common(sched)
    sched.set_defaults(func=cmd_schedule)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (InputError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
