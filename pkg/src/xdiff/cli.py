# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from xdiff import components
from xdiff.__about__ import __version__
from xdiff.io import write_snapshot
from xdiff.numerics import Grid
from xdiff.specs import MotilitySpec
from xdiff.utils import (
    ConfigError,
    ExperimentName,
    InitStrategy,
    MotilityKind,
    SolverConvergenceError,
)

logger = logging.getLogger("xdiff.cli")

LOG_FORMAT = '%(asctime)s %(levelname)s "%(filename)s:%(lineno)d" %(message)s'
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _level(text: str) -> tuple[float, float]:
    h, sep, dt = text.partition(":")
    try:
        if not sep:
            raise ValueError(text)
        return float(h), float(dt)
    except ValueError:
        error_msg = f"Level must look like 'h:dt', got {text!r}"
        raise argparse.ArgumentTypeError(error_msg) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xdiff",
        description="Cross-diffusion chemotaxis laboratory.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log at DEBUG level"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a config, optionally as a preset")
    run.add_argument("config", type=Path)
    run.add_argument(
        "--preset", choices=[str(name) for name in ExperimentName], default=None
    )
    run.add_argument("--out", type=Path, default=None, help="artifact directory")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--progress", action="store_true")

    refine = commands.add_parser("refine", help="refinement study over (h, dt)")
    refine.add_argument("config", type=Path)
    refine.add_argument(
        "--levels", type=_level, nargs="+", required=True, metavar="H:DT"
    )
    refine.add_argument("--out", type=Path, default=None)

    steady = commands.add_parser("steady", help="nonconstant steady pattern")
    steady.add_argument("--d", type=float, required=True)
    steady.add_argument("--k", type=float, required=True)
    steady.add_argument("--length", type=float, default=1.0)
    steady.add_argument("--cells", type=int, default=256)
    steady.add_argument(
        "--strategy",
        choices=[str(s) for s in InitStrategy if s != InitStrategy.GIVEN],
        default=str(InitStrategy.SPIKE_ANSATZ),
    )
    steady.add_argument(
        "--threshold",
        action="store_true",
        help="bisect for the pattern threshold, starting from --d as lower end",
    )
    steady.add_argument("--out", type=Path, default=None)
    return parser


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _run(args: argparse.Namespace) -> int:
    config = components.load_config(args.config)
    if args.seed is not None:
        config = config.with_overrides({"seed": args.seed})
    report = components.run_experiment(
        args.preset, config, args.out, progress=args.progress
    )
    _emit(report.help())
    return report.exit_status


def _refine(args: argparse.Namespace) -> int:
    config = components.load_config(args.config)
    try:
        table = components.refinement_study(config, args.levels)
    except RuntimeError:
        logger.exception("Refinement study failed")
        return EXIT_FAILED
    _emit(table.help())
    out = args.out if args.out is not None else Path(config.output.directory) / "refine"
    out.mkdir(parents=True, exist_ok=True)
    table.frame.to_csv(out / "refinement.csv", index=False, float_format="%.17g")
    return EXIT_OK


def _steady(args: argparse.Namespace) -> int:
    grid = Grid.interval(args.length, args.cells)
    if args.threshold:
        report = components.locate_threshold(args.k, grid, args.d)
        _emit(report.help())
        return EXIT_OK

    profile = (
        components.SteadyBuilder()
        .new(args.d, args.k)
        .grid(grid)
        .strategy(InitStrategy(args.strategy))
        .build()
    )
    _emit(profile.help())
    r1, r2 = components.verify_steady(
        profile, MotilitySpec(kind=MotilityKind.POWER, k=args.k)
    )
    _emit(f"  r1 = {r1:.3e}, r2 = {r2:.3e}")
    if args.out is not None:
        write_snapshot(args.out / "w.xdiff", profile.w, t=0.0, name="w")
        write_snapshot(args.out / "u.xdiff", profile.u, t=0.0, name="u")
        write_snapshot(args.out / "v.xdiff", profile.v, t=0.0, name="v")
    return EXIT_OK if profile.nonconstant else EXIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    """
    Command line entry point.

    Returns 0 when every check passes, 1 when a check fails or a run aborts,
    and 2 for unusable input (bad config, bad arguments).
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt=LOG_DATE_FORMAT,
    )
    handlers = {"run": _run, "refine": _refine, "steady": _steady}
    try:
        return handlers[args.command](args)
    except ConfigError as error:
        logger.error("Invalid config: %s", error)
        return EXIT_USAGE
    except (OSError, ValueError) as error:
        logger.error("%s", error)
        return EXIT_USAGE
    except SolverConvergenceError as error:
        logger.error("Solver failed: %s", error)
        return EXIT_FAILED
