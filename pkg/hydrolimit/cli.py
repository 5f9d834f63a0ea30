"""Command-line front end: `hydrolimit <scenario> [options]`."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Any, Sequence

from .config import RunConfig, StepConfig, ToleranceConfig, apply_overrides, load_config
from .constants import LayerKind, Scenario
from .errors import ConfigError, HydroLimitError, NumericalError
from .pipelines import run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydrolimit",
        description="Particle simulations of energy generation and non-uniqueness in hydrodynamic limits.",
    )
    subparsers = parser.add_subparsers(dest="scenario", required=True, metavar="scenario")
    for scenario in Scenario:
        sub = subparsers.add_parser(scenario.value, help=_HELP[scenario])
        _add_run_options(sub)
    return parser


_HELP = {
    Scenario.GHOST: "build and replay the ghost cascade",
    Scenario.REVERSE: "time-reverse a finished cascade through the merge",
    Scenario.TRANSVERSE: "free vertical flight of alternating particles",
    Scenario.LAYERS: "1D two- or three-layer collision system",
    Scenario.SCATTER: "tabulate the two-body scattering map",
    Scenario.SWEEP: "ghost runs over several N with convergence tables",
}


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file (default: config.json in the project root)")
    parser.add_argument("--N", dest="N", action="append",
                        help="particle count; repeat or give a comma list for several runs")
    parser.add_argument("--horizon", help="time span after the last interaction (or of the run)")
    parser.add_argument("--snapshots", help="number of uniformly spaced snapshots")
    parser.add_argument("--bins", help="bin count per axis (default: width 1/ceil(sqrt(N)))")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", help="seed of the sliced W1 directions and Lipschitz battery")
    parser.add_argument("--kind", choices=[k.value for k in LayerKind], help="layer system (layers only)")
    parser.add_argument("--profile", help="interaction profile id")
    parser.add_argument("--threads", help="worker processes for sweeps")
    for f in fields(ToleranceConfig):
        parser.add_argument(f"--tol.{f.name}", dest=f"tol.{f.name}", metavar="X")
    for f in fields(StepConfig):
        parser.add_argument(f"--step.{f.name}", dest=f"step.{f.name}", metavar="X")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values = {k: v for k, v in vars(args).items() if k not in ("config", "verbose", "quiet")}
    if values.get("N") is not None:
        values["N"] = ",".join(values["N"])
    return values


def configure(args: argparse.Namespace) -> RunConfig:
    """
    File configuration with the command-line values applied on top.

    Raises:
        ConfigError: On invalid files or values
    """
    config = load_config(args.config)
    return apply_overrides(config, _overrides(args))


def _setup_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def error_record(exc: BaseException) -> dict[str, Any]:
    record: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NumericalError):
        record["diagnostics"] = {k: repr(v) for k, v in sorted(exc.diagnostics.items())}
    return record


def _report_error(exc: BaseException, out: str | None) -> None:
    text = json.dumps(error_record(exc), sort_keys=True)
    print(text, file=sys.stderr)
    if out is not None:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "error.json").write_text(text + "\n")
        except OSError as write_error:
            logger.warning("Could not write the error record: %s", write_error)


def main(argv: Sequence[str] | None = None) -> int:
    """
    Parse arguments, run the scenario and return the exit status.

    0 when every check passed, 1 when a check failed or a run raised, 2 for
    configuration errors.
    """
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    try:
        config = configure(args)
    except ConfigError as exc:
        _report_error(exc, None)
        return EXIT_CONFIG

    try:
        results = run(config)
    except ConfigError as exc:
        _report_error(exc, config.out)
        return EXIT_CONFIG
    except HydroLimitError as exc:
        logger.error("%s run failed: %s", config.scenario.value, exc)
        _report_error(exc, config.out)
        return EXIT_FAILED

    for result in results:
        status = "passed" if result.passed else "FAILED"
        print(f"{result.scenario.value} N={result.N}: {status} ({result.directory})")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
