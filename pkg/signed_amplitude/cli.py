"""Command line interface for sweeps, theory tables and single traced runs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from .backends import BACKENDS, BackendError
from .constants import DEFAULT_GAMMA, DEFAULT_Q_GRID
from .harness import (
    ConfigError,
    ExperimentConfig,
    OutputError,
    emit_dat,
    log_epsilon_grid,
    run_sweep,
    single_run,
    write_bounds_table,
)
from .theory import InvalidParameterError
from .verification import PropertyViolation

logger = logging.getLogger(__name__)

EXIT_VIOLATION = 1
EXIT_INVALID = 2


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {text!r}") from exc


def _float_pair(text: str) -> tuple[float, float]:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"Expected 'low,high', got {text!r}")
    return values[0], values[1]


def _add_oracle_arguments(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument("--gamma", type=float, default=None, help="Failure probability (default: 0.05)")
    subparser.add_argument("--backend", choices=sorted(BACKENDS), default=None, help="Oracle backend")
    subparser.add_argument("--qubits", type=int, default=None, help="Register size for the circuit backend")
    subparser.add_argument("--seed", type=int, default=None, help="Master seed (unsigned 64-bit)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Signed amplitude estimation CLI")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity (default: WARNING)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run a seeded sweep and write .dat files")
    run_parser.add_argument("--config", default=None, help="JSON or key = value configuration file")
    run_parser.add_argument("--epsilon", type=_float_list, default=None, help="Comma-separated target precisions")
    run_parser.add_argument("--q", type=_float_list, default=None, help="Comma-separated amplification policies")
    run_parser.add_argument("--reps", type=int, default=None, help="Repetitions per (q, epsilon) cell")
    amplitude = run_parser.add_mutually_exclusive_group()
    amplitude.add_argument("--amplitude", type=float, default=None, help="Fixed true amplitude")
    amplitude.add_argument(
        "--amplitude-range",
        type=_float_pair,
        default=None,
        help="Draw each run's amplitude uniformly from 'low,high'",
    )
    _add_oracle_arguments(run_parser)
    run_parser.add_argument("--out", default=None, help="Output directory (default: results)")
    run_parser.add_argument(
        "--trace",
        action="store_true",
        default=None,
        help="Keep per-iteration traces in sweep.json",
    )
    run_parser.set_defaults(func=_run_command)

    bounds_parser = subparsers.add_parser("bounds", help="Tabulate the closed-form bounds")
    bounds_parser.add_argument(
        "--q",
        type=_float_list,
        default=list(DEFAULT_Q_GRID),
        help="Comma-separated amplification policies",
    )
    bounds_parser.add_argument(
        "--epsilon-range",
        type=_float_pair,
        default=(1e-5, 1e-2),
        help="Log-spaced epsilon range 'low,high' (default: 1e-5,1e-2)",
    )
    bounds_parser.add_argument("--points", type=int, default=31, help="Grid points (default: 31)")
    bounds_parser.add_argument("--gamma", type=float, default=DEFAULT_GAMMA, help="Failure probability")
    bounds_parser.add_argument("--out", default="results", help="Output directory (default: results)")
    bounds_parser.set_defaults(func=_bounds_command)

    single_parser = subparsers.add_parser("single", help="Run one estimation and print its trace as JSON")
    single_parser.add_argument("--epsilon", type=float, required=True, help="Target precision")
    single_parser.add_argument("--q", type=float, default=2.0, help="Amplification policy (default: 2)")
    single_parser.add_argument("--amplitude", type=float, default=None, help="True amplitude (default: 0.3)")
    _add_oracle_arguments(single_parser)
    single_parser.set_defaults(func=_single_command)

    return parser


def _run_command(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {
        "epsilon_grid": args.epsilon,
        "q_grid": args.q,
        "gamma": args.gamma,
        "repetitions": args.reps,
        "amplitude": args.amplitude,
        "amplitude_range": args.amplitude_range,
        "backend": args.backend,
        "n_qubits": args.qubits,
        "seed": args.seed,
        "output_dir": args.out,
        "trace": args.trace,
    }
    config = config.with_overrides(**overrides)
    if args.amplitude is not None and config.amplitude_range is not None:
        config = ExperimentConfig.from_mapping({**config.to_dict(), "amplitude_range": None})

    summary = run_sweep(config)
    for path in emit_dat(summary):
        print(path)
    print(summary.cells.to_string(index=False))
    return 0


def _bounds_command(args: argparse.Namespace) -> int:
    epsilons = log_epsilon_grid(*args.epsilon_range, args.points)
    for q in args.q:
        table, path = write_bounds_table(q, epsilons, args.gamma, args.out)
        print(f"# q={q:g} -> {path}")
        print(table.to_string(index=False))
    return 0


def _single_command(args: argparse.Namespace) -> int:
    options = {
        "gamma": args.gamma,
        "amplitude": args.amplitude,
        "backend": args.backend,
        "n_qubits": args.qubits,
        "seed": args.seed,
    }
    _, record = single_run(args.q, args.epsilon, **{key: value for key, value in options.items() if value is not None})
    print(json.dumps(record, indent=2, sort_keys=True))
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except PropertyViolation as exc:
        print(f"Property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ConfigError, InvalidParameterError, BackendError) as exc:
        print(f"Invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OutputError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover - CLI entry point
    sys.exit(main())
