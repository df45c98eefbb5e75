"""Seeded experiment sweeps, aggregation and plotting-data emission.

A sweep runs ``repetitions`` independent estimations for every (q, epsilon)
cell, checks each run with :mod:`signed_amplitude.verification`, aggregates
the oracle-call, depth and iteration metrics per cell with pandas, and writes
one ``x y y-min y-max`` table per (q, metric) plus a JSON sidecar.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

import numpy as np
import pandas as pd

from .backends import BACKENDS, CircuitBackend, make_backend
from .constants import (
    AMPLITUDE_LIMIT,
    CIRCUIT_MIN_EPSILON,
    DEFAULT_AMPLITUDE,
    DEFAULT_EPSILON_GRID,
    DEFAULT_GAMMA,
    DEFAULT_N_QUBITS,
    DEFAULT_Q_GRID,
    DEFAULT_REPETITIONS,
)
from .estimator import EstimationError, RunResult, run
from .schedule import Schedule, ScheduleInputs, derive_schedule
from .theory import bound_report, depth_bound, iteration_bound, oracle_call_bound
from .verification import PropertyViolation, contains_amplitude, find_violations

logger = logging.getLogger(__name__)

METRICS: dict[str, str] = {
    "n_oracle_grover": "oracle_calls",
    "n_oracle_A": "oracle_calls_A",
    "k_last": "k",
    "iterations": "I",
}
"""Run metrics aggregated per cell, mapped to their ``.dat`` file suffix."""

SIDECAR_NAME = "sweep.json"

BOUNDS_COLUMNS = [
    "epsilon",
    "k_max",
    "T",
    "oracle_call_bound",
    "quadratic_cost",
    "classical_cost",
    "iqae_reference",
]


class ConfigError(ValueError):
    """Raised when an experiment configuration is malformed or inconsistent."""


class OutputError(OSError):
    """Raised when a result file cannot be written."""


# ----------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------
def _float_list(value: Any) -> list[float]:
    if isinstance(value, str):
        return [float(item) for item in value.split(",") if item.strip()]
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(item) for item in value]


def _amplitude_range(value: Any) -> tuple[float, float] | None:
    if value is None:
        return None
    bounds = _float_list(value)
    if len(bounds) != 2:
        raise ConfigError(f"amplitude_range needs exactly two values, got {value!r}")
    return bounds[0], bounds[1]


def _boolean(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in {"1", "true", "yes", "on"}
    return bool(value)


_FIELD_PARSERS: dict[str, Callable[[Any], Any]] = {
    "epsilon_grid": _float_list,
    "q_grid": _float_list,
    "gamma": float,
    "repetitions": int,
    "amplitude": float,
    "amplitude_range": _amplitude_range,
    "backend": str,
    "n_qubits": int,
    "seed": int,
    "output_dir": Path,
    "trace": _boolean,
    "circuit_min_epsilon": float,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a sweep, seed included.

    When ``amplitude_range`` is set, each run draws its true amplitude
    uniformly from it and ``amplitude`` is ignored.
    """

    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILON_GRID
    q_grid: tuple[float, ...] = DEFAULT_Q_GRID
    gamma: float = DEFAULT_GAMMA
    repetitions: int = DEFAULT_REPETITIONS
    amplitude: float = DEFAULT_AMPLITUDE
    amplitude_range: tuple[float, float] | None = None
    backend: str = "analytic"
    n_qubits: int = DEFAULT_N_QUBITS
    seed: int = 0
    output_dir: Path = field(default_factory=lambda: Path("results"))
    trace: bool = False
    circuit_min_epsilon: float = CIRCUIT_MIN_EPSILON

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        unknown = set(data) - set(_FIELD_PARSERS)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

        values: dict[str, Any] = {}
        for key, raw in data.items():
            try:
                parsed = _FIELD_PARSERS[key](raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"Invalid value for {key!r}: {raw!r}") from exc
            if key in {"epsilon_grid", "q_grid"}:
                parsed = tuple(parsed)
            values[key] = parsed
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path) -> ExperimentConfig:
        """Load a JSON object or ``key = value`` lines (``#`` starts a comment)."""

        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"Unable to read configuration file {path}") from exc

        if text.lstrip().startswith("{"):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"Invalid JSON in {path}") from exc
            return cls.from_mapping(data)

        data = {}
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{number}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            data[key.replace("-", "_")] = value
        return cls.from_mapping(data)

    def with_overrides(self, **overrides: Any) -> ExperimentConfig:
        """Copy with every override that is not ``None`` applied."""

        return self.from_mapping(
            {**self.to_dict(), **{key: value for key, value in overrides.items() if value is not None}}
        )

    def cells(self) -> list[tuple[float, float]]:
        return list(product(self.q_grid, self.epsilon_grid))

    def validate(self) -> None:
        """Check the whole configuration before any run starts.

        Raises
        ------
        ConfigError
            On any inconsistent setting; schedule errors are chained.
        """

        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be at least 1, got {self.repetitions}")
        if not self.epsilon_grid or not self.q_grid:
            raise ConfigError("epsilon_grid and q_grid must not be empty")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"Unknown backend {self.backend!r}")

        if self.amplitude_range is None:
            amplitudes: Iterable[float] = (self.amplitude,)
        else:
            low, high = self.amplitude_range
            if low > high:
                raise ConfigError(f"amplitude_range is reversed: {self.amplitude_range}")
            amplitudes = self.amplitude_range
        for amplitude in amplitudes:
            if abs(amplitude) > AMPLITUDE_LIMIT:
                raise ConfigError(f"Amplitude {amplitude} outside [-{AMPLITUDE_LIMIT}, {AMPLITUDE_LIMIT}]")

        if self.backend == CircuitBackend.name:
            finest = min(self.epsilon_grid)
            if finest < self.circuit_min_epsilon:
                raise ConfigError(
                    f"Circuit backend sweeps are limited to epsilon >= {self.circuit_min_epsilon}, got {finest}"
                )

        for q, epsilon in self.cells():
            try:
                derive_schedule(ScheduleInputs(q, epsilon, self.gamma))
            except ValueError as exc:
                raise ConfigError(f"Invalid cell q={q}, epsilon={epsilon}: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["epsilon_grid"] = list(self.epsilon_grid)
        data["q_grid"] = list(self.q_grid)
        data["amplitude_range"] = None if self.amplitude_range is None else list(self.amplitude_range)
        data["output_dir"] = str(self.output_dir)
        return data


# ----------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------
def run_stream(seed: int, cell_index: int, repetition: int) -> np.random.Generator:
    """Independent stream for one run, keyed by (cell, repetition) only."""

    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(cell_index, repetition)))


def _run_record(
    result: RunResult,
    q: float,
    epsilon: float,
    repetition: int,
    amplitude: float,
    contained: bool,
    include_trace: bool,
) -> dict[str, Any]:
    low, high = result.rescaled_bounds
    record: dict[str, Any] = {
        "q": q,
        "epsilon": epsilon,
        "rep": repetition,
        "amplitude": amplitude,
        "estimate": result.rescaled_estimate,
        "low": low,
        "high": high,
        "n_oracle_grover": result.n_oracle_grover,
        "n_oracle_A": result.n_oracle_A,
        "k_last": result.k_last,
        "iterations": result.iteration_count,
        "contained": contained,
    }
    if include_trace:
        record["trace"] = [iteration.to_dict() for iteration in result.iterations]
    return record


def execute_run(
    config: ExperimentConfig,
    schedule: Schedule,
    oracle_bound: float,
    cell_index: int,
    repetition: int,
) -> tuple[RunResult, dict[str, Any]]:
    """Run and verify one seeded estimation.

    Raises
    ------
    PropertyViolation
        If the run breaks a deterministic guarantee or its iteration guard.
    """

    rng = run_stream(config.seed, cell_index, repetition)
    if config.amplitude_range is None:
        amplitude = config.amplitude
    else:
        amplitude = float(rng.uniform(*config.amplitude_range))
    backend = make_backend(config.backend, amplitude, config.n_qubits)

    try:
        result = run(schedule, backend, rng)
    except EstimationError as exc:
        trace = [iteration.to_dict() for iteration in exc.iterations]
        raise PropertyViolation([str(exc)], {"q": schedule.q, "epsilon": schedule.epsilon, "trace": trace}) from exc

    contained = contains_amplitude(result, backend.effective_amplitude)
    record = _run_record(result, schedule.q, schedule.epsilon, repetition, amplitude, contained, config.trace)

    violations = find_violations(result, schedule, oracle_bound)
    if violations:
        logger.error(
            "Run %s of cell q=%s epsilon=%s violates: %s",
            repetition,
            schedule.q,
            schedule.epsilon,
            "; ".join(violations),
        )
        raise PropertyViolation(violations, {**record, **result.to_dict(include_trace=True)})
    return result, record


def single_run(
    q: float,
    epsilon: float,
    gamma: float = DEFAULT_GAMMA,
    amplitude: float = DEFAULT_AMPLITUDE,
    backend: str = "analytic",
    n_qubits: int = DEFAULT_N_QUBITS,
    seed: int = 0,
) -> tuple[RunResult, dict[str, Any]]:
    """One traced run; the record carries the schedule and the full trace."""

    config = ExperimentConfig(
        epsilon_grid=(epsilon,),
        q_grid=(q,),
        gamma=gamma,
        repetitions=1,
        amplitude=amplitude,
        backend=backend,
        n_qubits=n_qubits,
        seed=seed,
        trace=True,
        circuit_min_epsilon=0.0,
    )
    config.validate()
    schedule = derive_schedule(ScheduleInputs(q, epsilon, gamma))
    result, record = execute_run(config, schedule, oracle_call_bound(q, epsilon, gamma), 0, 0)
    record["schedule"] = schedule.to_dict()
    return result, record


# ----------------------------------------------------------------------
# Aggregation
# ----------------------------------------------------------------------
@dataclass
class SweepSummary:
    """Per-cell statistics of a sweep plus the per-run records behind them."""

    config: ExperimentConfig
    cells: pd.DataFrame
    runs: pd.DataFrame
    run_records: list[dict[str, Any]]

    @property
    def total_runs(self) -> int:
        return len(self.runs)

    @property
    def total_failures(self) -> int:
        return int(self.cells["failure_count"].sum())

    @property
    def failure_rate(self) -> float:
        return self.total_failures / self.total_runs


def aggregate_runs(runs: pd.DataFrame) -> pd.DataFrame:
    """Mean, min and max of every metric plus failure counts, per (q, epsilon)."""

    grouped = runs.groupby(["q", "epsilon"], sort=False)
    stats = grouped[list(METRICS)].agg(["mean", "min", "max"])
    stats.columns = [f"{metric}_{statistic}" for metric, statistic in stats.columns]
    stats["failure_count"] = grouped["contained"].apply(lambda contained: int((~contained.astype(bool)).sum()))
    stats["repetitions"] = grouped.size()
    return stats.reset_index()


def _theory_overlay(cells: pd.DataFrame, gamma: float) -> pd.DataFrame:
    overlay = cells.copy()
    overlay["oracle_call_bound"] = [oracle_call_bound(q, eps, gamma) for q, eps in zip(cells["q"], cells["epsilon"])]
    overlay["k_max"] = [depth_bound(q, eps) for q, eps in zip(cells["q"], cells["epsilon"])]
    overlay["T"] = [iteration_bound(q, eps) for q, eps in zip(cells["q"], cells["epsilon"])]
    return overlay


def run_sweep(config: ExperimentConfig) -> SweepSummary:
    """Execute every (q, epsilon, repetition) run and aggregate the results.

    Raises
    ------
    ConfigError
        If the configuration does not validate.
    PropertyViolation
        If any run breaks a guarantee, or if the sweep-wide containment
        failure rate exceeds ``gamma``.
    """

    config.validate()
    records: list[dict[str, Any]] = []

    for cell_index, (q, epsilon) in enumerate(config.cells()):
        schedule = derive_schedule(ScheduleInputs(q, epsilon, config.gamma))
        bound = oracle_call_bound(q, epsilon, config.gamma)
        failures = 0
        for repetition in range(config.repetitions):
            _, record = execute_run(config, schedule, bound, cell_index, repetition)
            failures += not record["contained"]
            records.append(record)
        logger.info(
            "Cell q=%s epsilon=%s: %s runs, N_i=%s, k_max=%s, %s containment failures",
            q,
            epsilon,
            config.repetitions,
            schedule.N_i,
            schedule.k_max,
            failures,
        )

    runs = pd.DataFrame.from_records([{k: v for k, v in record.items() if k != "trace"} for record in records])
    cells = _theory_overlay(aggregate_runs(runs), config.gamma)
    summary = SweepSummary(config=config, cells=cells, runs=runs, run_records=records)

    if summary.failure_rate > config.gamma:
        message = (
            f"Containment failure rate {summary.failure_rate:.4f} exceeds gamma={config.gamma} "
            f"({summary.total_failures} of {summary.total_runs} runs)"
        )
        logger.error(message)
        raise PropertyViolation([message], {"cells": cells.to_dict(orient="records")})
    return summary


# ----------------------------------------------------------------------
# Emission
# ----------------------------------------------------------------------
def metric_table(cells: pd.DataFrame, metric: str) -> pd.DataFrame:
    """Plotting table ``x y y-min y-max`` for one metric, one row per epsilon."""

    mean = cells[f"{metric}_mean"]
    return pd.DataFrame(
        {
            "x": cells["epsilon"].to_numpy(),
            "y": mean.to_numpy(),
            "y-min": (mean - cells[f"{metric}_min"]).to_numpy(),
            "y-max": (cells[f"{metric}_max"] - mean).to_numpy(),
        }
    )


def _write_table(frame: pd.DataFrame, path: Path) -> Path:
    try:
        frame.to_csv(path, sep=" ", index=False)
    except OSError as exc:
        raise OutputError(f"Unable to write {path}: {exc}") from exc
    logger.info("Wrote %s", path)
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def emit_dat(summary: SweepSummary, output_dir: str | Path | None = None) -> list[Path]:
    """Write ``q<q>_<metric>.dat`` tables and the ``sweep.json`` sidecar.

    Returns
    -------
    list[Path]
        Every file written, sidecar last.

    Raises
    ------
    OutputError
        If the directory or a file cannot be written.
    """

    directory = Path(output_dir) if output_dir is not None else summary.config.output_dir
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Unable to create output directory {directory}: {exc}") from exc

    written: list[Path] = []
    for q, cell_frame in summary.cells.groupby("q", sort=False):
        for metric, suffix in METRICS.items():
            written.append(_write_table(metric_table(cell_frame, metric), directory / f"q{q:g}_{suffix}.dat"))

    sidecar = directory / SIDECAR_NAME
    payload = {
        "config": summary.config.to_dict(),
        "cells": summary.cells.to_dict(orient="records"),
        "runs": summary.run_records,
    }
    try:
        sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    except OSError as exc:
        raise OutputError(f"Unable to write {sidecar}: {exc}") from exc
    logger.info("Wrote %s", sidecar)
    written.append(sidecar)
    return written


# ----------------------------------------------------------------------
# Theory tables
# ----------------------------------------------------------------------
def log_epsilon_grid(low: float, high: float, points: int) -> list[float]:
    """``points`` log-spaced values from ``low`` to ``high`` inclusive."""

    if points < 1:
        raise ConfigError(f"points must be at least 1, got {points}")
    if not 0 < low <= high:
        raise ConfigError(f"epsilon range must satisfy 0 < low <= high, got ({low}, {high})")
    return [float(value) for value in np.geomspace(low, high, points)]


def bounds_table(q: float, epsilons: Iterable[float], gamma: float) -> pd.DataFrame:
    """Theoretical curves for one policy over an epsilon grid."""

    rows = []
    for epsilon in epsilons:
        report = asdict(bound_report(q, epsilon, gamma))
        report["oracle_call_bound"] = report.pop("n_oracle_bound")
        rows.append({"epsilon": epsilon, **report})
    return pd.DataFrame.from_records(rows, columns=BOUNDS_COLUMNS)


def write_bounds_table(
    q: float,
    epsilons: Iterable[float],
    gamma: float,
    output_dir: str | Path,
) -> tuple[pd.DataFrame, Path]:
    """Tabulate :func:`bounds_table` and write it as ``bounds_q<q>.dat``."""

    directory = Path(output_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Unable to create output directory {directory}: {exc}") from exc
    table = bounds_table(q, epsilons, gamma)
    return table, _write_table(table, directory / f"bounds_q{q:g}.dat")


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "METRICS",
    "OutputError",
    "SweepSummary",
    "aggregate_runs",
    "bounds_table",
    "emit_dat",
    "execute_run",
    "log_epsilon_grid",
    "metric_table",
    "run_stream",
    "run_sweep",
    "single_run",
    "write_bounds_table",
]
