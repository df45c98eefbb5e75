"""signed_amplitude: iterative estimation of signed amplitudes with shifted oracles."""

from .backends import AnalyticBackend, BackendError, CircuitBackend, OracleBackend, make_backend
from .constants import DEFAULT_EPSILON_GRID, DEFAULT_GAMMA, DEFAULT_Q_GRID
from .estimator import EstimationError, IterationRecord, RunResult, run
from .harness import ConfigError, ExperimentConfig, OutputError, emit_dat, run_sweep
from .interval import ConfidenceInterval
from .schedule import Schedule, ScheduleInputs, derive_schedule
from .theory import (
    BoundReport,
    InvalidParameterError,
    bound_report,
    depth_bound,
    iqae_reference_curve,
    iteration_bound,
    oracle_call_bound,
)
from .verification import PropertyViolation, find_violations

__all__ = [
    "DEFAULT_EPSILON_GRID",
    "DEFAULT_GAMMA",
    "DEFAULT_Q_GRID",
    "AnalyticBackend",
    "BackendError",
    "BoundReport",
    "CircuitBackend",
    "ConfidenceInterval",
    "ConfigError",
    "EstimationError",
    "ExperimentConfig",
    "InvalidParameterError",
    "IterationRecord",
    "OracleBackend",
    "OutputError",
    "PropertyViolation",
    "RunResult",
    "Schedule",
    "ScheduleInputs",
    "bound_report",
    "depth_bound",
    "derive_schedule",
    "emit_dat",
    "find_violations",
    "iqae_reference_curve",
    "iteration_bound",
    "make_backend",
    "oracle_call_bound",
    "run",
    "run_sweep",
]
