"""Shared defaults for schedules, backends and experiment sweeps."""

DEFAULT_GAMMA: float = 0.05
"""Failure probability used by the benchmark sweeps (confidence level 0.95)."""

DEFAULT_Q_GRID: tuple[float, ...] = (2.0, 10.0, 20.0)
"""Amplification policies compared in the oracle-call benchmark."""

DEFAULT_EPSILON_GRID: tuple[float, ...] = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
"""Target half-widths of the oracle-call benchmark, coarse to fine."""

DEFAULT_REPETITIONS: int = 100
"""Independent seeded runs per (q, epsilon) cell."""

DEFAULT_AMPLITUDE: float = 0.3
"""True amplitude used when a sweep does not randomize it.

Kept away from zero and below 0.5 so the circuit backend's effective amplitude
(0.15) leaves every shift inside the ``|b| <= 1/2`` domain of the construction.
"""

AMPLITUDE_LIMIT: float = 0.5
"""Largest supported magnitude of the true amplitude."""

DEFAULT_N_QUBITS: int = 5
"""Register size of the circuit backend, ancilla included."""

MAX_N_QUBITS: int = 20
"""Largest register the dense statevector engine accepts."""

CIRCUIT_MIN_EPSILON: float = 1e-3
"""Finest target half-width a sweep may request from the circuit backend."""

ITERATION_GUARD_SLACK: int = 2
"""Iterations allowed past ``ceil(T)`` before a run is declared broken."""

NORM_TOLERANCE: float = 1e-12
"""Allowed deviation of a statevector's squared norm from one."""

FLOOR_TOLERANCE: float = 1e-9
"""Slack added before flooring amplification exponents that land on integers."""
