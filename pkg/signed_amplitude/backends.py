"""Measurement oracles: an analytic sampler and a statevector circuit.

Both backends answer the same request: prepare the oracle shifted by ``b``,
apply the Grover operator ``k`` times, measure ``shots`` times and count the
outcomes equal to the marked state. Hits are drawn by :func:`sample_hits`, so
two backends with the same probability and the same random stream return the
same count.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .constants import AMPLITUDE_LIMIT, DEFAULT_N_QUBITS, MAX_N_QUBITS
from .statevector import HADAMARD, Gate, Statevector, ry

logger = logging.getLogger(__name__)

RandomStream = np.random.Generator

ANCILLA_QUBIT = 0
DATA_QUBIT = 1


class BackendError(ValueError):
    """Raised when a backend request is outside what the oracle can realize."""


def _validate_request(k: int, shots: int) -> None:
    if k < 0:
        raise BackendError(f"Amplification exponent k must be non-negative, got {k}")
    if shots < 1:
        raise BackendError(f"shots must be at least 1, got {shots}")


def sample_hits(probability: float, shots: int, rng: RandomStream) -> int:
    """Count how many of ``shots`` uniform draws fall below ``probability``."""

    if shots < 1:
        raise BackendError(f"shots must be at least 1, got {shots}")
    if not -1e-12 <= probability <= 1 + 1e-12:
        raise BackendError(f"Probability must lie in [0, 1], got {probability}")
    probability = min(max(probability, 0.0), 1.0)
    return int(np.count_nonzero(rng.random(shots) < probability))


def amplified_probability(amplitude: float, k: int) -> float:
    """Probability ``sin^2((2k+1) arcsin(amplitude))`` of the marked state."""

    if abs(amplitude) > 1:
        raise BackendError(f"Shifted amplitude must lie in [-1, 1], got {amplitude}")
    return math.sin((2 * k + 1) * math.asin(amplitude)) ** 2


def analytic_measure(a: float, b: float, k: int, shots: int, rng: RandomStream) -> int:
    """Sample hits from the closed-form amplified probability of ``a + b``."""

    _validate_request(k, shots)
    return sample_hits(amplified_probability(a + b, k), shots, rng)


# ----------------------------------------------------------------------
# Shifted-oracle circuit
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ShiftedOracleCircuit:
    """Circuit placing ``(a + cos(theta_b)) / 2`` on ``|0)|0>``.

    The ancilla (qubit 0) is put in superposition, the base oracle acts on the
    data qubit when the ancilla is ``|1)``, a y-rotation by ``theta_b`` acts
    when it is ``|0)``, and a final Hadamard recombines both branches. The
    remaining register qubits stay in ``|0>``.
    """

    base_amplitude: float
    shift: float
    theta_b: float
    n_qubits: int
    gates: tuple[Gate, ...]

    marked_index: int = 0

    @property
    def sign_partner_index(self) -> int:
        """Basis index of ``|1)|0>``, carrying ``(-a + cos(theta_b)) / 2``."""

        return 1 << (self.n_qubits - 1)

    @property
    def effective_amplitude(self) -> float:
        return self.base_amplitude / 2 + self.shift

    def apply(self, state: Statevector) -> Statevector:
        self._check_dimension(state)
        for gate in self.gates:
            state = state.apply_gate(gate)
        return state

    def apply_inverse(self, state: Statevector) -> Statevector:
        self._check_dimension(state)
        for gate in reversed(self.gates):
            state = state.apply_gate(gate.dagger())
        return state

    def prepare(self) -> Statevector:
        """Return ``A_b |0...0>``."""

        return self.apply(Statevector.zero(self.n_qubits))

    def unitary(self) -> np.ndarray:
        """Dense matrix of the oracle, built column by column."""

        basis = np.eye(Statevector.zero(self.n_qubits).dimension, dtype=complex)
        return np.column_stack(
            [self.apply(Statevector(self.n_qubits, column)).amplitudes for column in basis]
        )

    def _check_dimension(self, state: Statevector) -> None:
        if state.n_qubits != self.n_qubits:
            raise BackendError(
                f"Circuit acts on {self.n_qubits} qubits but the state has {state.n_qubits}"
            )


def build_shifted_oracle(a: float, b: float, n_qubits: int = DEFAULT_N_QUBITS) -> ShiftedOracleCircuit:
    """Build the oracle whose marked amplitude is ``a / 2 + b``.

    Parameters
    ----------
    a: float
        Amplitude prepared by the base oracle on its data qubit.
    b: float
        Shift in effective units; ``theta_b = arccos(2 b)``.
    n_qubits: int, optional
        Register size including the ancilla.

    Raises
    ------
    BackendError
        If ``|b| > 1/2``, ``|a| > 1`` or the register size is unsupported.
    """

    if abs(b) > 0.5:
        raise BackendError(f"Circuit shift must satisfy |b| <= 1/2, got {b}")
    if abs(a) > 1:
        raise BackendError(f"Base amplitude must lie in [-1, 1], got {a}")
    if not 2 <= n_qubits <= MAX_N_QUBITS:
        raise BackendError(f"n_qubits must lie in [2, {MAX_N_QUBITS}], got {n_qubits}")

    theta_b = math.acos(2 * b)
    gates = (
        Gate("H", HADAMARD, ANCILLA_QUBIT),
        Gate("G", ry(2 * math.acos(a)), DATA_QUBIT, control=ANCILLA_QUBIT, control_value=1),
        Gate("Ry(theta_b)", ry(2 * theta_b), DATA_QUBIT, control=ANCILLA_QUBIT, control_value=0),
        Gate("H", HADAMARD, ANCILLA_QUBIT),
    )
    logger.debug("Built shifted oracle a=%s b=%s theta_b=%s on %s qubits", a, b, theta_b, n_qubits)
    return ShiftedOracleCircuit(base_amplitude=a, shift=b, theta_b=theta_b, n_qubits=n_qubits, gates=gates)


def apply_grover(circuit: ShiftedOracleCircuit, state: Statevector, k: int) -> Statevector:
    """Apply ``G = -A_b R_0 A_b^dagger R_phi`` to ``state`` ``k`` times.

    Both reflections are about the all-zero basis state, which is also the
    marked state ``|0)|0>``. The global ``-1`` is applied literally.
    """

    circuit._check_dimension(state)
    if k < 0:
        raise BackendError(f"Amplification exponent k must be non-negative, got {k}")

    for _ in range(k):
        state = state.reflect(circuit.marked_index)
        state = circuit.apply_inverse(state)
        state = state.reflect(0)
        state = circuit.apply(state)
        state = state.scaled(-1)
    return state


def circuit_probability(a: float, b: float, k: int, n_qubits: int = DEFAULT_N_QUBITS) -> float:
    """Exact probability of the marked state after ``k`` Grover applications."""

    circuit = build_shifted_oracle(a, b, n_qubits)
    state = apply_grover(circuit, circuit.prepare(), k)
    return state.probability(circuit.marked_index)


def circuit_measure(
    a: float,
    b: float,
    k: int,
    shots: int,
    rng: RandomStream,
    n_qubits: int = DEFAULT_N_QUBITS,
) -> int:
    """Sample hits using the probability read off the simulated statevector."""

    _validate_request(k, shots)
    return sample_hits(circuit_probability(a, b, k, n_qubits), shots, rng)


# ----------------------------------------------------------------------
# Backend objects
# ----------------------------------------------------------------------
class OracleBackend(ABC):
    """Measurement oracle hiding a true amplitude.

    ``effective_amplitude`` is the quantity the estimator actually sees;
    multiply estimates by ``amplitude_scale`` to return to ``amplitude``.
    Every effective amplitude the backend can encode lies in
    ``[-amplitude_domain, amplitude_domain]``, and so does every shift it accepts.
    """

    name: str = ""
    amplitude_scale: float = 1.0
    amplitude_domain: float = 1.0

    def __init__(self, amplitude: float) -> None:
        if abs(amplitude) > AMPLITUDE_LIMIT:
            raise BackendError(
                f"Amplitude must lie in [-{AMPLITUDE_LIMIT}, {AMPLITUDE_LIMIT}], got {amplitude}"
            )
        self.amplitude = amplitude

    @property
    def effective_amplitude(self) -> float:
        return self.amplitude / self.amplitude_scale

    @abstractmethod
    def probability(self, shift: float, k: int) -> float:
        """Exact probability of the marked state for this request."""

    @abstractmethod
    def measure(self, shift: float, k: int, shots: int, rng: RandomStream) -> int:
        """Number of marked outcomes in ``shots`` measurements."""

    def __repr__(self) -> str:  # pragma: no cover - convenience
        return f"{type(self).__name__}(amplitude={self.amplitude!r})"


class AnalyticBackend(OracleBackend):
    """Samples the closed-form amplified probability directly."""

    name = "analytic"

    def probability(self, shift: float, k: int) -> float:
        return amplified_probability(self.amplitude + shift, k)

    def measure(self, shift: float, k: int, shots: int, rng: RandomStream) -> int:
        return analytic_measure(self.amplitude, shift, k, shots, rng)


class CircuitBackend(OracleBackend):
    """Simulates the shifted-oracle circuit; estimates live in ``a / 2`` units."""

    name = "circuit"
    amplitude_scale = 2.0
    # shifts are cos(theta_b) / 2
    amplitude_domain = 0.5

    def __init__(self, amplitude: float, n_qubits: int = DEFAULT_N_QUBITS) -> None:
        super().__init__(amplitude)
        if not 2 <= n_qubits <= MAX_N_QUBITS:
            raise BackendError(f"n_qubits must lie in [2, {MAX_N_QUBITS}], got {n_qubits}")
        self.n_qubits = n_qubits

    def probability(self, shift: float, k: int) -> float:
        return circuit_probability(self.amplitude, shift, k, self.n_qubits)

    def measure(self, shift: float, k: int, shots: int, rng: RandomStream) -> int:
        return circuit_measure(self.amplitude, shift, k, shots, rng, self.n_qubits)


BACKENDS: dict[str, type[OracleBackend]] = {
    AnalyticBackend.name: AnalyticBackend,
    CircuitBackend.name: CircuitBackend,
}


def make_backend(kind: str, amplitude: float, n_qubits: int = DEFAULT_N_QUBITS) -> OracleBackend:
    """Instantiate a backend by name (``"analytic"`` or ``"circuit"``)."""

    if kind == CircuitBackend.name:
        return CircuitBackend(amplitude, n_qubits)
    if kind == AnalyticBackend.name:
        return AnalyticBackend(amplitude)
    raise BackendError(f"Unknown backend {kind!r}; expected one of {sorted(BACKENDS)}")
