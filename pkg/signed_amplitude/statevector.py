"""Dense statevector engine for small registers.

Qubit 0 is the most significant axis of the amplitude tensor, so the basis
index of ``|x_0 x_1 ... x_{n-1}>`` is ``sum_j x_j 2^(n-1-j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin, sqrt

import numpy as np

from .constants import NORM_TOLERANCE

_SQRT2_INV = 1 / sqrt(2)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV


def ry(theta: float) -> np.ndarray:
    """Y rotation ``exp(-i theta Y / 2)``, mapping ``|0>`` to ``cos(theta/2)|0> + sin(theta/2)|1>``."""

    return np.array(
        [[cos(theta / 2), -sin(theta / 2)], [sin(theta / 2), cos(theta / 2)]],
        dtype=complex,
    )


@dataclass(frozen=True)
class Gate:
    """A single-qubit gate, optionally conditioned on one control qubit.

    ``control_value`` selects the control state that enables the gate: ``1``
    for an ordinary control, ``0`` for an anti-control.
    """

    name: str
    matrix: np.ndarray
    target: int
    control: int | None = None
    control_value: int = 1

    def dagger(self) -> Gate:
        return Gate(
            name=f"{self.name}†",
            matrix=self.matrix.conj().T,
            target=self.target,
            control=self.control,
            control_value=self.control_value,
        )


def _apply_matrix(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, 0)
    updated = np.tensordot(matrix, moved, axes=([1], [0]))
    return np.moveaxis(updated, 0, axis)


@dataclass(frozen=True)
class Statevector:
    """Normalized complex amplitudes over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError(
                f"Expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, n_qubits: int) -> Statevector:
        amplitudes = np.zeros(2**n_qubits, dtype=complex)
        amplitudes[0] = 1.0
        return cls(n_qubits, amplitudes)

    @property
    def dimension(self) -> int:
        return 2**self.n_qubits

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm_squared() - 1.0) <= tolerance

    def amplitude(self, index: int) -> complex:
        return complex(self.amplitudes[index])

    def probability(self, index: int) -> float:
        return float(abs(self.amplitudes[index]) ** 2)

    def apply_gate(self, gate: Gate) -> Statevector:
        """Return the state after ``gate``; the original is left untouched."""

        n = self.n_qubits
        tensor = self.amplitudes.reshape((2,) * n).copy()

        if gate.control is None:
            tensor = _apply_matrix(tensor, gate.matrix, gate.target)
        else:
            index: list[slice | int] = [slice(None)] * n
            index[gate.control] = gate.control_value
            # Fixing the control axis removes it, shifting later axes down by one.
            axis = gate.target - 1 if gate.target > gate.control else gate.target
            tensor[tuple(index)] = _apply_matrix(tensor[tuple(index)], gate.matrix, axis)

        return Statevector(n, tensor.reshape(-1))

    def reflect(self, index: int) -> Statevector:
        """Apply ``1 - 2|index><index|``."""

        amplitudes = self.amplitudes.copy()
        amplitudes[index] *= -1
        return Statevector(self.n_qubits, amplitudes)

    def scaled(self, factor: complex) -> Statevector:
        return Statevector(self.n_qubits, self.amplitudes * factor)
