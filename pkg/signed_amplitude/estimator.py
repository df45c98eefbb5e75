"""Iterative signed amplitude estimation.

A run starts with two unamplified measurements at shifts ``+b1`` and ``-b1``,
whose difference fixes the sign of the amplitude and yields a first interval.
Each following iteration shifts the interval's lower bound to zero, amplifies
as much as the interval width allows, measures, and maps the probability
interval back to a narrower amplitude interval. The loop stops once the
half-width reaches the target epsilon.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

from .backends import OracleBackend, RandomStream
from .constants import FLOOR_TOLERANCE
from .interval import ConfidenceInterval
from .schedule import Schedule

logger = logging.getLogger(__name__)


class EstimationError(RuntimeError):
    """Raised when a run exceeds its iteration guard; carries the partial trace."""

    def __init__(self, message: str, iterations: list[IterationRecord]) -> None:
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True)
class IterationRecord:
    """Trace of one pass of the loop.

    The first iteration measures two shifted states; ``hits`` and ``p_hat``
    belong to the ``+b1`` state and ``hits_diff`` / ``p_hat_diff`` to the
    ``-b1`` state. ``shots`` is the shot count of each measurement.
    """

    index: int
    shift: float
    k: int
    shots: int
    hits: int
    p_hat: float
    p_min: float
    p_max: float
    interval: ConfidenceInterval
    grover_calls_cum: int
    a_calls_cum: int
    k_was_capped: bool
    hits_diff: int | None = None
    p_hat_diff: float | None = None

    def to_dict(self) -> dict[str, Any]:
        record = {
            "index": self.index,
            "shift": self.shift,
            "k": self.k,
            "shots": self.shots,
            "hits": self.hits,
            "p_hat": self.p_hat,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "interval": self.interval.to_dict(),
            "grover_calls_cum": self.grover_calls_cum,
            "a_calls_cum": self.a_calls_cum,
            "k_was_capped": self.k_was_capped,
        }
        if self.hits_diff is not None:
            record["hits_diff"] = self.hits_diff
            record["p_hat_diff"] = self.p_hat_diff
        return record


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run, in the backend's effective amplitude units."""

    estimate: float
    interval: ConfidenceInterval
    iterations: tuple[IterationRecord, ...]
    n_oracle_grover: int
    n_oracle_A: int
    converged: bool
    amplitude_scale: float = field(default=1.0)

    @property
    def iteration_count(self) -> int:
        return len(self.iterations)

    @property
    def k_last(self) -> int:
        return self.iterations[-1].k

    @property
    def rescaled_estimate(self) -> float:
        return self.estimate * self.amplitude_scale

    @property
    def rescaled_bounds(self) -> tuple[float, float]:
        return self.interval.low * self.amplitude_scale, self.interval.high * self.amplitude_scale

    def to_dict(self, include_trace: bool = True) -> dict[str, Any]:
        low, high = self.rescaled_bounds
        record: dict[str, Any] = {
            "estimate": self.rescaled_estimate,
            "low": low,
            "high": high,
            "effective_estimate": self.estimate,
            "effective_interval": self.interval.to_dict(),
            "amplitude_scale": self.amplitude_scale,
            "n_oracle_grover": self.n_oracle_grover,
            "n_oracle_A": self.n_oracle_A,
            "iterations": self.iteration_count,
            "k_last": self.k_last,
            "converged": self.converged,
        }
        if include_trace:
            record["trace"] = [iteration.to_dict() for iteration in self.iterations]
        return record


def _probability_bounds(p_hat: float, eps_p_i: float) -> tuple[float, float]:
    return max(p_hat - eps_p_i, 0.0), min(p_hat + eps_p_i, 1.0)


def estimate_from_probabilities(p_sum: float, p_diff: float, b1: float) -> float:
    """Recover ``a`` from ``(a + b1)^2 - (a - b1)^2 = 4 a b1``."""

    if b1 == 0:
        raise ValueError("First shift b1 must be non-zero")
    return (p_sum - p_diff) / (4 * b1)


def first_iteration(schedule: Schedule, backend: OracleBackend, rng: RandomStream) -> IterationRecord:
    """Measure the ``+b1`` and ``-b1`` states and build the first interval.

    Each state is measured with ``N_i`` shots, so the iteration costs ``2 N_i``
    calls to the oracle and no Grover calls.
    The interval is clipped to the backend's ``amplitude_domain``, which keeps
    the next shift ``-low`` inside the range the backend accepts.
    """

    b1 = schedule.b1
    if b1 == 0:
        raise ValueError("First shift b1 must be non-zero")
    shots = schedule.N_i

    hits_sum = backend.measure(b1, 0, shots, rng)
    hits_diff = backend.measure(-b1, 0, shots, rng)
    p_sum = hits_sum / shots
    p_diff = hits_diff / shots

    estimate = estimate_from_probabilities(p_sum, p_diff, b1)
    half_width = schedule.eps_p_i / abs(2 * b1)
    interval = ConfidenceInterval.clipped(
        estimate - half_width, estimate + half_width, backend.amplitude_domain
    )
    p_min, p_max = _probability_bounds(p_sum, schedule.eps_p_i)

    logger.debug(
        "iteration 1: b1=%.6f p_sum=%.6f p_diff=%.6f interval=[%.6f, %.6f]",
        b1,
        p_sum,
        p_diff,
        interval.low,
        interval.high,
    )
    return IterationRecord(
        index=1,
        shift=b1,
        k=0,
        shots=shots,
        hits=hits_sum,
        p_hat=p_sum,
        p_min=p_min,
        p_max=p_max,
        interval=interval,
        grover_calls_cum=0,
        a_calls_cum=2 * shots,
        k_was_capped=False,
        hits_diff=hits_diff,
        p_hat_diff=p_diff,
    )


def choose_shift(previous: ConfidenceInterval) -> float:
    """Shift that moves the previous lower bound exactly to zero."""

    return -previous.low


def choose_k(previous_half_width: float, k_max: int) -> tuple[int, bool]:
    """Largest exponent keeping the amplified confidence fan in ``[0, pi/2]``.

    Returns
    -------
    tuple[int, bool]
        The exponent, capped at ``k_max``, and whether the cap applied.

    Raises
    ------
    ValueError
        If the half-width is not positive or ``2 * half_width > 1``.
    """

    if previous_half_width <= 0:
        raise ValueError(f"Half-width must be positive, got {previous_half_width}")
    if 2 * previous_half_width > 1:
        raise ValueError(f"Half-width must not exceed 1/2, got {previous_half_width}")

    uncapped = math.floor(
        math.pi / (4 * math.asin(2 * previous_half_width)) - 0.5 + FLOOR_TOLERANCE
    )
    if uncapped > k_max:
        return k_max, True
    return uncapped, False


def refine_interval(
    p_min: float, p_max: float, k: int, shift: float, limit: float = 1.0
) -> ConfidenceInterval:
    """Undo the amplification and the shift of a probability interval.

    The result is clipped into ``[-limit, limit]``, the amplitude domain of
    the backend that produced the measurement.
    """

    amplification = 2 * k + 1
    low = math.sin(math.asin(math.sqrt(p_min)) / amplification) - shift
    high = math.sin(math.asin(math.sqrt(p_max)) / amplification) - shift
    return ConfidenceInterval.clipped(low, high, limit)


def amplified_iteration(
    index: int,
    previous: IterationRecord,
    schedule: Schedule,
    backend: OracleBackend,
    rng: RandomStream,
) -> IterationRecord:
    shift = choose_shift(previous.interval)
    k, capped = choose_k(previous.interval.half_width, schedule.k_max)
    shots = schedule.N_i

    hits = backend.measure(shift, k, shots, rng)
    p_hat = hits / shots
    p_min, p_max = _probability_bounds(p_hat, schedule.eps_p_i)
    interval = refine_interval(p_min, p_max, k, shift, backend.amplitude_domain)

    logger.debug(
        "iteration %s: shift=%.6f k=%s capped=%s p_hat=%.6f half_width=%.3e",
        index,
        shift,
        k,
        capped,
        p_hat,
        interval.half_width,
    )
    return IterationRecord(
        index=index,
        shift=shift,
        k=k,
        shots=shots,
        hits=hits,
        p_hat=p_hat,
        p_min=p_min,
        p_max=p_max,
        interval=interval,
        grover_calls_cum=previous.grover_calls_cum + shots * k,
        a_calls_cum=previous.a_calls_cum + shots * (2 * k + 1),
        k_was_capped=capped,
    )


def run(schedule: Schedule, backend: OracleBackend, rng: RandomStream) -> RunResult:
    """Run the estimation loop until the half-width reaches ``schedule.epsilon``.

    Raises
    ------
    EstimationError
        If the loop needs more than ``ceil(T) + 2`` iterations.
    """

    iterations = [first_iteration(schedule, backend, rng)]

    while iterations[-1].interval.half_width > schedule.epsilon:
        if len(iterations) >= schedule.iteration_limit:
            logger.warning(
                "Iteration guard hit after %s iterations (T=%.4f)", len(iterations), schedule.T
            )
            raise EstimationError(
                f"Run exceeded {schedule.iteration_limit} iterations (T={schedule.T:.4f})",
                iterations,
            )
        iterations.append(
            amplified_iteration(len(iterations) + 1, iterations[-1], schedule, backend, rng)
        )

    last = iterations[-1]
    return RunResult(
        estimate=last.interval.center,
        interval=last.interval,
        iterations=tuple(iterations),
        n_oracle_grover=last.grover_calls_cum,
        n_oracle_A=last.a_calls_cum,
        converged=last.interval.half_width <= schedule.epsilon,
        amplitude_scale=backend.amplitude_scale,
    )
