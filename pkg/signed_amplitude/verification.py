"""Per-run checks of the guarantees every estimation run must satisfy."""

from __future__ import annotations

from typing import Any

from .estimator import RunResult
from .schedule import Schedule


class PropertyViolation(AssertionError):
    """Raised when a run breaks a guaranteed property."""

    def __init__(self, violations: list[str], record: dict[str, Any] | None = None) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations
        self.record = record or {}


def find_violations(result: RunResult, schedule: Schedule, oracle_bound: float) -> list[str]:
    """List every deterministic property the run breaks.

    Checked: amplification ratio on uncapped consecutive pairs, the depth cap,
    the iteration bound, the oracle-call budget, the oracle-call identity and
    interval nesting. Containment of the true amplitude is probabilistic and
    is reported by :func:`contains_amplitude` instead.
    """

    violations: list[str] = []
    iterations = result.iterations
    q = schedule.q

    for previous, current in zip(iterations, iterations[1:]):
        if previous.k_was_capped or current.k_was_capped:
            continue
        ratio = (2 * current.k + 1) / (2 * previous.k + 1)
        if ratio < q:
            violations.append(
                f"amplification ratio {ratio:.4f} < q={q} between iterations "
                f"{previous.index} and {current.index}"
            )

    deepest = max(record.k for record in iterations)
    if deepest > schedule.k_max:
        violations.append(f"k={deepest} exceeds k_max={schedule.k_max}")

    if result.converged and not result.iteration_count < schedule.T:
        violations.append(f"I={result.iteration_count} is not below T={schedule.T:.4f}")

    if not result.n_oracle_grover < oracle_bound:
        violations.append(f"Grover calls {result.n_oracle_grover} reach the bound {oracle_bound:.1f}")

    expected_a_calls = 2 * schedule.N_i + sum(
        record.shots * (2 * record.k + 1) for record in iterations[1:]
    )
    if result.n_oracle_A != expected_a_calls:
        violations.append(f"A calls {result.n_oracle_A} differ from the trace total {expected_a_calls}")

    for previous, current in zip(iterations, iterations[1:]):
        clamped = current.p_min == 0.0 or current.p_max == 1.0
        if current.k_was_capped or clamped:
            continue
        if not current.interval.half_width < previous.interval.half_width:
            violations.append(
                f"interval of iteration {current.index} does not shrink "
                f"({current.interval.half_width:.3e} >= {previous.interval.half_width:.3e})"
            )

    if result.converged and result.interval.half_width > schedule.epsilon:
        violations.append(
            f"converged run has half-width {result.interval.half_width:.3e} > epsilon={schedule.epsilon}"
        )

    return violations


def contains_amplitude(result: RunResult, effective_amplitude: float) -> bool:
    """Whether the final interval holds the amplitude the backend encodes."""

    return result.interval.contains(effective_amplitude)


def verify_run(result: RunResult, schedule: Schedule, oracle_bound: float) -> None:
    """Raise :class:`PropertyViolation` if :func:`find_violations` finds anything."""

    violations = find_violations(result, schedule, oracle_bound)
    if violations:
        raise PropertyViolation(violations, result.to_dict())
