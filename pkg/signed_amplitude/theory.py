"""Closed-form bounds and reference curves for signed amplitude estimation.

Every quantity here is a pure function of the amplification policy ``q``, the
target half-width ``epsilon`` and the failure probability ``gamma``. The
schedule module reuses :func:`probability_half_width`, :func:`first_shift`,
:func:`iteration_bound` and :func:`depth_bound` so both modules agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import AMPLITUDE_LIMIT
from .interval import ConfidenceInterval


class InvalidParameterError(ValueError):
    """Raised when (q, epsilon, gamma) fall outside their admissible range."""


@dataclass(frozen=True)
class BoundReport:
    """Theoretical quantities for one (q, epsilon, gamma) triple."""

    k_max: int
    T: float
    n_oracle_bound: float
    classical_cost: float
    quadratic_cost: float
    iqae_reference: float


def validate_policy(q: float) -> None:
    if not q > 1:
        raise InvalidParameterError(f"Amplification policy q must exceed 1, got {q}")


def validate_epsilon(epsilon: float) -> None:
    if not 0 < epsilon < 0.5:
        raise InvalidParameterError(f"epsilon must lie in (0, 1/2), got {epsilon}")


def validate_gamma(gamma: float) -> None:
    if not 0 < gamma < 1:
        raise InvalidParameterError(f"gamma must lie in (0, 1), got {gamma}")


def _base_angle(q: float) -> float:
    return math.pi / (2 * (q + 2))


def probability_half_width(q: float) -> float:
    """Planned per-iteration probability half-width ``1/2 sin^2(pi / (2(q+2)))``."""

    validate_policy(q)
    return 0.5 * math.sin(_base_angle(q)) ** 2


def first_shift(q: float) -> float:
    """Shift of the first, unamplified iteration ``1/2 sin(pi / (2(q+2)))``."""

    validate_policy(q)
    return 0.5 * math.sin(_base_angle(q))


def _angle_ratio(q: float, epsilon: float) -> float:
    eps_p = probability_half_width(q)
    return math.asin(math.sqrt(2 * eps_p)) / math.asin(2 * epsilon)


def iteration_bound(q: float, epsilon: float) -> float:
    """Real-valued bound ``T`` on the number of iterations.

    ``T = log_q(q^2 arcsin(sqrt(2 eps_p)) / arcsin(2 epsilon))``. The value is
    not rounded; a run performing ``I`` iterations satisfies ``I < T``.
    """

    validate_policy(q)
    validate_epsilon(epsilon)
    return math.log(q**2 * _angle_ratio(q, epsilon), q)


def depth_bound(q: float, epsilon: float) -> int:
    """Cap on the amplification exponent, ``ceil(ratio / 2 - 1/2)``."""

    validate_policy(q)
    validate_epsilon(epsilon)
    return math.ceil(0.5 * _angle_ratio(q, epsilon) - 0.5)


def oracle_call_bound(q: float, epsilon: float, gamma: float) -> float:
    """Upper bound on the Grover-oracle calls ``sum_i N_i k_i`` of one run.

    Parameters
    ----------
    q: float
        Amplification policy, ``q > 1``.
    epsilon: float
        Target half-width in amplitude units, ``0 < epsilon < 1/2``.
    gamma: float
        Failure probability, ``0 < gamma < 1``.

    Returns
    -------
    float
        The bound, evaluated literally from its closed form.

    Raises
    ------
    InvalidParameterError
        If an input is out of range or the iteration budget is not positive.
    """

    validate_policy(q)
    validate_epsilon(epsilon)
    validate_gamma(gamma)

    angle = _base_angle(q)
    amplification = math.pi / (2 * (q + 2) * math.asin(2 * epsilon))
    budget = math.log(q**2 * amplification, q)
    if budget <= 0:
        raise InvalidParameterError(
            f"No iteration budget for q={q}, epsilon={epsilon}: log_q term is {budget}"
        )

    shots_factor = math.log(2 * math.sqrt(math.e) * budget / gamma) / math.sin(angle) ** 4
    return shots_factor * (amplification + 2) * (1 + q / (q - 1))


def iqae_reference_curve(epsilon: float, gamma: float) -> float:
    """Reference oracle-call curve ``(50/epsilon) ln((2/gamma) log2(pi/(4 epsilon)))``.

    Plotted for comparison only; it is not a bound this package guarantees.
    """

    if not 0 < epsilon < math.pi / 4:
        raise InvalidParameterError(f"epsilon must lie in (0, pi/4), got {epsilon}")
    validate_gamma(gamma)
    return (50 / epsilon) * math.log((2 / gamma) * math.log2(math.pi / (4 * epsilon)))


def classical_cost(epsilon: float) -> float:
    """Unamplified sampling cost ``1/epsilon^2``."""

    return 1 / epsilon**2


def quadratic_cost(epsilon: float) -> float:
    """Cost of an exact quadratic speedup, ``1/epsilon``."""

    return 1 / epsilon


def bound_report(q: float, epsilon: float, gamma: float) -> BoundReport:
    return BoundReport(
        k_max=depth_bound(q, epsilon),
        T=iteration_bound(q, epsilon),
        n_oracle_bound=oracle_call_bound(q, epsilon, gamma),
        classical_cost=classical_cost(epsilon),
        quadratic_cost=quadratic_cost(epsilon),
        iqae_reference=iqae_reference_curve(epsilon, gamma),
    )


def amplitude_to_probability_interval(interval: ConfidenceInterval) -> tuple[float, float]:
    """Convert an amplitude interval into an interval for ``a^2``.

    Both bounds non-negative map to ``(low^2, high^2)``, both non-positive to
    ``(high^2, low^2)``, and an interval straddling zero to
    ``(0, max(low^2, high^2))``. With ``|bounds| <= 1/2`` the resulting width
    never exceeds the amplitude interval's width.

    Raises
    ------
    InvalidParameterError
        If a bound lies outside ``[-1/2, 1/2]``.
    """

    low, high = interval.low, interval.high
    if abs(low) > AMPLITUDE_LIMIT or abs(high) > AMPLITUDE_LIMIT:
        raise InvalidParameterError(
            f"Interval bounds must lie in [-{AMPLITUDE_LIMIT}, {AMPLITUDE_LIMIT}], got [{low}, {high}]"
        )

    if low >= 0:
        return low**2, high**2
    if high <= 0:
        return high**2, low**2
    return 0.0, max(low**2, high**2)
