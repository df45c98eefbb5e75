"""Static parameter schedule derived from (q, epsilon, gamma).

The schedule fixes, once per run, the per-iteration shot count, failure
probability and probability half-width, the first shift and the cap on the
amplification exponent.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

from .constants import ITERATION_GUARD_SLACK
from .theory import (
    InvalidParameterError,
    depth_bound,
    first_shift,
    iteration_bound,
    probability_half_width,
    validate_epsilon,
    validate_gamma,
    validate_policy,
)


@dataclass(frozen=True)
class ScheduleInputs:
    """User inputs of a run.

    Parameters
    ----------
    q: float
        Amplification policy; consecutive uncapped iterations amplify by at
        least this ratio.
    epsilon: float
        Target half-width of the final interval, in amplitude units.
    gamma: float
        Failure probability of the final interval.
    """

    q: float
    epsilon: float
    gamma: float

    def __post_init__(self) -> None:
        validate_policy(self.q)
        validate_epsilon(self.epsilon)
        validate_gamma(self.gamma)


@dataclass(frozen=True)
class Schedule:
    """Frozen per-run parameters.

    ``T`` stays real-valued: ``gamma_i = gamma / T`` uses it unrounded and runs
    are checked against the strict inequality ``I < T``.
    """

    q: float
    epsilon: float
    gamma: float
    eps_p: float
    T: float
    gamma_i: float
    N_i: int
    b1: float
    k_max: int
    eps_p_i: float

    @property
    def iteration_limit(self) -> int:
        """Hard stop for the estimation loop, ``ceil(T)`` plus a small slack."""

        return math.ceil(self.T) + ITERATION_GUARD_SLACK

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def derive_schedule(inputs: ScheduleInputs) -> Schedule:
    """Compute every schedule parameter from its closed form.

    Raises
    ------
    InvalidParameterError
        If the derived iteration bound ``T`` is not larger than one.
    """

    q, epsilon, gamma = inputs.q, inputs.epsilon, inputs.gamma

    eps_p = probability_half_width(q)
    T = iteration_bound(q, epsilon)
    if T <= 1:
        raise InvalidParameterError(
            f"Iteration bound T={T:.6g} <= 1 for q={q}, epsilon={epsilon}; "
            "choose a smaller epsilon or a smaller q"
        )

    gamma_i = gamma / T
    N_i = math.ceil(math.log(2 * T / gamma) / (2 * eps_p**2))
    eps_p_i = math.sqrt(math.log(2 / gamma_i) / (2 * N_i))

    return Schedule(
        q=q,
        epsilon=epsilon,
        gamma=gamma,
        eps_p=eps_p,
        T=T,
        gamma_i=gamma_i,
        N_i=N_i,
        b1=first_shift(q),
        k_max=depth_bound(q, epsilon),
        eps_p_i=eps_p_i,
    )
