import dataclasses
import math

import pytest

from signed_amplitude.schedule import ScheduleInputs, derive_schedule
from signed_amplitude.theory import InvalidParameterError


def test_q2_schedule_values():
    schedule = derive_schedule(ScheduleInputs(2, 1e-3, 0.05))
    assert schedule.N_i == 556
    assert schedule.k_max == 98
    assert schedule.T == pytest.approx(9.6175, abs=5e-4)
    assert schedule.gamma_i == pytest.approx(0.0051989, rel=1e-4)
    assert math.isclose(schedule.eps_p, (1 - math.sqrt(2) / 2) / 4, rel_tol=1e-12)
    assert math.isclose(schedule.b1, math.sqrt(2 - math.sqrt(2)) / 4, rel_tol=1e-12)


def test_per_iteration_half_width_never_exceeds_planned():
    for q in (2, 5, 10, 20):
        schedule = derive_schedule(ScheduleInputs(q, 1e-3, 0.05))
        assert 0 < schedule.eps_p_i <= schedule.eps_p


def test_large_epsilon_still_valid_for_q2():
    schedule = derive_schedule(ScheduleInputs(2, 0.25, 0.05))
    assert schedule.T == pytest.approx(math.log2(3), rel=1e-9)


def test_iteration_bound_of_one_or_less_is_rejected():
    with pytest.raises(InvalidParameterError):
        derive_schedule(ScheduleInputs(2, 0.4, 0.05))


@pytest.mark.parametrize(
    "q, epsilon, gamma",
    [
        (1.0, 1e-3, 0.05),
        (2.0, -1e-3, 0.05),
        (2.0, 1e-3, 1.5),
    ],
)
def test_inputs_validate_on_construction(q: float, epsilon: float, gamma: float):
    with pytest.raises(InvalidParameterError):
        ScheduleInputs(q, epsilon, gamma)


def test_iteration_limit_and_serialization():
    schedule = derive_schedule(ScheduleInputs(2, 1e-3, 0.05))
    assert schedule.iteration_limit == 12
    data = schedule.to_dict()
    assert data["N_i"] == 556
    assert set(data) == {field.name for field in dataclasses.fields(schedule)}


def test_schedule_monotone_in_policy():
    schedules = [derive_schedule(ScheduleInputs(q, 1e-3, 0.05)) for q in (2, 10, 20)]
    for smaller, larger in zip(schedules, schedules[1:]):
        assert larger.eps_p < smaller.eps_p
        assert larger.b1 < smaller.b1
        assert larger.N_i >= smaller.N_i


def test_depth_cap_stays_near_half_ratio():
    for epsilon in (1e-4, 1e-3, 1e-2, 0.1):
        schedule = derive_schedule(ScheduleInputs(2, epsilon, 0.05))
        anchor = 0.5 * math.asin(math.sqrt(2 * schedule.eps_p))
        step = math.asin(2 * epsilon)
        assert anchor - step <= schedule.k_max * step <= anchor + step


def test_derive_schedule_is_deterministic():
    inputs = ScheduleInputs(10, 3e-4, 0.01)
    assert derive_schedule(inputs) == derive_schedule(inputs)
