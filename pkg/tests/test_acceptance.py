"""End-to-end checks of the estimator's guarantees on seeded sweeps."""

import json
import math

import numpy as np
import pandas as pd
import pytest

from signed_amplitude.backends import build_shifted_oracle, circuit_probability
from signed_amplitude.constants import DEFAULT_EPSILON_GRID
from signed_amplitude.harness import ExperimentConfig, aggregate_runs, emit_dat, metric_table, run_sweep
from signed_amplitude.interval import ConfidenceInterval
from signed_amplitude.schedule import ScheduleInputs, derive_schedule
from signed_amplitude.theory import (
    amplitude_to_probability_interval,
    first_shift,
    iteration_bound,
    oracle_call_bound,
    probability_half_width,
)


@pytest.fixture(scope="module")
def randomized_sweep(tmp_path_factory):
    config = ExperimentConfig(
        epsilon_grid=(1e-3,),
        q_grid=(2.0,),
        repetitions=500,
        amplitude_range=(-0.45, 0.45),
        seed=20240601,
        trace=True,
        output_dir=tmp_path_factory.mktemp("randomized"),
    )
    return run_sweep(config)


@pytest.fixture(scope="module")
def full_grid_sweep(tmp_path_factory):
    config = ExperimentConfig(seed=5, output_dir=tmp_path_factory.mktemp("full_grid"))
    return run_sweep(config)


def test_containment_rate(randomized_sweep):
    failures = (~randomized_sweep.runs["contained"]).sum()
    assert failures / randomized_sweep.total_runs <= 0.05


def test_oracle_budget_respected(randomized_sweep):
    bound = oracle_call_bound(2, 1e-3, 0.05)
    assert bound == pytest.approx(1.79e5, rel=1e-2)
    assert (randomized_sweep.runs["n_oracle_grover"] < bound).all()


def test_depth_and_iteration_bounds(randomized_sweep):
    T = iteration_bound(2, 1e-3)
    assert T == pytest.approx(9.6175, abs=5e-4)
    for record in randomized_sweep.run_records:
        assert max(step["k"] for step in record["trace"]) <= 98
        assert len(record["trace"]) < T


def test_amplification_policy(randomized_sweep):
    for record in randomized_sweep.run_records:
        trace = record["trace"]
        for previous, current in zip(trace, trace[1:]):
            if previous["k_was_capped"] or current["k_was_capped"]:
                continue
            assert (2 * current["k"] + 1) / (2 * previous["k"] + 1) >= 2


@pytest.mark.parametrize("amplitude", [0.1, -0.1])
def test_sign_recovery(tmp_path, amplitude: float):
    config = ExperimentConfig(
        epsilon_grid=(1e-2,),
        q_grid=(2.0,),
        repetitions=100,
        amplitude=amplitude,
        seed=77,
        output_dir=tmp_path,
    )
    estimates = run_sweep(config).runs["estimate"]
    assert (np.sign(estimates) == np.sign(amplitude)).sum() >= 95


def test_oracle_calls_scale_as_inverse_epsilon(tmp_path):
    epsilons = (1e-2, 1e-3, 1e-4)
    config = ExperimentConfig(epsilon_grid=epsilons, q_grid=(2.0,), repetitions=100, seed=3, output_dir=tmp_path)
    cells = run_sweep(config).cells
    means = cells["n_oracle_grover_mean"].to_numpy()
    slope, _ = np.polyfit(np.log(epsilons), np.log(means), 1)
    # asymptotically -1; rounding of k at finite epsilon can push the fit past it
    assert -1.35 <= slope <= -0.90
    assert (cells["n_oracle_grover_mean"] < cells["oracle_call_bound"]).all()


def test_full_grid_respects_bounds(full_grid_sweep):
    cells = full_grid_sweep.cells
    assert len(cells) == 15
    assert (cells["n_oracle_grover_mean"] <= cells["n_oracle_grover_max"]).all()
    assert (cells["n_oracle_grover_max"] < cells["oracle_call_bound"]).all()
    assert full_grid_sweep.failure_rate <= 0.05


def test_plateau_for_q20(tmp_path):
    epsilons = (0.05, 0.04, 0.02, 0.01, 0.005, 0.003)
    config = ExperimentConfig(epsilon_grid=epsilons, q_grid=(20.0,), repetitions=20, seed=11, output_dir=tmp_path)
    cells = run_sweep(config).cells.set_index("epsilon")

    # first half-width is about sin(pi/44)/2, below 0.04 and above 0.02
    assert first_shift(20) == pytest.approx(0.5 * math.sin(math.pi / 44))
    for epsilon in (0.05, 0.04):
        assert cells.loc[epsilon, "iterations_max"] == 1
        assert cells.loc[epsilon, "k_last_max"] == 0
    for epsilon, k_max in zip((0.02, 0.01, 0.005, 0.003), (1, 2, 4, 6)):
        schedule = derive_schedule(ScheduleInputs(20, epsilon, 0.05))
        assert schedule.k_max == k_max
        assert cells.loc[epsilon, "iterations_min"] == cells.loc[epsilon, "iterations_max"] == 2
        assert cells.loc[epsilon, "k_last_min"] == cells.loc[epsilon, "k_last_max"] == min(k_max, 10)


def test_plateau_for_q20_holds_once_depth_cap_exceeds_ten(tmp_path):
    epsilons = (1e-3, 5e-4, 2e-4)
    config = ExperimentConfig(epsilon_grid=epsilons, q_grid=(20.0,), repetitions=20, seed=13, output_dir=tmp_path)
    cells = run_sweep(config).cells.set_index("epsilon")

    for epsilon in epsilons:
        assert derive_schedule(ScheduleInputs(20, epsilon, 0.05)).k_max > 10
        assert cells.loc[epsilon, "iterations_min"] == cells.loc[epsilon, "iterations_max"] == 2
        assert cells.loc[epsilon, "k_last_min"] == cells.loc[epsilon, "k_last_max"] == 10


@pytest.mark.parametrize("a", [-0.9, -0.3, 0.0, 0.4, 1.0])
@pytest.mark.parametrize("b", [-0.25, 0.0, 0.1, 0.5])
def test_circuit_matches_closed_form(a: float, b: float):
    for k in range(6):
        expected = math.sin((2 * k + 1) * math.asin(a / 2 + b)) ** 2
        assert abs(circuit_probability(a, b, k, n_qubits=3) - expected) <= 1e-10


def test_norm_preserved_after_every_gate():
    circuit = build_shifted_oracle(0.37, -0.2, n_qubits=5)
    state = circuit.prepare()
    for _ in range(3):
        for gate in circuit.gates:
            state = state.apply_gate(gate)
            assert state.is_normalized(1e-12)
        for gate in reversed(circuit.gates):
            state = state.apply_gate(gate.dagger())
            assert state.is_normalized(1e-12)


def test_probability_interval_property_suite():
    rng = np.random.default_rng(2718)
    for _ in range(10_000):
        low, high = np.sort(rng.uniform(-0.5, 0.5, 2))
        amplitude = rng.uniform(low, high)
        p_low, p_high = amplitude_to_probability_interval(ConfidenceInterval(low, high))
        assert p_low <= amplitude**2 <= p_high
        assert p_high - p_low <= high - low + 1e-15


@pytest.mark.parametrize("q", [2.0, 10.0, 20.0])
def test_schedule_golden_values(q: float):
    epsilon, gamma = 1e-3, 0.05
    schedule = derive_schedule(ScheduleInputs(q, epsilon, gamma))

    angle = math.pi / (2 * (q + 2))
    eps_p = 0.5 * math.sin(angle) ** 2
    T = math.log(q**2 * math.asin(math.sqrt(2 * eps_p)) / math.asin(2 * epsilon)) / math.log(q)
    N_i = math.ceil(math.log(2 * T / gamma) / (2 * eps_p**2))

    assert math.isclose(schedule.eps_p, eps_p, rel_tol=1e-12)
    assert math.isclose(schedule.eps_p, probability_half_width(q), rel_tol=1e-12)
    assert math.isclose(schedule.T, T, rel_tol=1e-12)
    assert math.isclose(schedule.gamma_i, gamma / T, rel_tol=1e-12)
    assert math.isclose(schedule.b1, 0.5 * math.sin(angle), rel_tol=1e-12)
    assert schedule.N_i == N_i
    assert math.isclose(schedule.eps_p_i, math.sqrt(math.log(2 * T / gamma) / (2 * N_i)), rel_tol=1e-12)
    if q == 2.0:
        assert schedule.N_i == 556


def test_dat_rows_recomputed_from_sidecar(tmp_path):
    config = ExperimentConfig(
        epsilon_grid=DEFAULT_EPSILON_GRID[:3], q_grid=(2.0, 10.0), repetitions=5, seed=99, output_dir=tmp_path
    )
    emit_dat(run_sweep(config))
    runs = pd.DataFrame.from_records(json.loads((tmp_path / "sweep.json").read_text())["runs"])
    cells = aggregate_runs(runs)
    for q in (2.0, 10.0):
        expected = metric_table(cells[cells["q"] == q], "n_oracle_grover")
        written = pd.read_csv(tmp_path / f"q{q:g}_oracle_calls.dat", sep=" ", float_precision="round_trip")
        pd.testing.assert_frame_equal(written, expected, check_dtype=False, check_exact=True)


def test_outputs_byte_identical_for_equal_seed(tmp_path):
    config = ExperimentConfig(epsilon_grid=(1e-2, 1e-3), q_grid=(2.0,), repetitions=3, seed=1)
    first = emit_dat(run_sweep(config), tmp_path / "first")
    second = emit_dat(run_sweep(config), tmp_path / "second")
    for left, right in zip(first, second):
        assert left.read_bytes() == right.read_bytes()
