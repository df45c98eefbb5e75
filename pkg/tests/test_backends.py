import math

import numpy as np
import pytest

from signed_amplitude.backends import (
    AnalyticBackend,
    BackendError,
    CircuitBackend,
    amplified_probability,
    analytic_measure,
    apply_grover,
    build_shifted_oracle,
    circuit_measure,
    circuit_probability,
    make_backend,
    sample_hits,
)
from signed_amplitude.statevector import Statevector


def test_analytic_probability_anchor():
    assert amplified_probability(0.3, 1) == pytest.approx(0.627264, rel=1e-9)


def test_circuit_probability_anchor():
    # effective amplitude 0.15 + 0.05
    assert circuit_probability(0.3, 0.05, 3) == pytest.approx(math.sin(7 * math.asin(0.2)) ** 2, abs=1e-12)
    assert circuit_probability(0.3, 0.05, 3) == pytest.approx(0.974211, abs=1e-6)


def test_prepared_state_amplitudes():
    circuit = build_shifted_oracle(0.3, 0.1, n_qubits=4)
    state = circuit.prepare()
    assert state.amplitude(circuit.marked_index).real == pytest.approx(0.15 + 0.1)
    assert state.amplitude(circuit.sign_partner_index).real == pytest.approx(-0.15 + 0.1)
    assert circuit.effective_amplitude == pytest.approx(0.25)


def test_oracle_unitary_is_unitary():
    unitary = build_shifted_oracle(-0.4, 0.2, n_qubits=3).unitary()
    assert np.allclose(unitary.conj().T @ unitary, np.eye(8), atol=1e-12)


def test_grover_matches_dense_operator():
    circuit = build_shifted_oracle(0.3, -0.1, n_qubits=3)
    unitary = circuit.unitary()
    reflection = np.eye(8)
    reflection[0, 0] = -1
    grover = -unitary @ reflection @ unitary.conj().T @ reflection

    state = circuit.prepare()
    expected = grover @ grover @ state.amplitudes
    assert np.allclose(apply_grover(circuit, state, 2).amplitudes, expected, atol=1e-12)


def test_circuit_rejects_out_of_domain_requests():
    with pytest.raises(BackendError):
        build_shifted_oracle(0.3, 0.6)
    with pytest.raises(BackendError):
        build_shifted_oracle(0.3, 0.1, n_qubits=1)
    with pytest.raises(BackendError):
        apply_grover(build_shifted_oracle(0.3, 0.1, n_qubits=3), Statevector.zero(4), 1)


def test_sample_hits_edges_and_validation():
    rng = np.random.default_rng(1)
    assert sample_hits(0.0, 100, rng) == 0
    assert sample_hits(1.0, 100, rng) == 100
    with pytest.raises(BackendError):
        sample_hits(1.5, 10, rng)
    with pytest.raises(BackendError):
        sample_hits(0.5, 0, rng)


def test_sample_hits_is_unbiased():
    hits = sample_hits(0.3, 200_000, np.random.default_rng(7))
    assert hits / 200_000 == pytest.approx(0.3, abs=5e-3)


def test_analytic_measure_rejects_bad_requests():
    rng = np.random.default_rng(0)
    with pytest.raises(BackendError):
        analytic_measure(0.5, 0.6, 0, 10, rng)
    with pytest.raises(BackendError):
        analytic_measure(0.1, 0.1, -1, 10, rng)


def test_backends_share_counts_on_equal_streams():
    analytic = AnalyticBackend(0.15)
    circuit = CircuitBackend(0.3, n_qubits=3)
    for shift, k in [(0.05, 0), (0.05, 2), (-0.1, 4)]:
        first = analytic.measure(shift, k, 5_000, np.random.default_rng(11))
        second = circuit.measure(shift, k, 5_000, np.random.default_rng(11))
        assert first == second


def test_amplitude_scale_and_factory():
    circuit = make_backend("circuit", 0.3, n_qubits=4)
    assert isinstance(circuit, CircuitBackend)
    assert circuit.effective_amplitude == pytest.approx(0.15)
    assert make_backend("analytic", 0.3).effective_amplitude == pytest.approx(0.3)
    with pytest.raises(BackendError):
        make_backend("hardware", 0.3)
    with pytest.raises(BackendError):
        AnalyticBackend(0.6)


def test_analytic_measure_examples():
    rng = np.random.default_rng(12)
    assert analytic_measure(0.2, -0.2, 3, 1_000, rng) == 0
    assert analytic_measure(0.0, math.sin(math.pi / 10), 2, 1_000, rng) == 1_000


@pytest.mark.parametrize(
    "a, b, marked, partner",
    [
        (0.6, 0.0, 0.3, -0.3),
        (0.0, 0.25, 0.25, 0.25),
        (0.6, 0.25, 0.55, -0.05),
    ],
)
def test_shifted_oracle_examples(a: float, b: float, marked: float, partner: float):
    circuit = build_shifted_oracle(a, b)
    state = circuit.prepare()
    assert state.amplitude(circuit.marked_index).real == pytest.approx(marked, abs=1e-12)
    assert state.amplitude(circuit.sign_partner_index).real == pytest.approx(partner, abs=1e-12)


def test_apply_grover_examples():
    circuit = build_shifted_oracle(0.6, 0.2)
    state = circuit.prepare()
    assert np.allclose(apply_grover(circuit, state, 0).amplitudes, state.amplitudes)
    assert apply_grover(circuit, state, 1).probability(circuit.marked_index) == pytest.approx(1.0, abs=1e-10)


def test_circuit_measure_matches_analytic_stream():
    circuit_hits = circuit_measure(0.4, 0.1, 2, 100_000, np.random.default_rng(2023))
    analytic_hits = analytic_measure(0.2, 0.1, 2, 100_000, np.random.default_rng(2023))
    assert circuit_hits == analytic_hits


def test_circuit_measure_rejects_zero_shots():
    with pytest.raises(BackendError):
        circuit_measure(0.4, 0.1, 2, 0, np.random.default_rng(0))


def test_amplitude_domains_cover_encodable_amplitudes():
    assert AnalyticBackend.amplitude_domain == 1.0
    assert CircuitBackend.amplitude_domain == 0.5
    for amplitude in (-0.5, 0.5):
        backend = CircuitBackend(amplitude, n_qubits=2)
        assert abs(backend.effective_amplitude) <= backend.amplitude_domain
    build_shifted_oracle(-0.5, CircuitBackend.amplitude_domain, n_qubits=2)
