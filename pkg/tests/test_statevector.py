import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbl_spectra.errors import InvalidArgumentError
from mbl_spectra.statevector import (
    Circuit,
    Gate,
    H,
    Rx,
    Rz,
    StateVector,
    XX,
    apply_gate,
    basis_state,
    circuit_unitary,
    embed_gate,
    expectation_z,
    init_plus_state,
    run_circuit,
    sample_shots,
)


def random_circuit(n, n_gates, rng):
    gates = []
    for _ in range(n_gates):
        kind = rng.choice(["RX", "RZ", "H", "XX"])
        if kind == "XX" and n > 1:
            q1, q2 = rng.choice(n, 2, replace=False)
            gates.append(XX(int(q1), int(q2), rng.uniform(-np.pi, np.pi)))
        elif kind == "H" or (kind == "XX"):
            gates.append(H(int(rng.integers(n))))
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),), rng.uniform(-np.pi, np.pi)))
    return Circuit(n, gates)


def random_state(n, rng):
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector(n, v / np.linalg.norm(v))


class TestInitPlusState:
    def test_single_qubit(self):
        np.testing.assert_allclose(init_plus_state(1).amplitudes, [0.70710678, 0.70710678], atol=1e-8)

    def test_three_qubits(self):
        amps = init_plus_state(3).amplitudes
        assert amps.shape == (8,)
        np.testing.assert_allclose(amps, 0.35355339, atol=1e-8)
        assert np.all(amps.imag == 0)

    def test_z_expectation_is_zero(self):
        s = init_plus_state(3)
        for i in range(3):
            assert expectation_z(s, i) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("n", [0, 25])
    def test_out_of_range(self, n):
        with pytest.raises(InvalidArgumentError):
            init_plus_state(n)

    def test_twelve_qubits_supported(self):
        assert init_plus_state(12).norm() == pytest.approx(1.0)


class TestApplyGate:
    def test_rx_pi_flips(self):
        out = apply_gate(basis_state(1, 0), Rx(0, np.pi))
        np.testing.assert_allclose(out.amplitudes, [0, -1j], atol=1e-15)

    def test_xx_quarter_pi_entangles(self):
        out = apply_gate(basis_state(2, 0), XX(0, 1, np.pi / 4))
        expected = np.array([1, 0, 0, 1j]) / math.sqrt(2)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    def test_rz_convention(self):
        s = apply_gate(init_plus_state(1), Rz(0, 0.3))
        np.testing.assert_allclose(s.amplitudes, np.array([np.exp(-0.15j), np.exp(0.15j)]) / math.sqrt(2))

    def test_hadamard_maps_zero_to_plus(self):
        np.testing.assert_allclose(apply_gate(basis_state(2, 0), H(1)).amplitudes,
                                   [1 / math.sqrt(2), 0, 1 / math.sqrt(2), 0])

    def test_qubit_zero_is_low_bit(self):
        out = apply_gate(basis_state(3, 0), Rx(0, np.pi))
        assert abs(out.amplitudes[1]) == pytest.approx(1.0)

    def test_input_not_mutated(self):
        s = init_plus_state(2)
        before = s.amplitudes.copy()
        apply_gate(s, Rx(0, 1.0))
        np.testing.assert_array_equal(s.amplitudes, before)

    def test_index_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            apply_gate(init_plus_state(2), Rx(2, 0.1))

    def test_xx_same_target_rejected(self):
        with pytest.raises(InvalidArgumentError):
            XX(1, 1, 0.2)

    @settings(max_examples=60, deadline=None)
    @given(kind=st.sampled_from(["RX", "RZ", "H", "XX"]), angle=st.floats(-10, 10),
           seed=st.integers(0, 2 ** 16))
    def test_norm_preserved(self, kind, angle, seed):
        rng = np.random.default_rng(seed)
        s = random_state(4, rng)
        targets = (0, 3) if kind == "XX" else (2,)
        g = Gate(kind, targets, None if kind == "H" else angle)
        assert abs(apply_gate(s, g).norm() - s.norm()) < 1e-12


class TestRunCircuit:
    def test_empty_circuit(self):
        s = random_state(3, np.random.default_rng(0))
        np.testing.assert_array_equal(run_circuit(s, Circuit(3)).amplitudes, s.amplitudes)

    def test_inverse_returns_initial(self):
        rng = np.random.default_rng(1)
        s = random_state(3, rng)
        c = random_circuit(3, 40, rng)
        back = run_circuit(run_circuit(s, c), c.inverse())
        np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-10)

    def test_matches_dense_matrix_product(self):
        rng = np.random.default_rng(2)
        s = random_state(3, rng)
        c = random_circuit(3, 20, rng)
        U = np.eye(8, dtype=complex)
        for g in c.gates:
            U = embed_gate(g, 3) @ U
        np.testing.assert_allclose(run_circuit(s, c).amplitudes, U @ s.amplitudes, atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_gate_matrix_equivalence(self, n):
        rng = np.random.default_rng(10 + n)
        c = random_circuit(n, 30, rng)
        U = np.eye(2 ** n, dtype=complex)
        for g in c.gates:
            U = embed_gate(g, n) @ U
        np.testing.assert_allclose(circuit_unitary(c), U, atol=1e-10)

    def test_long_circuit_norm(self):
        rng = np.random.default_rng(3)
        s = init_plus_state(4)
        out = run_circuit(s, random_circuit(4, 10_000, rng))
        assert abs(out.norm() - 1) < 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            run_circuit(init_plus_state(2), Circuit(3))

    def test_circuit_rejects_out_of_range_gate(self):
        with pytest.raises(InvalidArgumentError):
            Circuit(2, [Rx(2, 0.1)])


class TestExpectationZ:
    def test_all_zero_state(self):
        s = basis_state(4, 0)
        assert all(expectation_z(s, i) == 1.0 for i in range(4))

    def test_single_flipped_bit(self):
        s = basis_state(3, 0b010)
        assert [expectation_z(s, i) for i in range(3)] == [1.0, -1.0, 1.0]

    def test_site_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            expectation_z(init_plus_state(2), 2)


class TestSampleShots:
    def test_definite_state(self):
        np.testing.assert_array_equal(sample_shots(basis_state(3, 0), 100, seed=0), [1.0, 1.0, 1.0])

    def test_plus_state_within_binomial_bound(self):
        est = sample_shots(init_plus_state(3), 2400, seed=2400)
        assert np.all(np.abs(est) < 5 / math.sqrt(2400))

    def test_deterministic(self):
        s = random_state(3, np.random.default_rng(4))
        np.testing.assert_array_equal(sample_shots(s, 500, seed=9), sample_shots(s, 500, seed=9))

    def test_estimates_are_multiples_of_two_over_shots(self):
        s = random_state(3, np.random.default_rng(5))
        est = sample_shots(s, 37, seed=1)
        k = (est + 1) * 37 / 2
        np.testing.assert_allclose(k, np.round(k), atol=1e-12)
        assert np.all(np.abs(est) <= 1)

    def test_zero_shots(self):
        with pytest.raises(InvalidArgumentError):
            sample_shots(init_plus_state(1), 0, seed=0)

    def test_unbiased(self):
        s = random_state(3, np.random.default_rng(6))
        exact = np.array([expectation_z(s, i) for i in range(3)])
        shots = 50
        est = np.array([sample_shots(s, shots, seed=k) for k in range(1000)])
        sem = np.sqrt((1 - exact ** 2) / shots) / np.sqrt(1000)
        assert np.all(np.abs(est.mean(axis=0) - exact) < 3 * sem)


class TestSerialization:
    def test_round_trip(self):
        c = random_circuit(4, 50, np.random.default_rng(7))
        back = Circuit.from_text(4, c.to_text())
        assert back.gates == c.gates

    def test_line_format(self):
        text = Circuit(3, [Rx(0, 0.5), Rz(1, -1.25), H(2), XX(0, 2, 0.1)]).to_text()
        assert text.splitlines() == ["RX 0 0.5", "RZ 1 -1.25", "H 2", "XX 0 2 0.1"]

    def test_angle_precision(self):
        c = Circuit(1, [Rx(0, 1 / 3)])
        angle = c.to_text().split()[-1]
        assert len(angle.replace("0.", "", 1)) >= 12
        assert float(angle) == 1 / 3

    def test_bad_line(self):
        with pytest.raises(InvalidArgumentError):
            Circuit.from_text(2, "CNOT 0 1\n")
