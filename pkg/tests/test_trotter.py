import numpy as np
import pytest
from scipy.linalg import expm

from conftest import X, Y, Z, site_op
from mbl_spectra.errors import InvalidArgumentError
from mbl_spectra.model import ModelParams, sample_disorder
from mbl_spectra.runner import phase_aligned_distance
from mbl_spectra.statevector import (
    Circuit,
    apply_gates_batch,
    circuit_unitary,
    init_plus_state,
    run_circuit,
)
from mbl_spectra.trotter import (
    TrotterPlan,
    build_evolution_circuit,
    circuit_census,
    evolve_plus_state,
    gate_counts,
    step_unitary,
    trotter_step,
    two_body_block,
)

HEIS = sum(np.kron(P, P) for P in (X, Y, Z))


def plan(n=3, J=0.3, t=5.0, m=6, seed=0, skip=True, w=1.0):
    return TrotterPlan(ModelParams(n, J, w), sample_disorder(n, seed), t, m, skip)


def block_unitary(J, d):
    return apply_gates_batch(np.eye(4, dtype=complex), 2, two_body_block(J, d, 0, 1))


def explicit_step(p: TrotterPlan, include_interaction=True):
    """Explicit operator product of one step; site 0 factor acts first."""
    n, J, w, d = p.params.n, p.params.J, p.params.w, p.delta
    U = np.eye(2 ** n, dtype=complex)
    for k in range(n):
        if k + 1 < n and include_interaction:
            for P in (X, Y, Z):
                U = expm(-1j * J * d * site_op(P, k, n) @ site_op(P, k + 1, n)) @ U
        U = expm(-1j * w * p.dis.hx[k] * d * site_op(X, k, n)) @ U
        U = expm(-1j * w * p.dis.hz[k] * d * site_op(Z, k, n)) @ U
    return U


class TestTwoBodyBlock:
    def test_census(self):
        assert gate_counts(Circuit(2, two_body_block(0.3, 0.5, 0, 1))) == (3, 8)

    def test_matches_heisenberg_exponential(self):
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(100):
            J, d = rng.uniform(0, 1), rng.uniform(0, 2)
            worst = max(worst, phase_aligned_distance(block_unitary(J, d), expm(-1j * J * d * HEIS)))
        assert worst < 1e-10

    def test_plus_plus_picks_up_phase(self):
        J, d = 0.7, 1.3
        pp = np.full(4, 0.5, dtype=complex)
        out = block_unitary(J, d) @ pp
        assert abs(np.vdot(pp, out)) ** 2 == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(out, np.exp(-1j * J * d) * pp, atol=1e-10)

    def test_reversed_qubits(self):
        U = apply_gates_batch(np.eye(4, dtype=complex), 2, two_body_block(0.4, 0.9, 1, 0))
        assert phase_aligned_distance(U, expm(-1j * 0.4 * 0.9 * HEIS)) < 1e-10

    def test_same_qubit(self):
        with pytest.raises(InvalidArgumentError):
            two_body_block(0.1, 0.1, 2, 2)


class TestTrotterStep:
    def test_interior_census(self):
        assert gate_counts(Circuit(3, trotter_step(plan(), 1))) == (6, 22)

    def test_skipped_first_step(self):
        assert gate_counts(Circuit(3, trotter_step(plan(), 0))) == (0, 6)

    def test_unskipped_first_step(self):
        assert gate_counts(Circuit(3, trotter_step(plan(skip=False), 0))) == (6, 22)

    def test_decoupled_step_is_field_product(self):
        p = plan(J=0.0, t=3.0)
        U = step_unitary(p, 2)
        np.testing.assert_allclose(U, explicit_step(p, include_interaction=False), atol=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_matches_explicit_operator_product(self, n, seed):
        p = plan(n=n, J=0.45, t=4.0, seed=seed, w=1.2)
        assert phase_aligned_distance(step_unitary(p, 3), explicit_step(p)) < 1e-9
        assert phase_aligned_distance(step_unitary(p, 0), explicit_step(p, include_interaction=False)) < 1e-9

    def test_field_angle_convention(self):
        p = plan(t=6.0, m=6, w=0.8)
        gates = trotter_step(p, 1)
        rx = [g for g in gates if g.kind == "RX"]
        rz = [g for g in gates if g.kind == "RZ" and abs(abs(g.angle) - np.pi / 2) > 1e-12]
        np.testing.assert_allclose([g.angle for g in rx], 2 * 0.8 * p.dis.hx * 1.0)
        np.testing.assert_allclose([g.angle for g in rz], 2 * 0.8 * p.dis.hz * 1.0)

    def test_step_index_range(self):
        with pytest.raises(InvalidArgumentError):
            trotter_step(plan(m=6), 6)


class TestBuildEvolutionCircuit:
    def test_default_census(self):
        assert gate_counts(build_evolution_circuit(plan(m=6, skip=True))) == (30, 116)

    def test_census_without_skip(self):
        assert gate_counts(build_evolution_circuit(plan(m=6, skip=False))) == (36, 132)

    @pytest.mark.parametrize("n,m,skip", [(3, 6, True), (3, 6, False), (5, 4, True), (2, 1, True), (7, 3, False)])
    def test_census_formula(self, n, m, skip):
        assert gate_counts(build_evolution_circuit(plan(n=n, m=m, skip=skip))) == circuit_census(n, m, skip)

    def test_zero_time_is_identity(self):
        c = build_evolution_circuit(plan(t=0.0))
        assert all(g.angle == 0.0 for g in c.gates if g.kind in ("RX", "XX"))
        U = circuit_unitary(c)
        assert phase_aligned_distance(U, np.eye(8)) < 1e-10

    def test_delta(self):
        p = plan(t=7.5, m=6)
        assert p.delta * p.m == 7.5

    def test_fast_path_matches_gate_by_gate(self):
        for skip in (True, False):
            p = plan(n=4, J=0.7, t=8.0, m=9, seed=3, skip=skip)
            slow = run_circuit(init_plus_state(4), build_evolution_circuit(p)).amplitudes
            np.testing.assert_allclose(evolve_plus_state(p), slow, atol=1e-12)

    def test_invalid_plan(self):
        with pytest.raises(InvalidArgumentError):
            plan(m=0)
        with pytest.raises(InvalidArgumentError):
            plan(t=-1.0)


def test_skip_only_changes_global_phase():
    for seed in range(5):
        a = evolve_plus_state(plan(J=0.7, t=9.0, seed=seed, skip=True))
        b = evolve_plus_state(plan(J=0.7, t=9.0, seed=seed, skip=False))
        assert abs(np.vdot(a, b)) ** 2 == pytest.approx(1.0, abs=1e-12)
