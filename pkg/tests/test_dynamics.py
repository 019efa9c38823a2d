"""Tests for the master-equation integrator."""

import numpy as np
import pytest
from scipy.linalg import expm

from swapgate.dynamics import (
    NoiseModel,
    Propagation,
    propagate,
    propagate_superoperator,
)
from swapgate.hilbert import (
    PAULI_Z,
    DensityMatrix,
    OperatorMatrix,
    SiteDims,
    TimeDependentOperator,
    embed_operators,
    excitation_numbers,
)
from swapgate.spin_model import TWO_PI, build_interaction_hamiltonian, symmetric_chain


def qubit_op(matrix):
    return OperatorMatrix(SiteDims((2,)), matrix)


def naive_lindblad_rhs(h, collapse, rho):
    out = -1j * (h @ rho - rho @ h)
    for g, a in collapse:
        out += g * (a @ rho @ a.conj().T - 0.5 * (a.conj().T @ a @ rho + rho @ a.conj().T @ a))
    return out


class TestAgainstOracles:
    def test_amplitude_damping_population(self):
        """Excited population decays as exp(-gamma t) under photon loss."""
        gamma = 0.01
        omega = 2.0  # 2pi*MHz; modest so the 100 us horizon stays cheap
        h = qubit_op(-0.5 * TWO_PI * omega * PAULI_Z)
        noise = NoiseModel(gamma=gamma, channels=frozenset({"photon_loss"}))
        rho0 = DensityMatrix(qubit_op(np.diag([0.0, 1.0]).astype(complex)))
        times = np.linspace(1.0, 100.0, 25)
        prop = Propagation(h, noise, t_final=100.0, sample_times=tuple(times))
        states = propagate(rho0, prop)
        for t, st in zip(times, states):
            assert abs(st.entries[1, 1].real - np.exp(-gamma * t)) < 1e-6

    def test_unitary_limit_matches_expm(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h_mat = (a + a.conj().T) * 30.0
        h = OperatorMatrix(SiteDims((2, 2)), h_mat)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho0 = DensityMatrix.from_state_vector(psi, (2, 2))
        t_end = 0.02
        prop = Propagation(h, None, t_final=t_end, sample_times=(t_end,))
        out = propagate(rho0, prop)[-1]
        u = expm(-1j * h_mat * t_end)
        want = u @ rho0.entries @ u.conj().T
        assert np.max(np.abs(out.entries - want)) < 1e-8

    def test_zero_generator_is_identity(self):
        h = OperatorMatrix(SiteDims((2, 2)), np.zeros((4, 4)))
        rng = np.random.default_rng(6)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        rho0 = DensityMatrix(OperatorMatrix(SiteDims((2, 2)), rho))
        prop = Propagation(h, None, t_final=1.0, sample_times=(0.5, 1.0))
        for st in propagate(rho0, prop):
            assert np.max(np.abs(st.entries - rho)) < 1e-10

    def test_generator_matches_naive_form(self):
        """The optimized RHS equals the textbook Lindblad expression."""
        from swapgate.dynamics import _LindbladGenerator

        rng = np.random.default_rng(7)
        dims = SiteDims((2, 2))
        h = rng.normal(size=(4, 4))
        h = (h + h.T) * 10.0
        noise = NoiseModel(gamma=0.3)
        collapse = noise.collapse_operators(dims)
        gen = _LindbladGenerator(h.astype(complex), [], collapse, 2)
        rhos = rng.normal(size=(2, 4, 4)) + 1j * rng.normal(size=(2, 4, 4))
        got = gen(0.0, rhos.ravel()).reshape(2, 4, 4)
        for k in range(2):
            want = naive_lindblad_rhs(h, collapse, rhos[k])
            assert np.max(np.abs(got[k] - want)) < 1e-10


class TestPhysicalityChecks:
    def test_invariants_enforced_on_gate_model(self):
        params = symmetric_chain(40.9, 40.9, -540.4, 1007.1, 933.4)
        h = build_interaction_hamiltonian(params)
        vec = np.zeros(16, dtype=complex)
        vec[0b1000] = 1.0
        rho0 = DensityMatrix.from_state_vector(vec, (2, 2, 2, 2))
        noise = NoiseModel(gamma=0.01)
        tg = 6.112e-3
        times = np.linspace(tg / 10, tg, 10)
        prop = Propagation(h, noise, t_final=tg, sample_times=tuple(times))
        states = propagate(rho0, prop)  # raises internally if any check fails
        for st in states:
            assert abs(np.trace(st.entries) - 1) < 1e-8
            w = np.linalg.eigvalsh(st.entries)
            assert w.min() > -1e-7

    def test_dimension_mismatch_rejected(self):
        h = OperatorMatrix(SiteDims((2, 2)), np.zeros((4, 4)))
        rho0 = DensityMatrix(qubit_op(np.diag([1.0, 0.0]).astype(complex)))
        prop = Propagation(h, None, t_final=1.0, sample_times=(1.0,))
        with pytest.raises(Exception):
            propagate(rho0, prop)

    def test_sample_times_validation(self):
        h = qubit_op(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            Propagation(h, None, t_final=1.0, sample_times=(0.5, 0.5))
        with pytest.raises(ValueError):
            Propagation(h, None, t_final=1.0, sample_times=(0.5, 1.5))


class TestSuperoperator:
    def test_singleton_matches_propagate(self):
        params = symmetric_chain(30.0, 30.0, 300.0, 300.0, 1200.0)
        h = build_interaction_hamiltonian(params)
        vec = np.zeros(16, dtype=complex)
        vec[0b1000] = 1.0
        rho0 = DensityMatrix.from_state_vector(vec, (2, 2, 2, 2))
        noise = NoiseModel(gamma=0.02)
        prop = Propagation(h, noise, t_final=2e-3, sample_times=(1e-3, 2e-3))
        single = propagate(rho0, prop)
        stacked = propagate_superoperator(prop, [rho0.op])
        for k in range(2):
            assert np.max(np.abs(single[k].entries - stacked[k][0].entries)) < 1e-9

    def test_linearity_of_the_map(self):
        params = symmetric_chain(30.0, 30.0, 300.0, 300.0, 1200.0)
        h = build_interaction_hamiltonian(params)
        noise = NoiseModel(gamma=0.05)
        rng = np.random.default_rng(8)
        a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        b = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        alpha, beta = 0.6 - 0.1j, -0.3 + 0.9j
        dims = SiteDims((2, 2, 2, 2))
        ops = [
            OperatorMatrix(dims, a),
            OperatorMatrix(dims, b),
            OperatorMatrix(dims, alpha * a + beta * b),
        ]
        prop = Propagation(h, noise, t_final=1.5e-3, sample_times=(1.5e-3,))
        out = propagate_superoperator(prop, ops)[-1]
        combo = alpha * out[0].entries + beta * out[1].entries
        assert np.max(np.abs(combo - out[2].entries)) < 1e-8

    def test_completely_mixed_fixed_under_dephasing(self):
        dims = SiteDims((2, 2))
        h = OperatorMatrix(dims, np.zeros((4, 4)))
        noise = NoiseModel(gamma=0.5, channels=frozenset({"dephasing"}))
        rho0 = DensityMatrix(OperatorMatrix(dims, np.eye(4) / 4))
        prop = Propagation(h, noise, t_final=3.0, sample_times=(3.0,))
        out = propagate(rho0, prop)[-1]
        assert np.max(np.abs(out.entries - np.eye(4) / 4)) < 1e-9


class TestStructure:
    def test_excitation_sector_populations_conserved_noiselessly(self):
        params = symmetric_chain(40.9, 40.9, -540.4, 1007.1, 933.4)
        h = build_interaction_hamiltonian(params)
        rng = np.random.default_rng(9)
        vec = rng.normal(size=16) + 1j * rng.normal(size=16)
        rho0 = DensityMatrix.from_state_vector(vec, (2, 2, 2, 2))
        n_of = excitation_numbers((2, 2, 2, 2))
        pops0 = [
            sum(abs(vec[i] / np.linalg.norm(vec)) ** 2 for i in range(16) if n_of[i] == n)
            for n in range(5)
        ]
        prop = Propagation(h, None, t_final=3e-3, sample_times=(3e-3,))
        out = propagate(rho0, prop)[-1]
        for n in range(5):
            pop = sum(out.entries[i, i].real for i in range(16) if n_of[i] == n)
            assert abs(pop - pops0[n]) < 1e-8

    def test_tolerance_self_consistency(self):
        """Halving the tolerances moves the answer by less than the tolerance."""
        params = symmetric_chain(30.0, 30.0, 300.0, 300.0, 1200.0)
        h = build_interaction_hamiltonian(params)
        vec = np.zeros(16, dtype=complex)
        vec[0b1000] = 1.0
        rho0 = DensityMatrix.from_state_vector(vec, (2, 2, 2, 2))
        noise = NoiseModel(gamma=0.01)
        t_end = 4e-3
        outs = []
        for rtol in (1e-8, 5e-9):
            prop = Propagation(
                h, noise, t_final=t_end, sample_times=(t_end,), rtol=rtol
            )
            outs.append(propagate(rho0, prop)[-1].entries)
        assert np.linalg.norm(outs[0] - outs[1]) < 1e-8

    def test_time_dependent_term_equivalence(self):
        """A static term written as a trivial oscillation evolves identically."""
        params = symmetric_chain(30.0, 30.0, 300.0, 300.0, 1200.0)
        h = build_interaction_hamiltonian(params)
        extra = embed_operators({1: PAULI_Z}, h.dims) * (TWO_PI * 5.0)
        h_static = OperatorMatrix(h.dims, h.entries + extra.entries)
        h_td = TimeDependentOperator(
            static=h, terms=((lambda t: 1.0, extra),)
        )
        vec = np.zeros(16, dtype=complex)
        vec[0b0100] = 1.0
        rho0 = DensityMatrix.from_state_vector(vec, (2, 2, 2, 2))
        t_end = 2e-3
        out_static = propagate(
            rho0, Propagation(h_static, None, t_final=t_end, sample_times=(t_end,))
        )[-1]
        out_td = propagate(
            rho0, Propagation(h_td, None, t_final=t_end, sample_times=(t_end,))
        )[-1]
        assert np.max(np.abs(out_static.entries - out_td.entries)) < 1e-8


class TestNoiseModel:
    def test_eight_collapse_operators_for_four_qubits(self):
        ops = NoiseModel(gamma=0.01).collapse_operators((2, 2, 2, 2))
        assert len(ops) == 8

    def test_channel_subsets(self):
        ops = NoiseModel(
            gamma=0.01, channels=frozenset({"dephasing"})
        ).collapse_operators((2, 2))
        assert len(ops) == 2

    def test_per_channel_rates(self):
        nm = NoiseModel(gamma=0.01, gamma_photon_loss=0.03)
        assert nm.rate("dephasing") == 0.01
        assert nm.rate("photon_loss") == 0.03

    def test_invalid(self):
        with pytest.raises(ValueError):
            NoiseModel(gamma=-1.0)
        with pytest.raises(ValueError):
            NoiseModel(gamma=0.1, channels=frozenset({"heating"}))
