"""Simulator correctness against the dense-matrix oracle."""

import numpy as np
import pytest

from qcreg import statevector as sv
from qcreg.errors import CapacityError, ValidationError

import oracles


class TestInitZero:
    def test_single_qubit(self):
        state = sv.init_zero(1)
        np.testing.assert_array_equal(state.amplitudes, [1.0, 0.0])

    def test_five_qubits(self):
        state = sv.init_zero(5)
        assert state.amplitudes.shape == (32,)
        assert state.amplitudes[0] == 1.0
        assert np.count_nonzero(state.amplitudes) == 1

    def test_ten_qubits_norm(self):
        state = sv.init_zero(10)
        assert state.amplitudes.shape == (1024,)
        assert abs(state.norm_squared() - 1.0) < 1e-15

    @pytest.mark.parametrize("n", [0, -3, 25])
    def test_capacity_errors(self, n):
        with pytest.raises(CapacityError):
            sv.init_zero(n)

    def test_configurable_cap(self):
        with pytest.raises(CapacityError):
            sv.init_zero(9, max_qubits=8)


class TestApplyGate:
    def test_ry_pi_is_bit_flip(self):
        state = sv.apply_gate(sv.init_zero(1), sv.ry(0, np.pi))
        np.testing.assert_allclose(np.abs(state.amplitudes), [0.0, 1.0], atol=1e-15)
        assert sv.expectation_z(state, 0) == pytest.approx(-1.0, abs=1e-12)

    def test_cnot_flips_target_when_control_set(self):
        # qubit0=1, qubit1=0 is amplitude index 1; CNOT(0,1) sends it to index 3
        state = sv.init_zero(2)
        state.amplitudes[:] = [0, 1, 0, 0]
        sv.apply_gate(state, sv.cnot(0, 1))
        np.testing.assert_array_equal(state.amplitudes, [0, 0, 0, 1])

    def test_cnot_is_involution(self):
        rng = np.random.default_rng(11)
        state = sv.StateVector(2, oracles.random_state(2, rng))
        before = state.amplitudes.copy()
        sv.apply_gate(state, sv.cnot(0, 1))
        sv.apply_gate(state, sv.cnot(0, 1))
        np.testing.assert_allclose(state.amplitudes, before, atol=1e-15)

    def test_cz_phases_only_11(self):
        state = sv.StateVector(2, np.full(4, 0.5, dtype=complex))
        sv.apply_gate(state, sv.cz(0, 1))
        np.testing.assert_allclose(state.amplitudes, [0.5, 0.5, 0.5, -0.5], atol=1e-15)

    def test_random_three_qubit_circuit_matches_dense_oracle(self):
        rng = np.random.default_rng(2024)
        gates = oracles.random_circuit(3, 20, rng)
        state = sv.apply_circuit(sv.init_zero(3), gates)
        expected = oracles.dense_circuit(gates, 3)[:, 0]
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_oracle_equivalence_random_states(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(10):
            gates = oracles.random_circuit(n, 50, rng)
            start = oracles.random_state(n, rng)
            state = sv.apply_circuit(sv.StateVector(n, start.copy()), gates)
            expected = oracles.dense_circuit(gates, n) @ start
            np.testing.assert_allclose(state.amplitudes, expected, atol=1e-10)
            assert abs(state.norm_squared() - 1.0) < 1e-10

    def test_gate_on_out_of_range_qubit(self):
        with pytest.raises(ValidationError):
            sv.apply_gate(sv.init_zero(2), sv.rx(2, 0.1))

    def test_cnot_control_equals_target(self):
        with pytest.raises(ValidationError):
            sv.apply_gate(sv.init_zero(2), sv.cnot(1, 1))

    def test_non_finite_angle_rejected(self):
        with pytest.raises(ValidationError):
            sv.apply_gate(sv.init_zero(1), sv.rx(0, float("nan")))

    def test_batch_kernel_matches_per_state_loop(self):
        rng = np.random.default_rng(7)
        n = 3
        batch = np.stack([oracles.random_state(n, rng) for _ in range(6)])
        gates = oracles.random_circuit(n, 25, rng)
        batched = batch.copy()
        for gate in gates:
            batched = sv.apply_gate_array(batched, gate, n)
        for row in range(6):
            single = sv.apply_circuit(sv.StateVector(n, batch[row].copy()), gates)
            np.testing.assert_allclose(batched[row], single.amplitudes, atol=1e-12)


class TestExpectationZ:
    def test_basis_states(self):
        zero = sv.init_zero(1)
        assert sv.expectation_z(zero, 0) == pytest.approx(1.0)
        one = sv.StateVector(1, np.array([0, 1], dtype=complex))
        assert sv.expectation_z(one, 0) == pytest.approx(-1.0)

    def test_equal_superposition_is_zero(self):
        plus = sv.StateVector(1, np.array([1, 1], dtype=complex) / np.sqrt(2))
        assert abs(sv.expectation_z(plus, 0)) < 1e-12

    def test_random_two_qubit_state_matches_dense_operator(self):
        rng = np.random.default_rng(42)
        for q in (0, 1):
            psi = oracles.random_state(2, rng)
            state = sv.StateVector(2, psi.copy())
            expected = np.vdot(psi, oracles.dense_z(q, 2) @ psi).real
            assert sv.expectation_z(state, q) == pytest.approx(expected, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(ValidationError):
            sv.expectation_z(sv.init_zero(2), 2)

    def test_bounds_and_extremes(self):
        # +/-1 exactly on computational basis states of a product register
        state = sv.init_zero(3)
        sv.apply_gate(state, sv.ry(1, np.pi))
        assert sv.expectation_z(state, 0) == pytest.approx(1.0, abs=1e-12)
        assert sv.expectation_z(state, 1) == pytest.approx(-1.0, abs=1e-12)
        # strictly interior for a tilted qubit
        tilted = sv.apply_gate(sv.init_zero(1), sv.ry(0, 0.3))
        assert -1.0 < sv.expectation_z(tilted, 0) < 1.0
        # zero on each half of a Bell pair
        bell = sv.init_zero(2)
        sv.apply_gate(bell, sv.ry(0, np.pi / 2))
        sv.apply_gate(bell, sv.cnot(0, 1))
        assert abs(sv.expectation_z(bell, 0)) < 1e-12
        assert abs(sv.expectation_z(bell, 1)) < 1e-12

    def test_always_within_unit_interval(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            state = sv.StateVector(n, oracles.random_state(n, rng))
            for q in range(n):
                assert -1.0 <= sv.expectation_z(state, q) <= 1.0


class TestIsingEvolution:
    def test_zero_hamiltonian_is_identity(self):
        rng = np.random.default_rng(3)
        psi = oracles.random_state(3, rng)
        state = sv.StateVector(3, psi.copy())
        sv.apply_ising(state, [0, 0, 0], [0, 0, 0], time=7.3)
        np.testing.assert_allclose(state.amplitudes, psi, atol=1e-12)

    def test_single_qubit_field_is_rx(self):
        theta = 0.83
        evolved = sv.apply_ising(sv.init_zero(1), [1.0], [], time=theta)
        rotated = sv.apply_gate(sv.init_zero(1), sv.rx(0, 2 * theta))
        np.testing.assert_allclose(evolved.amplitudes, rotated.amplitudes, atol=1e-10)

    def test_exact_matches_oracle_hamiltonian(self):
        rng = np.random.default_rng(17)
        n = 3
        fields = rng.uniform(-1, 1, n)
        couplings = rng.uniform(-1, 1, n)
        psi = oracles.random_state(n, rng)
        state = sv.StateVector(n, psi.copy())
        sv.apply_ising(state, fields, couplings, time=1.2)
        ham = oracles.dense_ising_hamiltonian(fields, couplings, n)
        expected = scipy_expm(-1.2j * ham) @ psi
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-10)

    def test_trotter_converges_to_exact(self):
        # Frozen instance: S=256 is inside 1e-3 of the exact evolution and the
        # error halves (to within noise) with each doubling of S.
        rng = np.random.default_rng(99)
        n = 3
        fields = rng.uniform(-1, 1, n)
        couplings = rng.uniform(-1, 1, n)
        exact = sv.apply_ising(sv.init_zero(n), fields, couplings, time=1.0)
        errors = []
        for steps in (16, 32, 64, 128, 256):
            approx = sv.apply_ising(sv.init_zero(n), fields, couplings,
                                    time=1.0, trotter_steps=steps)
            errors.append(np.max(np.abs(approx.amplitudes - exact.amplitudes)))
        assert errors[-1] < 1e-3
        for coarse, fine in zip(errors, errors[1:]):
            assert fine < coarse
        assert abs(sv.apply_ising(sv.init_zero(n), fields, couplings, 1.0,
                                  trotter_steps=256).norm_squared() - 1.0) < 1e-10

    def test_trotter_matches_dense_product_oracle(self):
        rng = np.random.default_rng(23)
        n = 3
        fields = rng.uniform(-1, 1, n)
        couplings = rng.uniform(-1, 1, n)
        psi = oracles.random_state(n, rng)
        state = sv.StateVector(n, psi.copy())
        sv.apply_ising(state, fields, couplings, time=0.9, trotter_steps=12)
        expected = oracles.dense_trotter_evolution(fields, couplings, 0.9, 12, n) @ psi
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-10)

    def test_dense_path_memory_gate(self):
        state = sv.init_zero(14)
        with pytest.raises(CapacityError, match="12288"):
            sv.apply_ising(state, [0.1] * 14, [0.1] * 14, time=1.0)
        # trotterized path stays available
        sv.apply_ising(state, [0.1] * 14, [0.1] * 14, time=0.1, trotter_steps=2)
        assert abs(state.norm_squared() - 1.0) < 1e-10

    def test_coefficient_length_validation(self):
        with pytest.raises(ValidationError):
            sv.apply_ising(sv.init_zero(3), [0.1, 0.2], [0, 0, 0], time=1.0)
        with pytest.raises(ValidationError):
            sv.apply_ising(sv.init_zero(3), [0.1, 0.2, 0.3], [0, 0], time=1.0)

    def test_ring_pairs(self):
        assert sv.ising_ring_pairs(1) == []
        assert sv.ising_ring_pairs(2) == [(0, 1), (1, 0)]
        assert sv.ising_ring_pairs(5) == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]


def scipy_expm(mat):
    import scipy.linalg

    return scipy.linalg.expm(mat)


class TestNormPreservation:
    def test_long_random_sequences(self):
        rng = np.random.default_rng(314)
        for trial in range(15):
            n = int(rng.integers(1, 5))
            state = sv.StateVector(n, oracles.random_state(n, rng))
            gates = oracles.random_circuit(n, 40, rng, include_ising=True)
            sv.apply_circuit(state, gates)
            assert abs(state.norm_squared() - 1.0) < 1e-10


class TestParameterShift:
    def test_shift_rule_matches_finite_differences(self):
        rng = np.random.default_rng(777)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            prefix = oracles.random_circuit(n, int(rng.integers(0, 10)), rng)
            suffix = oracles.random_circuit(n, int(rng.integers(0, 10)), rng)
            kind = ("RX", "RY", "RZ")[rng.integers(3)]
            target = int(rng.integers(n))
            theta = float(rng.uniform(-np.pi, np.pi))
            readout = int(rng.integers(n))

            def z_of(angle):
                state = sv.init_zero(n)
                sv.apply_circuit(state, prefix)
                sv.apply_gate(state, sv.Gate(kind, target=target, angle=angle))
                sv.apply_circuit(state, suffix)
                return sv.expectation_z(state, readout)

            shift = 0.5 * (z_of(theta + np.pi / 2) - z_of(theta - np.pi / 2))
            step = 1e-5
            finite = (z_of(theta + step) - z_of(theta - step)) / (2 * step)
            assert shift == pytest.approx(finite, abs=1e-6)


class TestTrotterCost:
    @pytest.mark.parametrize(
        "n, dim, rel, mem",
        [
            (5, 32, 1, 0.05),
            (10, 1024, 32768, 48),
            (15, 32768, 1073741824, 49152),
            (20, 1048576, 35184372088832, 50331648),
        ],
    )
    def test_reference_rows(self, n, dim, rel, mem):
        est = sv.trotter_cost(n)
        assert est.matrix_dim == 2**n == dim
        assert est.relative_cost == 8.0 ** (n - 5) == rel
        assert est.memory_mb == 16.0 * 2.0 ** (2 * n) * 3 / 1024**2
        assert round(est.memory_mb, 2) == mem

    def test_small_n(self):
        est = sv.trotter_cost(1)
        assert est.matrix_dim == 2
        assert est.relative_cost == 8.0**-4
        with pytest.raises(ValidationError):
            sv.trotter_cost(0)
