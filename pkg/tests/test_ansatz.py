"""Variational circuit construction, counting formulas, and determinism."""

import numpy as np
import pytest

from qcreg import statevector as sv
from qcreg.ansatz import (
    AnsatzSpec,
    build_ansatz,
    ising_coefficients,
    param_count,
    twoqubit_count,
)
from qcreg.errors import ValidationError

import oracles


class TestCounts:
    @pytest.mark.parametrize(
        "n, layers, params, twoq",
        [(5, 10, 150, 50), (10, 10, 300, 100), (5, 3, 45, 15),
         (15, 12, 540, 180), (10, 9, 270, 90)],
    )
    def test_formulas(self, n, layers, params, twoq):
        spec = AnsatzSpec("cnot", layers, n)
        assert param_count(spec) == params
        assert twoqubit_count(spec) == twoq
        gates = build_ansatz(spec, np.zeros(params))
        assert sum(g.kind == "CNOT" for g in gates) == twoq
        assert sum(g.kind in ("RX", "RZ") for g in gates) == params

    def test_ising_unit_reports_zero_two_qubit_gates(self):
        spec = AnsatzSpec("ising", 4, 3)
        assert twoqubit_count(spec) == 0
        gates = build_ansatz(spec, np.zeros(param_count(spec)))
        assert sum(g.kind == "ISING_EVOLUTION" for g in gates) == 4


class TestBuildAnsatz:
    def test_zero_theta_cnot_unit_fixes_all_zero_state(self):
        spec = AnsatzSpec("cnot", 4, 3)
        state = sv.apply_circuit(sv.init_zero(3), build_ansatz(spec, np.zeros(36)))
        for q in range(3):
            assert sv.expectation_z(state, q) == pytest.approx(1.0, abs=1e-12)

    def test_wrong_theta_length_reports_expected(self):
        spec = AnsatzSpec("cz", 2, 4)
        with pytest.raises(ValidationError, match="24"):
            build_ansatz(spec, np.zeros(23))

    def test_non_finite_theta_rejected(self):
        spec = AnsatzSpec("cnot", 1, 2)
        theta = np.zeros(6)
        theta[3] = np.nan
        with pytest.raises(ValidationError):
            build_ansatz(spec, theta)

    def test_layer_structure_entangler_first(self):
        spec = AnsatzSpec("cz", 2, 2)
        kinds = [g.kind for g in build_ansatz(spec, np.arange(12.0))]
        per_layer = ["CZ", "CZ", "RX", "RZ", "RX", "RX", "RZ", "RX"]
        assert kinds == per_layer * 2

    def test_theta_layout_layer_major(self):
        spec = AnsatzSpec("cz", 2, 2)
        gates = [g for g in build_ansatz(spec, np.arange(12.0)) if g.kind != "CZ"]
        assert [g.angle for g in gates] == list(range(12))
        assert [g.target for g in gates] == [0, 0, 0, 1, 1, 1] * 2

    @pytest.mark.parametrize("unit", ["cnot", "cz", "ising"])
    def test_norm_preserved(self, unit):
        rng = np.random.default_rng(8)
        spec = AnsatzSpec(unit, 3, 3, ising_seed=5)
        theta = rng.uniform(0, 2 * np.pi, param_count(spec))
        state = sv.StateVector(3, oracles.random_state(3, rng))
        sv.apply_circuit(state, build_ansatz(spec, theta))
        assert abs(state.norm_squared() - 1.0) < 1e-10

    @pytest.mark.parametrize("unit", ["cnot", "cz"])
    def test_appending_zero_layer_adds_exactly_one_entangler_block(self, unit):
        rng = np.random.default_rng(21)
        n, layers = 3, 2
        spec = AnsatzSpec(unit, layers, n)
        theta = rng.uniform(0, 2 * np.pi, param_count(spec))
        base = sv.apply_circuit(sv.init_zero(n), build_ansatz(spec, theta))

        extended_spec = AnsatzSpec(unit, layers + 1, n)
        extended_theta = np.concatenate([theta, np.zeros(3 * n)])
        extended = sv.apply_circuit(
            sv.init_zero(n), build_ansatz(extended_spec, extended_theta)
        )

        manual = base.copy()
        from qcreg.encoders import entangler_ring

        sv.apply_circuit(manual, entangler_ring(unit.upper(), n))
        assert np.array_equal(extended.amplitudes, manual.amplitudes)


class TestIsingUnit:
    def test_coefficients_are_seed_deterministic(self):
        spec = AnsatzSpec("ising", 2, 4, ising_seed=123)
        f1, c1 = ising_coefficients(spec)
        f2, c2 = ising_coefficients(spec)
        assert np.array_equal(f1, f2) and np.array_equal(c1, c2)
        assert f1.shape == (4,) and c1.shape == (4,)
        assert np.all(np.abs(f1) <= 1) and np.all(np.abs(c1) <= 1)

    def test_different_seeds_differ(self):
        f1, _ = ising_coefficients(AnsatzSpec("ising", 1, 4, ising_seed=1))
        f2, _ = ising_coefficients(AnsatzSpec("ising", 1, 4, ising_seed=2))
        assert not np.array_equal(f1, f2)

    def test_one_hamiltonian_shared_across_layers(self):
        spec = AnsatzSpec("ising", 3, 2, ising_seed=9)
        gates = build_ansatz(spec, np.zeros(param_count(spec)))
        evolutions = [g for g in gates if g.kind == "ISING_EVOLUTION"]
        assert len(evolutions) == 3
        assert len({(g.fields, g.couplings, g.time) for g in evolutions}) == 1

    def test_default_evolution_time(self):
        spec = AnsatzSpec("ising", 1, 2)
        gate = build_ansatz(spec, np.zeros(6))[0]
        assert gate.time == 10.0
        assert gate.trotter_steps == 0
