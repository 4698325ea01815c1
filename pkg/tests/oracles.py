"""Independent dense-matrix oracles for the test suite.

Everything here is built from explicit Kronecker products and matrix
exponentials, deliberately sharing no code with the simulator kernels.
Qubit 0 is the least significant bit of the amplitude index, so the
Kronecker factor for qubit q sits at position n-1-q (most significant
factor first).
"""

from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.linalg

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
PAULI = {"RX": X, "RY": Y, "RZ": Z}


def kron_chain(factors) -> np.ndarray:
    return reduce(np.kron, factors)


def embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Kronecker-embed single-qubit operators {qubit: 2x2} into n qubits."""
    factors = [ops.get(q, I2) for q in reversed(range(n))]
    return kron_chain(factors)


def dense_rotation(kind: str, angle: float) -> np.ndarray:
    return scipy.linalg.expm(-0.5j * angle * PAULI[kind])


def dense_gate(gate, n: int) -> np.ndarray:
    """Full 2**n x 2**n matrix of one qcreg Gate."""
    if gate.kind in ("RX", "RY", "RZ"):
        return embed({gate.target: dense_rotation(gate.kind, gate.angle)}, n)
    if gate.kind == "CNOT":
        return embed({gate.control: P0}, n) + embed({gate.control: P1, gate.target: X}, n)
    if gate.kind == "CZ":
        return embed({gate.control: P0}, n) + embed({gate.control: P1, gate.target: Z}, n)
    if gate.kind == "ISING_EVOLUTION":
        if gate.trotter_steps != 0:
            raise ValueError("dense oracle only covers the exact evolution path")
        ham = dense_ising_hamiltonian(gate.fields, gate.couplings, n)
        return scipy.linalg.expm(-1j * gate.time * ham)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def dense_circuit(gates, n: int) -> np.ndarray:
    """Product of gate matrices; the first gate in the list acts first."""
    unitary = np.eye(2**n, dtype=complex)
    for gate in gates:
        unitary = dense_gate(gate, n) @ unitary
    return unitary


def dense_z(q: int, n: int) -> np.ndarray:
    return embed({q: Z}, n)


def dense_zz(q_a: int, q_b: int, n: int) -> np.ndarray:
    return embed({q_a: Z, q_b: Z}, n)


def ring_pairs(n: int) -> list[tuple[int, int]]:
    return [] if n == 1 else [(j, (j + 1) % n) for j in range(n)]


def dense_ising_hamiltonian(fields, couplings, n: int) -> np.ndarray:
    ham = np.zeros((2**n, 2**n), dtype=complex)
    for q, a in enumerate(fields):
        ham += a * embed({q: X}, n)
    for coupling, (j, k) in zip(couplings, ring_pairs(n), strict=True):
        ham += coupling * dense_zz(j, k, n)
    return ham


def dense_trotter_evolution(fields, couplings, time: float, steps: int, n: int) -> np.ndarray:
    """First-order product (exp(-i Hx tau) exp(-i Hzz tau))**steps, built densely."""
    tau = time / steps
    h_x = dense_ising_hamiltonian(fields, [0.0] * len(couplings), n)
    h_zz = dense_ising_hamiltonian([0.0] * len(fields), couplings, n)
    step = scipy.linalg.expm(-1j * tau * h_x) @ scipy.linalg.expm(-1j * tau * h_zz)
    return np.linalg.matrix_power(step, steps)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return amps / np.linalg.norm(amps)


def random_circuit(n: int, n_gates: int, rng: np.random.Generator, include_ising=False):
    """Random gate list over rotations, CNOT and CZ (optionally exact Ising)."""
    from qcreg import statevector as sv

    gates = []
    kinds = ["RX", "RY", "RZ"]
    if n >= 2:
        kinds += ["CNOT", "CZ"]
    if include_ising:
        kinds.append("ISING")
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("RX", "RY", "RZ"):
            gates.append(sv.Gate(kind, target=int(rng.integers(n)),
                                 angle=float(rng.uniform(-2 * np.pi, 2 * np.pi))))
        elif kind in ("CNOT", "CZ"):
            control, target = rng.choice(n, size=2, replace=False)
            gates.append(sv.Gate(kind, control=int(control), target=int(target)))
        else:
            fields = rng.uniform(-1, 1, size=n)
            couplings = rng.uniform(-1, 1, size=len(ring_pairs(n)))
            gates.append(sv.ising_evolution(fields, couplings,
                                            time=float(rng.uniform(0.1, 1.5))))
    return gates
