"""Dense statevector simulation of small qubit registers.

Conventions (fixed for the whole package):

* Qubit 0 is the least significant bit of the amplitude index, i.e. basis
  state ``i`` assigns bit ``(i >> q) & 1`` to qubit ``q``.
* Rotations follow ``R_A(theta) = exp(-i * theta * A / 2)`` for
  ``A in {X, Y, Z}``.
* CNOT flips the target when the control is 1; CZ applies a -1 phase on
  the |11> subspace.
* Ising evolution acts on ``H = sum_j a_j X_j + sum_j J_j Z_j Z_{(j+1) mod n}``
  with couplings on the ring pairs returned by :func:`ising_ring_pairs`.

All kernels accept arrays of shape ``(..., 2**n)`` so a batch of states can
be pushed through the same circuit with one call per gate. A `StateVector`
must not be shared across concurrent writers; everything here is otherwise
deterministic and side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CapacityError, ValidationError

MAX_QUBITS = 24
DEFAULT_MEMORY_BUDGET_MB = 4096.0

ROTATION_KINDS = ("RX", "RY", "RZ")
TWO_QUBIT_KINDS = ("CNOT", "CZ")


@dataclass
class StateVector:
    """Amplitudes of an ``n_qubits`` register; length is always ``2**n_qubits``."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class Gate:
    """One circuit operation.

    ``kind`` is one of RX/RY/RZ (target, angle), CNOT/CZ (control, target)
    or ISING_EVOLUTION (fields, couplings, time, trotter_steps;
    trotter_steps == 0 selects the exact dense exponential).
    """

    kind: str
    target: int = 0
    control: int = -1
    angle: float = 0.0
    fields: tuple[float, ...] = ()
    couplings: tuple[float, ...] = ()
    time: float = 0.0
    trotter_steps: int = 0


def rx(target: int, angle: float) -> Gate:
    return Gate("RX", target=target, angle=angle)


def ry(target: int, angle: float) -> Gate:
    return Gate("RY", target=target, angle=angle)


def rz(target: int, angle: float) -> Gate:
    return Gate("RZ", target=target, angle=angle)


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", control=control, target=target)


def cz(control: int, target: int) -> Gate:
    return Gate("CZ", control=control, target=target)


def ising_evolution(fields, couplings, time: float, trotter_steps: int = 0) -> Gate:
    return Gate(
        "ISING_EVOLUTION",
        fields=tuple(float(a) for a in fields),
        couplings=tuple(float(j) for j in couplings),
        time=float(time),
        trotter_steps=int(trotter_steps),
    )


@dataclass(frozen=True)
class CostEstimate:
    """Closed-form size/cost/memory of the dense evolution-operator path.

    ``relative_cost = 8**(n - 5)`` (the 5-qubit case is 1) and
    ``memory_mb = 16 * 2**(2n) * 3 / 1024**2``.
    """

    n_qubits: int
    matrix_dim: int = field(init=False)
    relative_cost: float = field(init=False)
    memory_mb: float = field(init=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError(f"qubit count must be >= 1, got {self.n_qubits}")
        object.__setattr__(self, "matrix_dim", 2**self.n_qubits)
        object.__setattr__(self, "relative_cost", 8.0 ** (self.n_qubits - 5))
        object.__setattr__(
            self, "memory_mb", 16.0 * 2.0 ** (2 * self.n_qubits) * 3.0 / 1024.0**2
        )


def trotter_cost(n: int) -> CostEstimate:
    """Cost model for exponentiating the full evolution operator of n qubits."""
    return CostEstimate(n)


def ising_ring_pairs(n: int) -> list[tuple[int, int]]:
    """Ring coupling pairs (j, (j+1) mod n); empty for a single qubit."""
    if n == 1:
        return []
    return [(j, (j + 1) % n) for j in range(n)]


def init_zero(n: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Prepare |0...0> on n qubits."""
    if not 1 <= n <= max_qubits:
        raise CapacityError(f"qubit count {n} outside supported range [1, {max_qubits}]")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    """2x2 matrix of exp(-i * angle * A / 2) for A = X, Y or Z."""
    h = 0.5 * angle
    c, s = math.cos(h), math.sin(h)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]], dtype=np.complex128)
    raise ValidationError(f"unknown rotation kind {kind!r}")


# ---------------------------------------------------------------------------
# Array kernels: operate on amplitudes of shape (..., 2**n).
# ---------------------------------------------------------------------------


def _check_qubit(q: int, n: int):
    if not 0 <= q < n:
        raise ValidationError(f"qubit index {q} out of range for {n} qubits")


def apply_1q_array(amps: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to qubit q of a (..., 2**n) amplitude array."""
    _check_qubit(q, n)
    lead = amps.shape[:-1]
    view = amps.reshape(lead + (2 ** (n - 1 - q), 2, 2**q))
    out = np.einsum("ij,...jl->...il", mat, view)
    return np.ascontiguousarray(out).reshape(lead + (2**n,))


def _pair_slices(lead_ndim: int, n: int, q_a: int, q_b: int, v_a: int, v_b: int):
    # Index tuple selecting qubit q_a == v_a and q_b == v_b in the
    # (..., 2, 2, ..., 2) tensor view (axis of qubit q is -(q+1)).
    idx: list = [slice(None)] * (lead_ndim + n)
    idx[lead_ndim + n - 1 - q_a] = v_a
    idx[lead_ndim + n - 1 - q_b] = v_b
    return tuple(idx)


def apply_cnot_array(amps: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    _check_qubit(control, n)
    _check_qubit(target, n)
    if control == target:
        raise ValidationError("CNOT control and target must differ")
    amps = np.ascontiguousarray(amps)  # reshape below must be a view
    lead = amps.shape[:-1]
    view = amps.reshape(lead + (2,) * n)
    lo = _pair_slices(len(lead), n, control, target, 1, 0)
    hi = _pair_slices(len(lead), n, control, target, 1, 1)
    tmp = view[lo].copy()
    view[lo] = view[hi]
    view[hi] = tmp
    return amps


def apply_cz_array(amps: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    _check_qubit(control, n)
    _check_qubit(target, n)
    if control == target:
        raise ValidationError("CZ control and target must differ")
    amps = np.ascontiguousarray(amps)  # reshape below must be a view
    lead = amps.shape[:-1]
    view = amps.reshape(lead + (2,) * n)
    view[_pair_slices(len(lead), n, control, target, 1, 1)] *= -1.0
    return amps


def _ising_zz_diagonal(couplings, n: int) -> np.ndarray:
    """Diagonal of sum_j J_j Z_j Z_k over the ring pairs, as a (2**n,) vector."""
    pairs = ising_ring_pairs(n)
    if len(couplings) != len(pairs):
        raise ValidationError(
            f"expected {len(pairs)} ring couplings for {n} qubits, got {len(couplings)}"
        )
    idx = np.arange(2**n)
    diag = np.zeros(2**n)
    for coupling, (j, k) in zip(couplings, pairs):
        s_j = 1.0 - 2.0 * ((idx >> j) & 1)
        s_k = 1.0 - 2.0 * ((idx >> k) & 1)
        diag += coupling * s_j * s_k
    return diag


def ising_hamiltonian_dense(fields, couplings, n: int) -> np.ndarray:
    """Dense matrix of sum_j a_j X_j + sum_j J_j Z_j Z_{(j+1) mod n}."""
    if len(fields) != n:
        raise ValidationError(f"expected {n} field coefficients, got {len(fields)}")
    dim = 2**n
    ham = np.diag(_ising_zz_diagonal(couplings, n)).astype(np.complex128)
    idx = np.arange(dim)
    for j, a in enumerate(fields):
        ham[idx ^ (1 << j), idx] += a
    return ham


def apply_ising_array(
    amps: np.ndarray,
    fields,
    couplings,
    time: float,
    trotter_steps: int,
    n: int,
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
) -> np.ndarray:
    """Evolve amplitudes by exp(-i H T); exact if trotter_steps == 0."""
    if trotter_steps < 0:
        raise ValidationError(f"trotter_steps must be >= 0, got {trotter_steps}")
    if trotter_steps == 0:
        estimate = trotter_cost(n)
        if estimate.memory_mb > memory_budget_mb:
            raise CapacityError(
                f"dense evolution operator for {n} qubits needs "
                f"~{estimate.memory_mb:g} MB (cost-model estimate), over the "
                f"{memory_budget_mb:g} MB budget; use trotter_steps > 0"
            )
        ham = ising_hamiltonian_dense(fields, couplings, n)
        unitary = scipy.linalg.expm(-1j * time * ham)
        return np.ascontiguousarray(amps @ unitary.T)

    # First-order product (exp(-i H_X tau) exp(-i H_ZZ tau))**S: the ZZ
    # factor acts first within each step.
    tau = time / trotter_steps
    zz_phase = np.exp(-1j * tau * _ising_zz_diagonal(couplings, n))
    if len(fields) != n:
        raise ValidationError(f"expected {n} field coefficients, got {len(fields)}")
    x_mats = [rotation_matrix("RX", 2.0 * a * tau) for a in fields]
    for _ in range(trotter_steps):
        amps = amps * zz_phase
        for q, mat in enumerate(x_mats):
            amps = apply_1q_array(amps, mat, q, n)
    return amps


def apply_gate_array(
    amps: np.ndarray,
    gate: Gate,
    n: int,
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
) -> np.ndarray:
    if gate.kind in ROTATION_KINDS:
        if not math.isfinite(gate.angle):
            raise ValidationError(f"non-finite rotation angle {gate.angle}")
        return apply_1q_array(amps, rotation_matrix(gate.kind, gate.angle), gate.target, n)
    if gate.kind == "CNOT":
        return apply_cnot_array(amps, gate.control, gate.target, n)
    if gate.kind == "CZ":
        return apply_cz_array(amps, gate.control, gate.target, n)
    if gate.kind == "ISING_EVOLUTION":
        return apply_ising_array(
            amps, gate.fields, gate.couplings, gate.time, gate.trotter_steps, n,
            memory_budget_mb=memory_budget_mb,
        )
    raise ValidationError(f"unknown gate kind {gate.kind!r}")


def expectation_z_array(amps: np.ndarray, q: int, n: int) -> np.ndarray | float:
    """<Z_q> for each state in a (..., 2**n) array."""
    _check_qubit(q, n)
    lead = amps.shape[:-1]
    view = amps.reshape(lead + (2 ** (n - 1 - q), 2, 2**q))
    p_one = np.sum(np.abs(view[..., 1, :]) ** 2, axis=(-2, -1))
    result = 1.0 - 2.0 * p_one
    return float(result) if result.ndim == 0 else result


# ---------------------------------------------------------------------------
# StateVector-level operations.
# ---------------------------------------------------------------------------


def apply_gate(
    state: StateVector,
    gate: Gate,
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
) -> StateVector:
    """Apply one gate; the state is mutated in place and also returned."""
    state.amplitudes = apply_gate_array(
        state.amplitudes, gate, state.n_qubits, memory_budget_mb=memory_budget_mb
    )
    return state


def apply_circuit(
    state: StateVector,
    gates,
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
) -> StateVector:
    for gate in gates:
        apply_gate(state, gate, memory_budget_mb=memory_budget_mb)
    return state


def expectation_z(state: StateVector, q: int) -> float:
    return float(expectation_z_array(state.amplitudes, q, state.n_qubits))


def apply_ising(
    state: StateVector,
    fields,
    couplings,
    time: float,
    trotter_steps: int = 0,
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
) -> StateVector:
    """Ising-Hamiltonian time evolution of the whole register."""
    state.amplitudes = apply_ising_array(
        state.amplitudes, fields, couplings, time, trotter_steps, state.n_qubits,
        memory_budget_mb=memory_budget_mb,
    )
    return state
