"""Trainable variational circuits of L repeated unit layers.

Each layer applies an entangler block followed by an RX-RZ-RX rotation
triple on every qubit, so the parameter vector always has length 3nL.
The entangler is a CNOT ring, a CZ ring, or one Ising-Hamiltonian time
evolution whose coefficients are drawn once per seed (uniform [-1, 1])
and shared by all layers.

Parameter layout: ``theta[(layer*n + qubit)*3 + k]`` with k = 0, 1, 2 for
the RX, RZ, RX angles; layer 0 acts first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import statevector as sv
from .encoders import entangler_ring
from .errors import ValidationError
from .seeding import substream

UNIT_KINDS = ("ising", "cnot", "cz")


@dataclass(frozen=True)
class AnsatzSpec:
    unit: str
    layers: int
    n_qubits: int
    ising_seed: int = 0
    ising_time: float = 10.0
    ising_trotter_steps: int = 0

    def __post_init__(self):
        if self.unit not in UNIT_KINDS:
            raise ValidationError(
                f"unknown unit {self.unit!r}; expected one of {', '.join(UNIT_KINDS)}"
            )
        if self.layers < 1:
            raise ValidationError(f"layers must be >= 1, got {self.layers}")
        if self.n_qubits < 1:
            raise ValidationError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.ising_trotter_steps < 0:
            raise ValidationError("ising_trotter_steps must be >= 0")


def param_count(spec: AnsatzSpec) -> int:
    """Total trainable rotation angles: 3nL."""
    return 3 * spec.n_qubits * spec.layers


def twoqubit_count(spec: AnsatzSpec) -> int:
    """Ring two-qubit gates: nL for CNOT/CZ units, 0 for the Ising unit."""
    if spec.unit == "ising":
        return 0
    return spec.n_qubits * spec.layers


def ising_coefficients(spec: AnsatzSpec) -> tuple[np.ndarray, np.ndarray]:
    """Seeded field/coupling draw shared by every layer of the Ising unit."""
    rng = substream(spec.ising_seed, "ising")
    fields = rng.uniform(-1.0, 1.0, spec.n_qubits)
    couplings = rng.uniform(-1.0, 1.0, len(sv.ising_ring_pairs(spec.n_qubits)))
    return fields, couplings


def _entangler_block(spec: AnsatzSpec) -> list[sv.Gate]:
    if spec.unit == "ising":
        fields, couplings = ising_coefficients(spec)
        return [
            sv.ising_evolution(
                fields, couplings, spec.ising_time, spec.ising_trotter_steps
            )
        ]
    return entangler_ring(spec.unit.upper(), spec.n_qubits)


def build_ansatz(spec: AnsatzSpec, theta) -> list[sv.Gate]:
    """Gate sequence of the full L-layer circuit for one parameter vector."""
    theta = np.asarray(theta, dtype=float)
    expected = param_count(spec)
    if theta.shape != (expected,):
        raise ValidationError(
            f"theta must have length 3nL = {expected}, got shape {theta.shape}"
        )
    if not np.all(np.isfinite(theta)):
        raise ValidationError("theta contains non-finite values")
    block = _entangler_block(spec)
    n = spec.n_qubits
    gates: list[sv.Gate] = []
    for layer in range(spec.layers):
        gates += block
        for q in range(n):
            base = (layer * n + q) * 3
            gates.append(sv.rx(q, float(theta[base])))
            gates.append(sv.rz(q, float(theta[base + 1])))
            gates.append(sv.rx(q, float(theta[base + 2])))
    return gates
