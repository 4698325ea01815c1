"""Data-encoding circuits that load a descriptor vector into qubit rotations.

Thirteen encoder ids are supported. The three plain encoders write each
(normalized) descriptor into one qubit:

* ``M``  — RY(asin x) then RZ(acos x^2); requires |x| <= 1
* ``A1`` — RY(x)
* ``A2`` — RY(x) then RZ(x)

The ten entangler-enhanced ids ``U1-U2-ENT`` stack two rotation layers with
a full ring of CNOT or CZ gates after each layer. With ``copies = p`` each
descriptor is re-encoded on p qubits (descriptor j lands on qubits
``c*d + j`` for copies c = 0..p-1), and the entangler ring spans all
``n = p*d`` qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import statevector as sv
from .errors import DomainError, ValidationError

PLAIN_IDS = ("M", "A1", "A2")
ENTANGLED_IDS = (
    "M-M-CNOT",
    "A1-A1-CNOT",
    "A2-A2-CNOT",
    "M-A1-CNOT",
    "M-A2-CNOT",
    "M-M-CZ",
    "A1-A1-CZ",
    "A2-A2-CZ",
    "M-A1-CZ",
    "M-A2-CZ",
)
ENCODER_IDS = PLAIN_IDS + ENTANGLED_IDS


def parse_encoder_id(encoder_id: str) -> tuple[str, str | None, str | None]:
    """Split an encoder id into (first layer, second layer, entangler)."""
    if encoder_id in PLAIN_IDS:
        return encoder_id, None, None
    if encoder_id in ENTANGLED_IDS:
        u1, u2, ent = encoder_id.split("-")
        return u1, u2, ent
    raise ValidationError(
        f"unknown encoder id {encoder_id!r}; expected one of {', '.join(ENCODER_IDS)}"
    )


@dataclass(frozen=True)
class EncoderSpec:
    id: str
    copies: int = 1
    descriptor_count: int = 1

    def __post_init__(self):
        parse_encoder_id(self.id)
        if self.copies not in (1, 2, 3):
            raise ValidationError(f"copies must be 1, 2 or 3, got {self.copies}")
        if self.descriptor_count < 1:
            raise ValidationError(
                f"descriptor_count must be >= 1, got {self.descriptor_count}"
            )

    @property
    def n_qubits(self) -> int:
        return self.copies * self.descriptor_count

    @property
    def uses_m_layer(self) -> bool:
        u1, u2, _ = parse_encoder_id(self.id)
        return u1 == "M" or u2 == "M"


def _rotation_layer(kind: str, values: np.ndarray) -> list[sv.Gate]:
    gates = []
    for q, v in enumerate(values):
        x = float(v)
        if kind == "M":
            gates.append(sv.ry(q, math.asin(x)))
            gates.append(sv.rz(q, math.acos(x * x)))
        elif kind == "A1":
            gates.append(sv.ry(q, x))
        elif kind == "A2":
            gates.append(sv.ry(q, x))
            gates.append(sv.rz(q, x))
        else:
            raise ValidationError(f"unknown sub-encoder {kind!r}")
    return gates


def entangler_ring(kind: str, n: int) -> list[sv.Gate]:
    """Full ring of CNOT or CZ gates; empty when there is only one qubit."""
    if n < 2:
        return []
    make = sv.cnot if kind == "CNOT" else sv.cz
    return [make(q, (q + 1) % n) for q in range(n)]


def build_encoder(spec: EncoderSpec, x) -> list[sv.Gate]:
    """Gate sequence loading the descriptor vector x (one value per qubit copy)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.descriptor_count,):
        raise ValidationError(
            f"encoder expects {spec.descriptor_count} descriptors, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise ValidationError("descriptor vector contains non-finite values")
    u1, u2, ent = parse_encoder_id(spec.id)
    if spec.uses_m_layer:
        for j, v in enumerate(x):
            if abs(v) > 1.0:
                raise DomainError(
                    f"descriptor {j} = {v:g} outside [-1, 1]; the M sub-encoder "
                    "is only defined there"
                )
    values = np.tile(x, spec.copies)  # descriptor j on qubits c*d + j
    gates = _rotation_layer(u1, values)
    if ent is not None:
        n = spec.n_qubits
        gates += entangler_ring(ent, n)
        gates += _rotation_layer(u2, values)
        gates += entangler_ring(ent, n)
    return gates
