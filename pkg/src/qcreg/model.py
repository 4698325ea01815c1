"""Prediction models: encoder + variational circuit + Z-expectation readout.

Pure readout scales a single qubit's <Z> by the factor f; hybrid readout
feeds the scaled expectations of the first M qubits into a linear layer
whose weights beta are re-solved in closed form (ridge-jittered normal
equations) at every loss evaluation. Targets are handled on the normalized
[0, 1] scale inside the loss; ``predict`` maps back to original units and
never clamps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import persist
from . import statevector as sv
from .ansatz import AnsatzSpec, param_count
from .data import Dataset, NormStats
from .encoders import EncoderSpec, build_encoder
from .errors import NumericalError, ParseError, ValidationError
from .fileio import atomic_write_text

BETA_RIDGE = 1e-10

READOUT_MODES = ("pure", "hybrid")
DEFAULT_HYBRID_SCALE = 4.0


@dataclass(frozen=True)
class ReadoutSpec:
    """Measurement side of the model: which qubits, and the scale factor f."""

    mode: str = "pure"
    measured_qubit: int = 0
    n_measured: int = 1
    scale: float = 1.0

    def __post_init__(self):
        if self.mode not in READOUT_MODES:
            raise ValidationError(f"readout mode must be pure or hybrid, got {self.mode!r}")
        if self.scale <= 0:
            raise ValidationError(f"scale must be positive, got {self.scale}")
        if self.measured_qubit < 0:
            raise ValidationError("measured_qubit must be >= 0")
        if self.n_measured < 1:
            raise ValidationError("n_measured must be >= 1")

    def qubits(self) -> list[int]:
        if self.mode == "pure":
            return [self.measured_qubit]
        return list(range(self.n_measured))


@dataclass
class QmlModel:
    encoder: EncoderSpec
    ansatz: AnsatzSpec
    readout: ReadoutSpec
    theta: np.ndarray
    norm: NormStats
    seed: int = 0
    beta: np.ndarray | None = None

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        n = self.encoder.n_qubits
        if n != self.ansatz.n_qubits:
            raise ValidationError(
                f"encoder spans {n} qubits but ansatz expects {self.ansatz.n_qubits}"
            )
        if self.theta.shape != (param_count(self.ansatz),):
            raise ValidationError(
                f"theta must have length {param_count(self.ansatz)}, "
                f"got shape {self.theta.shape}"
            )
        if max(self.readout.qubits()) >= n:
            raise ValidationError("readout qubits exceed the register size")
        if self.readout.mode == "pure":
            if self.beta is not None:
                raise ValidationError("beta is only meaningful for hybrid readout")
        elif self.beta is not None:
            self.beta = np.asarray(self.beta, dtype=float)
            if self.beta.shape != (self.readout.n_measured,):
                raise ValidationError(
                    f"beta must have length {self.readout.n_measured}, "
                    f"got shape {self.beta.shape}"
                )


def encode_dataset(spec: EncoderSpec, X_norm: np.ndarray) -> np.ndarray:
    """Encoded statevectors, one row per sample: shape (N, 2**n)."""
    X_norm = np.atleast_2d(np.asarray(X_norm, dtype=float))
    n = spec.n_qubits
    out = np.empty((X_norm.shape[0], 2**n), dtype=np.complex128)
    for i, row in enumerate(X_norm):
        state = sv.apply_circuit(sv.init_zero(n), build_encoder(spec, row))
        out[i] = state.amplitudes
    return out


@lru_cache(maxsize=4)
def _cached_ising_unitary(fields, couplings, time, n):
    ham = sv.ising_hamiltonian_dense(fields, couplings, n)
    import scipy.linalg

    return scipy.linalg.expm(-1j * time * ham)


# Up to this register size the whole circuit is composed into one dense
# unitary, which beats gate-wise kernels for the batch sizes seen in
# training (the cube of 2**n stays below 4nL * batch * 2**n).
_DENSE_COMPOSE_MAX_QUBITS = 6


@lru_cache(maxsize=8)
def _entangler_unitary(unit: str, n: int) -> np.ndarray:
    """Dense matrix of one ring block, built by driving basis states."""
    from .encoders import entangler_ring

    basis = np.eye(2**n, dtype=np.complex128)
    for gate in entangler_ring(unit.upper(), n):
        basis = sv.apply_gate_array(basis, gate, n)
    return basis.T.copy()  # rows held U @ e_i, i.e. U transposed


def _entangler_block_unitary(spec: AnsatzSpec) -> np.ndarray | None:
    """Dense entangler unitary, or None when the block must stay gate-wise."""
    if spec.unit == "ising":
        from .ansatz import ising_coefficients

        if spec.ising_trotter_steps != 0:
            return None
        fields, couplings = ising_coefficients(spec)
        return _cached_ising_unitary(
            tuple(fields), tuple(couplings), spec.ising_time, spec.n_qubits
        )
    return _entangler_unitary(spec.unit, spec.n_qubits)


def _fused_rotations(theta: np.ndarray, layer: int, n: int) -> list[np.ndarray]:
    """One 2x2 matrix per qubit for the layer's RX-RZ-RX triple."""
    mats = []
    for q in range(n):
        base = (layer * n + q) * 3
        first = sv.rotation_matrix("RX", theta[base])
        mid = sv.rotation_matrix("RZ", theta[base + 1])
        last = sv.rotation_matrix("RX", theta[base + 2])
        mats.append(last @ mid @ first)
    return mats


def _kron_chain(mats: list[np.ndarray]) -> np.ndarray:
    # qubit 0 is the least significant bit, so its factor sits rightmost
    out = mats[-1]
    for mat in reversed(mats[:-1]):
        out = np.kron(out, mat)
    return out


@lru_cache(maxsize=8)
def _cnot_ring_gather(n: int) -> np.ndarray:
    """Index array g with (ring block applied to psi) = psi[g].

    The CNOT ring permutes basis states; composing the per-gate XOR maps
    once replaces 10+ kernel calls with a single gather.
    """
    destination = np.arange(2**n)
    for control in range(n):
        target = (control + 1) % n
        destination = destination ^ (((destination >> control) & 1) << target)
    gather = np.empty(2**n, dtype=np.intp)
    gather[destination] = np.arange(2**n)
    return gather


@lru_cache(maxsize=8)
def _cz_ring_signs(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    signs = np.ones(2**n)
    for control in range(n):
        target = (control + 1) % n
        both = ((idx >> control) & 1) & ((idx >> target) & 1)
        signs *= 1.0 - 2.0 * both
    return signs


_ROTATION_BLOCK_QUBITS = 5


def _apply_contiguous_block(amps: np.ndarray, mat: np.ndarray, lo: int, width: int,
                            n: int) -> np.ndarray:
    """Apply a 2**width unitary to the contiguous qubits [lo, lo + width)."""
    lead = amps.shape[:-1]
    view = amps.reshape(lead + (2 ** (n - lo - width), 2**width, 2**lo))
    out = np.matmul(mat, view)  # broadcast over leading axes; BLAS-backed
    return np.ascontiguousarray(out).reshape(lead + (2**n,))


def apply_ansatz_to_encoded(
    spec: AnsatzSpec, theta: np.ndarray, encoded: np.ndarray
) -> np.ndarray:
    """Push a batch of encoded states through the variational circuit.

    Matches gate-by-gate simulation of :func:`qcreg.ansatz.build_ansatz`
    (pinned by tests). Internally each layer's rotation triples are fused
    into contiguous multi-qubit blocks, ring blocks become a cached
    permutation (CNOT) or sign vector (CZ), and registers up to
    ``_DENSE_COMPOSE_MAX_QUBITS`` are composed into one dense unitary.
    """
    theta = np.asarray(theta, dtype=float)
    expected = param_count(spec)
    if theta.shape != (expected,):
        raise ValidationError(
            f"theta must have length 3nL = {expected}, got shape {theta.shape}"
        )
    if not np.all(np.isfinite(theta)):
        raise ValidationError("theta contains non-finite values")
    n = spec.n_qubits
    entangler = _entangler_block_unitary(spec)

    if entangler is not None and n <= _DENSE_COMPOSE_MAX_QUBITS:
        total = np.eye(2**n, dtype=np.complex128)
        for layer in range(spec.layers):
            rot = _kron_chain(_fused_rotations(theta, layer, n))
            total = rot @ entangler @ total
        return encoded @ total.T

    blocks = [(lo, min(lo + _ROTATION_BLOCK_QUBITS, n))
              for lo in range(0, n, _ROTATION_BLOCK_QUBITS)]
    amps = encoded
    for layer in range(spec.layers):
        if spec.unit == "cnot":
            amps = amps[..., _cnot_ring_gather(n)] if n >= 2 else amps
        elif spec.unit == "cz":
            amps = amps * _cz_ring_signs(n) if n >= 2 else amps
        elif entangler is not None:
            amps = amps @ entangler.T
        else:  # trotterized Ising evolution stays gate-wise
            for gate in _entangler_gates(spec):
                amps = sv.apply_gate_array(amps, gate, n)
        mats = _fused_rotations(theta, layer, n)
        for lo, hi in blocks:
            amps = _apply_contiguous_block(amps, _kron_chain(mats[lo:hi]), lo,
                                           hi - lo, n)
    return amps


@lru_cache(maxsize=8)
def _entangler_gates_cached(unit: str, n: int, ising_seed: int, ising_time: float,
                            ising_trotter_steps: int) -> tuple:
    from .ansatz import AnsatzSpec as _Spec
    from .ansatz import _entangler_block

    return tuple(_entangler_block(_Spec(unit, 1, n, ising_seed, ising_time,
                                        ising_trotter_steps)))


def _entangler_gates(spec: AnsatzSpec) -> tuple:
    return _entangler_gates_cached(spec.unit, spec.n_qubits, spec.ising_seed,
                                   spec.ising_time, spec.ising_trotter_steps)


def expectations_from_encoded(
    ansatz: AnsatzSpec, theta: np.ndarray, encoded: np.ndarray, qubits
) -> np.ndarray:
    """Matrix of <Z_q> values, shape (len(qubits), N)."""
    amps = apply_ansatz_to_encoded(ansatz, theta, encoded)
    rows = [sv.expectation_z_array(amps, q, ansatz.n_qubits) for q in qubits]
    return np.atleast_2d(np.stack(rows))


def expectation_matrix(model: QmlModel, X_norm: np.ndarray) -> np.ndarray:
    """Scaled readout matrix m_q = f * <Z_q>, shape (M, N)."""
    encoded = encode_dataset(model.encoder, X_norm)
    z = expectations_from_encoded(
        model.ansatz, model.theta, encoded, model.readout.qubits()
    )
    return model.readout.scale * z


def predict_normalized(model: QmlModel, X_norm: np.ndarray) -> np.ndarray:
    """Predictions on the normalized target scale; no clamping."""
    m = expectation_matrix(model, X_norm)
    if model.readout.mode == "pure":
        return m[0]
    if model.beta is None:
        raise ValidationError("hybrid model has no solved beta; run loss() or fit first")
    return model.beta @ m


def predict(model: QmlModel, x_raw) -> float:
    """Predict one sample given raw descriptor values (original units)."""
    x_raw = np.asarray(x_raw, dtype=float)
    if x_raw.shape != (model.encoder.descriptor_count,):
        raise ValidationError(
            f"expected {model.encoder.descriptor_count} descriptors, got {x_raw.shape}"
        )
    x_norm = model.norm.normalize_features(x_raw[None, :])
    y_norm = predict_normalized(model, x_norm)
    return float(model.norm.denormalize_target(y_norm)[0])


def predict_batch(model: QmlModel, X_raw: np.ndarray) -> np.ndarray:
    X_norm = model.norm.normalize_features(np.atleast_2d(X_raw))
    return model.norm.denormalize_target(predict_normalized(model, X_norm))


def solve_beta(expectations: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares readout weights via ridge-jittered normal equations."""
    m = np.atleast_2d(np.asarray(expectations, dtype=float))
    y = np.asarray(y, dtype=float)
    n_readout, n_samples = m.shape
    if y.shape != (n_samples,):
        raise ValidationError(
            f"expectation matrix has {n_samples} columns but y has shape {y.shape}"
        )
    if n_readout > n_samples:
        raise ValidationError(
            f"underdetermined readout: {n_readout} measured qubits, "
            f"{n_samples} samples"
        )
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(y))):
        raise ValidationError("non-finite values in the readout solve")
    gram = m @ m.T + BETA_RIDGE * np.eye(n_readout)
    beta = np.linalg.solve(gram, m @ y)
    if not np.all(np.isfinite(beta)):
        raise NumericalError("readout solve produced non-finite weights")
    return beta


def loss(model: QmlModel, dataset: Dataset) -> float:
    """Mean squared residual on the normalized scale.

    The dataset must already be normalized (targets in [0, 1]). For hybrid
    readout the optimal beta is re-solved here and stored on the model.
    There is no regularization term on theta.
    """
    if dataset.n_samples < 1:
        raise ValidationError("loss needs a non-empty dataset")
    m = expectation_matrix(model, dataset.X)
    if model.readout.mode == "hybrid":
        model.beta = solve_beta(m, dataset.y)
        residual = dataset.y - model.beta @ m
    else:
        residual = dataset.y - m[0]
    return float(np.mean(residual**2))


# --- persistence -------------------------------------------------------------


def model_to_text(model: QmlModel) -> str:
    entries = [
        ("encoder.id", model.encoder.id),
        ("encoder.copies", str(model.encoder.copies)),
        ("encoder.descriptor_count", str(model.encoder.descriptor_count)),
        ("ansatz.unit", model.ansatz.unit),
        ("ansatz.layers", str(model.ansatz.layers)),
        ("ansatz.n_qubits", str(model.ansatz.n_qubits)),
        ("ansatz.ising_seed", str(model.ansatz.ising_seed)),
        ("ansatz.ising_time", persist.format_float(model.ansatz.ising_time)),
        ("ansatz.ising_trotter_steps", str(model.ansatz.ising_trotter_steps)),
        ("readout.mode", model.readout.mode),
        ("readout.measured_qubit", str(model.readout.measured_qubit)),
        ("readout.n_measured", str(model.readout.n_measured)),
        ("readout.scale", persist.format_float(model.readout.scale)),
        ("norm.feature_min", persist.format_array(model.norm.feature_min)),
        ("norm.feature_max", persist.format_array(model.norm.feature_max)),
        ("norm.target_min", persist.format_float(model.norm.target_min)),
        ("norm.target_max", persist.format_float(model.norm.target_max)),
        ("seed", str(model.seed)),
        ("theta", persist.format_array(model.theta)),
    ]
    if model.beta is not None:
        entries.append(("beta", persist.format_array(model.beta)))
    return persist.render("qml", entries)


def model_from_text(text: str, source: str = "<model>") -> QmlModel:
    kind, entries = persist.parse(text, source)
    if kind != "qml":
        raise ParseError(f"{source}: expected kind 'qml', found {kind!r}")
    def get(key):
        return persist.require(entries, key, source)
    encoder = EncoderSpec(
        id=get("encoder.id"),
        copies=persist.parse_int(get("encoder.copies"), source),
        descriptor_count=persist.parse_int(get("encoder.descriptor_count"), source),
    )
    ansatz = AnsatzSpec(
        unit=get("ansatz.unit"),
        layers=persist.parse_int(get("ansatz.layers"), source),
        n_qubits=persist.parse_int(get("ansatz.n_qubits"), source),
        ising_seed=persist.parse_int(get("ansatz.ising_seed"), source),
        ising_time=persist.parse_float(get("ansatz.ising_time"), source),
        ising_trotter_steps=persist.parse_int(get("ansatz.ising_trotter_steps"), source),
    )
    readout = ReadoutSpec(
        mode=get("readout.mode"),
        measured_qubit=persist.parse_int(get("readout.measured_qubit"), source),
        n_measured=persist.parse_int(get("readout.n_measured"), source),
        scale=persist.parse_float(get("readout.scale"), source),
    )
    norm = NormStats(
        feature_min=persist.parse_array(get("norm.feature_min"), source),
        feature_max=persist.parse_array(get("norm.feature_max"), source),
        target_min=persist.parse_float(get("norm.target_min"), source),
        target_max=persist.parse_float(get("norm.target_max"), source),
    )
    beta = persist.parse_array(entries["beta"], source) if "beta" in entries else None
    return QmlModel(
        encoder=encoder,
        ansatz=ansatz,
        readout=readout,
        theta=persist.parse_array(get("theta"), source),
        norm=norm,
        seed=persist.parse_int(get("seed"), source),
        beta=beta,
    )


def save_model(model: QmlModel, path: str):
    atomic_write_text(path, model_to_text(model))


def load_model(path: str) -> QmlModel:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_text(handle.read(), source=path)
