"""Gradient-free training: simplex optimization, grid search, benchmarks.

``fit`` normalizes with training statistics only, minimizes the training
loss over theta with Nelder-Mead for every (layers, scale) grid point, and
selects the grid point with the highest validation R-squared (ties prefer
fewer layers, then a smaller scale). All randomness flows from the config
seed through named substreams, so reports are reproducible bit for bit;
wall-clock fields are the one documented exception.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSpec, param_count
from .data import Dataset, NormStats, normalize
from .encoders import EncoderSpec
from .errors import OptimizationError, ValidationError
from .model import (
    QmlModel,
    ReadoutSpec,
    encode_dataset,
    expectations_from_encoded,
    solve_beta,
)
from .seeding import substream

# --- metrics (single implementation shared with the classical baselines) ----


def mse(y, y_hat) -> float:
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape:
        raise ValidationError(f"shape mismatch {y.shape} vs {y_hat.shape}")
    return float(np.mean((y - y_hat) ** 2))


def rms(y, y_hat) -> float:
    return float(np.sqrt(mse(y, y_hat)))


def r_squared(y, y_hat) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValidationError(f"shape mismatch {y.shape} vs {y_hat.shape}")
    if y.size < 2:
        raise ValidationError("R^2 needs at least two samples")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValidationError("R^2 undefined: target has zero variance")
    ss_res = float(np.sum((y - y_hat) ** 2))
    return 1.0 - ss_res / ss_tot


# --- Nelder-Mead -------------------------------------------------------------


@dataclass(frozen=True)
class OptimizerOptions:
    max_iterations: int = 20000
    f_abs_tolerance: float = 1e-6
    x_abs_tolerance: float = 1e-6
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    initial_step: float = 0.1
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.reflection <= 0:
            raise ValidationError("reflection coefficient must be > 0")
        if self.expansion <= 1:
            raise ValidationError("expansion coefficient must be > 1")
        if not 0 < self.contraction < 1:
            raise ValidationError("contraction coefficient must be in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValidationError("shrink coefficient must be in (0, 1)")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")


@dataclass
class NelderMeadResult:
    theta: np.ndarray
    value: float
    trace: list[tuple[int, float]]
    iterations: int
    n_evals: int


def nelder_mead(objective, theta0, opts: OptimizerOptions | None = None) -> NelderMeadResult:
    """Minimize ``objective`` from ``theta0`` with a reflect/expand/contract/
    shrink simplex.

    Stops when the simplex function-value spread and the vertex spread are
    below ``f_abs_tolerance`` and ``x_abs_tolerance`` (a symmetric simplex
    around a minimum has zero value spread, so either test alone stops too
    early), or when ``max_iterations`` is reached; returns the best vertex.
    A non-finite objective value raises OptimizationError carrying the
    offending theta.
    """
    opts = opts or OptimizerOptions()
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    dim = theta0.size
    evals = 0

    def evaluate(point):
        nonlocal evals
        evals += 1
        value = float(objective(point))
        if not np.isfinite(value):
            raise OptimizationError(
                f"objective returned non-finite value {value!r}", theta=point.copy()
            )
        return value

    simplex = [theta0.copy()]
    for i in range(dim):
        vertex = theta0.copy()
        vertex[i] += opts.initial_step
        simplex.append(vertex)
    simplex = np.array(simplex)
    values = np.array([evaluate(v) for v in simplex])

    trace: list[tuple[int, float]] = []
    iterations = 0
    for iteration in range(opts.max_iterations):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        trace.append((iteration, float(values[0])))
        f_spread = float(values[-1] - values[0])
        x_spread = float(np.max(np.abs(simplex[1:] - simplex[0])))
        if f_spread < opts.f_abs_tolerance and x_spread < opts.x_abs_tolerance:
            break
        iterations = iteration + 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + opts.reflection * (centroid - worst)
        f_reflected = evaluate(reflected)
        if f_reflected < values[0]:
            expanded = centroid + opts.expansion * (reflected - centroid)
            f_expanded = evaluate(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-1]:
            contracted = centroid + opts.contraction * (reflected - centroid)
            f_contracted = evaluate(contracted)
            if f_contracted <= f_reflected:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        else:
            contracted = centroid + opts.contraction * (worst - centroid)
            f_contracted = evaluate(contracted)
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        # shrink toward the best vertex
        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + opts.shrink * (simplex[i] - simplex[0])
            values[i] = evaluate(simplex[i])

    order = np.argsort(values, kind="stable")
    simplex, values = simplex[order], values[order]
    if not trace or trace[-1][1] != values[0]:
        trace.append((iterations, float(values[0])))
    return NelderMeadResult(
        theta=simplex[0].copy(),
        value=float(values[0]),
        trace=trace,
        iterations=iterations,
        n_evals=evals,
    )


# --- grid search fit ---------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    layer_values: tuple[int, ...] = tuple(range(3, 13))
    scale_values: tuple[float, ...] = (1.0, 2.0, 4.0, 6.0, 8.0, 10.0)

    def __post_init__(self):
        if not self.layer_values or not self.scale_values:
            raise ValidationError("grid must contain at least one L and one f value")
        if any(layers < 1 for layers in self.layer_values):
            raise ValidationError("layer values must be >= 1")
        if any(scale <= 0 for scale in self.scale_values):
            raise ValidationError("scale values must be positive")


@dataclass(frozen=True)
class FitConfig:
    encoder: EncoderSpec
    unit: str = "cnot"
    readout_mode: str = "pure"
    measured_qubit: int = 0
    n_measured: int = 1
    grid: GridSpec = field(default_factory=GridSpec)
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    seed: int = 0
    ising_time: float = 10.0
    ising_trotter_steps: int = 0


@dataclass
class GridPointResult:
    layers: int
    scale: float
    r2_train: float
    r2_val: float
    loss: float
    iterations: int
    seconds: float


@dataclass
class FitReport:
    encoder_id: str
    n_qubits: int
    unit: str
    readout_mode: str
    seed: int
    layers: int
    scale: float
    iterations: int
    final_loss: float
    r2_train: float
    r2_val: float
    mse_train_norm: float
    mse_val_norm: float
    rms_train_norm: float
    rms_val_norm: float
    mse_train: float
    mse_val: float
    rms_train: float
    rms_val: float
    trace: list[tuple[int, float]]
    grid: list[GridPointResult]
    wall_time_s: float

    def json_payload(self) -> dict:
        """Deterministic report content; wall-clock fields are excluded."""
        return {
            "encoder_id": self.encoder_id,
            "n_qubits": self.n_qubits,
            "unit": self.unit,
            "readout_mode": self.readout_mode,
            "seed": self.seed,
            "layers": self.layers,
            "scale": self.scale,
            "iterations": self.iterations,
            "final_loss": self.final_loss,
            "r2_train": self.r2_train,
            "r2_val": self.r2_val,
            "mse_train_norm": self.mse_train_norm,
            "mse_val_norm": self.mse_val_norm,
            "rms_train_norm": self.rms_train_norm,
            "rms_val_norm": self.rms_val_norm,
            "mse_train": self.mse_train,
            "mse_val": self.mse_val,
            "rms_train": self.rms_train,
            "rms_val": self.rms_val,
            "trace": [[i, v] for i, v in self.trace],
            "grid": [
                {
                    "layers": row.layers,
                    "scale": row.scale,
                    "r2_train": row.r2_train,
                    "r2_val": row.r2_val,
                    "loss": row.loss,
                    "iterations": row.iterations,
                }
                for row in self.grid
            ],
        }

    def grid_csv(self) -> str:
        lines = ["encoder_id,n_qubits,L,f,r2_train,r2_val,loss,iterations,seconds"]
        for row in self.grid:
            lines.append(
                f"{self.encoder_id},{self.n_qubits},{row.layers},{row.scale:g},"
                f"{row.r2_train:.6f},{row.r2_val:.6f},{row.loss:.10g},"
                f"{row.iterations},{row.seconds:.3f}"
            )
        return "\n".join(lines) + "\n"


@dataclass
class _GridOutcome:
    row: GridPointResult
    theta: np.ndarray
    beta: np.ndarray | None
    trace: list[tuple[int, float]]
    preds_train_norm: np.ndarray
    preds_val_norm: np.ndarray


def _ansatz_for(config: FitConfig, layers: int) -> AnsatzSpec:
    return AnsatzSpec(
        unit=config.unit,
        layers=layers,
        n_qubits=config.encoder.n_qubits,
        ising_seed=config.seed,
        ising_time=config.ising_time,
        ising_trotter_steps=config.ising_trotter_steps,
    )


def _readout_qubits(config: FitConfig) -> list[int]:
    if config.readout_mode == "pure":
        return [config.measured_qubit]
    return list(range(config.n_measured))


def _evaluate_grid_point(config, layers_index, scale_index, encoded_train, y_train,
                         encoded_val) -> _GridOutcome:
    layers = config.grid.layer_values[layers_index]
    scale = config.grid.scale_values[scale_index]
    spec = _ansatz_for(config, layers)
    qubits = _readout_qubits(config)
    hybrid = config.readout_mode == "hybrid"
    start = time.perf_counter()

    def objective(theta):
        m = scale * expectations_from_encoded(spec, theta, encoded_train, qubits)
        if hybrid:
            beta = solve_beta(m, y_train)
            residual = y_train - beta @ m
        else:
            residual = y_train - m[0]
        return float(np.mean(residual**2))

    best = None
    for restart in range(config.optimizer.restarts):
        rng = substream(config.seed, "init", layers_index, scale_index, restart)
        theta0 = rng.uniform(0.0, 2.0 * np.pi, param_count(spec))
        result = nelder_mead(objective, theta0, config.optimizer)
        if best is None or result.value < best.value:
            best = result

    m_train = scale * expectations_from_encoded(spec, best.theta, encoded_train, qubits)
    beta = solve_beta(m_train, y_train) if hybrid else None
    preds_train = beta @ m_train if hybrid else m_train[0]
    m_val = scale * expectations_from_encoded(spec, best.theta, encoded_val, qubits)
    preds_val = beta @ m_val if hybrid else m_val[0]
    return _GridOutcome(
        row=GridPointResult(
            layers=layers,
            scale=scale,
            r2_train=r_squared(y_train, preds_train),
            r2_val=np.nan,  # filled by the caller, which owns the val targets
            loss=best.value,
            iterations=best.iterations,
            seconds=time.perf_counter() - start,
        ),
        theta=best.theta,
        beta=beta,
        trace=best.trace,
        preds_train_norm=preds_train,
        preds_val_norm=preds_val,
    )


def _grid_worker(payload):
    return _evaluate_grid_point(*payload)


def fit(config: FitConfig, train: Dataset, val: Dataset,
        jobs: int = 1) -> tuple[QmlModel, FitReport]:
    """Grid-searched Nelder-Mead fit; returns the winning model and report.

    ``jobs > 1`` evaluates grid points in worker processes; every grid point
    seeds its own substream, so results do not depend on scheduling.
    """
    started = time.perf_counter()
    if train.descriptor_names != val.descriptor_names:
        raise ValidationError("train and validation sets must share the descriptor schema")
    if config.encoder.descriptor_count != train.n_descriptors:
        raise ValidationError(
            f"encoder expects {config.encoder.descriptor_count} descriptors but the "
            f"data has {train.n_descriptors}"
        )
    if float(np.var(train.y)) == 0.0:
        raise ValidationError("training target has zero variance; R^2 undefined")
    if val.n_samples >= 2 and float(np.var(val.y)) == 0.0:
        raise ValidationError("validation target has zero variance; R^2 undefined")
    if config.readout_mode == "hybrid" and train.n_samples < config.n_measured:
        raise ValidationError("hybrid readout needs at least n_measured training rows")
    if max(_readout_qubits(config)) >= config.encoder.n_qubits:
        raise ValidationError("readout qubits exceed the register size")

    train_norm, stats = normalize(train)
    val_norm = stats.apply(val)
    encoded_train = encode_dataset(config.encoder, train_norm.X)
    encoded_val = encode_dataset(config.encoder, val_norm.X)

    points = [
        (layers_index, scale_index)
        for layers_index in range(len(config.grid.layer_values))
        for scale_index in range(len(config.grid.scale_values))
    ]
    payloads = [
        (config, li, si, encoded_train, train_norm.y, encoded_val)
        for li, si in points
    ]
    if jobs > 1 and len(points) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_grid_worker, payloads))
    else:
        outcomes = [_grid_worker(payload) for payload in payloads]
    for outcome in outcomes:
        outcome.row.r2_val = r_squared(val_norm.y, outcome.preds_val_norm)

    winner = min(outcomes, key=lambda o: (-o.row.r2_val, o.row.layers, o.row.scale))
    report = _build_report(config, stats, winner, outcomes, train_norm, val_norm,
                           started)
    readout = ReadoutSpec(
        mode=config.readout_mode,
        measured_qubit=config.measured_qubit,
        n_measured=config.n_measured,
        scale=winner.row.scale,
    )
    model = QmlModel(
        encoder=config.encoder,
        ansatz=_ansatz_for(config, winner.row.layers),
        readout=readout,
        theta=winner.theta,
        norm=stats,
        seed=config.seed,
        beta=winner.beta,
    )
    return model, report


def _build_report(config, stats: NormStats, winner: _GridOutcome, outcomes,
                  train_norm: Dataset, val_norm: Dataset, started: float) -> FitReport:
    y_train_orig = stats.denormalize_target(train_norm.y)
    y_val_orig = stats.denormalize_target(val_norm.y)
    preds_train_orig = stats.denormalize_target(winner.preds_train_norm)
    preds_val_orig = stats.denormalize_target(winner.preds_val_norm)
    return FitReport(
        encoder_id=config.encoder.id,
        n_qubits=config.encoder.n_qubits,
        unit=config.unit,
        readout_mode=config.readout_mode,
        seed=config.seed,
        layers=winner.row.layers,
        scale=winner.row.scale,
        iterations=winner.row.iterations,
        final_loss=winner.row.loss,
        r2_train=winner.row.r2_train,
        r2_val=winner.row.r2_val,
        mse_train_norm=mse(train_norm.y, winner.preds_train_norm),
        mse_val_norm=mse(val_norm.y, winner.preds_val_norm),
        rms_train_norm=rms(train_norm.y, winner.preds_train_norm),
        rms_val_norm=rms(val_norm.y, winner.preds_val_norm),
        mse_train=mse(y_train_orig, preds_train_orig),
        mse_val=mse(y_val_orig, preds_val_orig),
        rms_train=rms(y_train_orig, preds_train_orig),
        rms_val=rms(y_val_orig, preds_val_orig),
        trace=winner.trace,
        grid=[o.row for o in outcomes],
        wall_time_s=time.perf_counter() - started,
    )


# --- 1-D benchmark harness ---------------------------------------------------

BENCHMARK_TASKS = {
    "x2": lambda x: x**2,
    "exp": np.exp,
    "sin": np.sin,
    "abs": np.abs,
}

# Documented benchmark defaults: one descriptor re-encoded on three qubits
# through the A1 encoder, six unit layers, scale factor 2, trained on 50
# evenly spaced points in [-1, 1].
BENCHMARK_ENCODER = EncoderSpec("A1", copies=3, descriptor_count=1)
BENCHMARK_LAYERS = 6
BENCHMARK_SCALE = 2.0
BENCHMARK_POINTS = 50
BENCHMARK_OPTIMIZER = OptimizerOptions(max_iterations=4000)


def benchmark_dataset(task: str, n_points: int = BENCHMARK_POINTS) -> Dataset:
    if task not in BENCHMARK_TASKS:
        raise ValidationError(
            f"unknown benchmark task {task!r}; expected one of {sorted(BENCHMARK_TASKS)}"
        )
    x = np.linspace(-1.0, 1.0, n_points)
    return Dataset(["x"], x[:, None], BENCHMARK_TASKS[task](x), source=f"benchmark:{task}")


def benchmark_task(task: str, unit: str, seed: int,
                   optimizer: OptimizerOptions | None = None) -> tuple[QmlModel, FitReport]:
    """Fit one benchmark function with the documented defaults."""
    optimizer = optimizer or BENCHMARK_OPTIMIZER
    ds = benchmark_dataset(task)
    config = FitConfig(
        encoder=BENCHMARK_ENCODER,
        unit=unit,
        grid=GridSpec(layer_values=(BENCHMARK_LAYERS,), scale_values=(BENCHMARK_SCALE,)),
        optimizer=optimizer,
        seed=seed,
    )
    return fit(config, ds, ds)
