"""Classical reference regressors: multiple linear regression and an RBF net.

The RBF network is a standard construction: k centers from seeded k-means
(farthest-point init, 20 Lloyd iterations), one shared Gaussian width
sigma = 2 x (mean nearest-neighbor distance among centers) floored at 1e-6,
and a ridge least-squares output layer with an unpenalized intercept. The
width rule tracks the data scale at moderate k and tightens as centers
densify, so the net stays a flexible smoother at every center count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import persist
from .data import Dataset
from .errors import NumericalError, ParseError, ValidationError
from .fileio import atomic_write_text
from .seeding import substream

MLR_RIDGE_JITTER = 1e-12
DEFAULT_RBF_RIDGE = 1e-6
DEFAULT_RBF_GRID = (5, 10, 20, 40)
KMEANS_ITERATIONS = 20


@dataclass
class MlrModel:
    weights: np.ndarray
    intercept: float


@dataclass
class RbfModel:
    centers: np.ndarray
    width: float
    weights: np.ndarray
    intercept: float
    ridge: float

    def __post_init__(self):
        if self.centers.ndim != 2 or self.centers.shape[0] < 1:
            raise ValidationError("RBF model needs at least one center")
        if self.width <= 0:
            raise ValidationError("RBF width must be positive")
        if self.ridge < 0:
            raise ValidationError("ridge must be >= 0")


def _solve_with_intercept(design: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    """Least squares on [design, 1] with ridge on the non-intercept weights."""
    n = design.shape[0]
    augmented = np.column_stack([design, np.ones(n)])
    gram = augmented.T @ augmented
    penalty = np.eye(augmented.shape[1])
    penalty[-1, -1] = 0.0
    solution = np.linalg.solve(gram + ridge * penalty, augmented.T @ y)
    if not np.all(np.isfinite(solution)):
        raise NumericalError("baseline least squares produced non-finite weights")
    return solution


def fit_mlr(train: Dataset) -> MlrModel:
    """Ordinary least squares with intercept (tiny ridge jitter for safety)."""
    if train.n_samples <= train.n_descriptors:
        raise ValidationError(
            f"MLR needs more rows ({train.n_samples}) than descriptors "
            f"({train.n_descriptors})"
        )
    solution = _solve_with_intercept(train.X, train.y, MLR_RIDGE_JITTER)
    return MlrModel(weights=solution[:-1], intercept=float(solution[-1]))


def predict_mlr(model: MlrModel, X) -> np.ndarray:
    return np.atleast_2d(np.asarray(X, dtype=float)) @ model.weights + model.intercept


def farthest_point_order(X: np.ndarray, k: int, seed: int) -> np.ndarray:
    """First k indices of the seeded farthest-point traversal of X."""
    n = X.shape[0]
    rng = substream(seed, "kmeans")
    first = int(rng.integers(n))
    order = [first]
    dist = np.sum((X - X[first]) ** 2, axis=1)
    while len(order) < k:
        pick = int(np.argmax(dist))
        order.append(pick)
        dist = np.minimum(dist, np.sum((X - X[pick]) ** 2, axis=1))
    return np.array(order, dtype=int)


def _kmeans(X: np.ndarray, k: int, seed: int) -> np.ndarray:
    centers = X[farthest_point_order(X, k, seed)].copy()
    for _ in range(KMEANS_ITERATIONS):
        dist = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        assignment = np.argmin(dist, axis=1)
        for j in range(k):
            members = X[assignment == j]
            if len(members):  # empty clusters keep their previous center
                centers[j] = members.mean(axis=0)
    return centers


WIDTH_FACTOR = 2.0


def _shared_width(centers: np.ndarray) -> float:
    k = centers.shape[0]
    if k < 2:
        return 1e-6
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(dist, np.inf)
    return max(WIDTH_FACTOR * float(dist.min(axis=1).mean()), 1e-6)


def _activations(X: np.ndarray, centers: np.ndarray, width: float) -> np.ndarray:
    sq = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    return np.exp(-sq / (2.0 * width**2))


def fit_rbf_with_centers(train: Dataset, centers: np.ndarray,
                         ridge: float = DEFAULT_RBF_RIDGE,
                         width: float | None = None) -> RbfModel:
    """Fit only the output layer for a given, fixed center set."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if width is None:
        width = _shared_width(centers)
    phi = _activations(train.X, centers, width)
    solution = _solve_with_intercept(phi, train.y, ridge)
    return RbfModel(centers=centers, width=width, weights=solution[:-1],
                    intercept=float(solution[-1]), ridge=ridge)


def fit_rbf(train: Dataset, k: int, ridge: float = DEFAULT_RBF_RIDGE,
            seed: int = 0) -> RbfModel:
    if not 1 <= k <= train.n_samples:
        raise ValidationError(
            f"center count k must be in [1, {train.n_samples}], got {k}"
        )
    centers = _kmeans(train.X, k, seed)
    return fit_rbf_with_centers(train, centers, ridge)


def predict_rbf(model: RbfModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return _activations(X, model.centers, model.width) @ model.weights + model.intercept


def select_rbf(train: Dataset, val: Dataset, k_values=DEFAULT_RBF_GRID,
               ridge: float = DEFAULT_RBF_RIDGE, seed: int = 0) -> tuple[RbfModel, int]:
    """Pick the center count with the best validation R^2."""
    from .training import r_squared

    candidates = [k for k in k_values if 1 <= k <= train.n_samples]
    if not candidates:
        raise ValidationError("no admissible center counts for this training size")
    best = None
    for k in candidates:
        model = fit_rbf(train, k, ridge=ridge, seed=seed)
        score = r_squared(val.y, predict_rbf(model, val.X))
        if best is None or score > best[0]:
            best = (score, k, model)
    return best[2], best[1]


# --- persistence (same format family as the quantum models) ------------------


def mlr_to_text(model: MlrModel) -> str:
    return persist.render("mlr", [
        ("weights", persist.format_array(model.weights)),
        ("intercept", persist.format_float(model.intercept)),
    ])


def rbf_to_text(model: RbfModel) -> str:
    k, d = model.centers.shape
    return persist.render("rbf", [
        ("k", str(k)),
        ("d", str(d)),
        ("centers", persist.format_array(model.centers)),
        ("width", persist.format_float(model.width)),
        ("weights", persist.format_array(model.weights)),
        ("intercept", persist.format_float(model.intercept)),
        ("ridge", persist.format_float(model.ridge)),
    ])


def baseline_from_text(text: str, source: str = "<model>"):
    kind, entries = persist.parse(text, source)

    def get(key):
        return persist.require(entries, key, source)

    if kind == "mlr":
        return MlrModel(
            weights=persist.parse_array(get("weights"), source),
            intercept=persist.parse_float(get("intercept"), source),
        )
    if kind == "rbf":
        k = persist.parse_int(get("k"), source)
        d = persist.parse_int(get("d"), source)
        centers = persist.parse_array(get("centers"), source)
        if centers.size != k * d:
            raise ParseError(f"{source}: centers array must hold {k * d} values")
        return RbfModel(
            centers=centers.reshape(k, d),
            width=persist.parse_float(get("width"), source),
            weights=persist.parse_array(get("weights"), source),
            intercept=persist.parse_float(get("intercept"), source),
            ridge=persist.parse_float(get("ridge"), source),
        )
    raise ParseError(f"{source}: unknown baseline kind {kind!r}")


def save_baseline(model, path: str):
    if isinstance(model, MlrModel):
        atomic_write_text(path, mlr_to_text(model))
    elif isinstance(model, RbfModel):
        atomic_write_text(path, rbf_to_text(model))
    else:
        raise ValidationError(f"not a baseline model: {type(model).__name__}")


def load_baseline(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return baseline_from_text(handle.read(), source=path)
