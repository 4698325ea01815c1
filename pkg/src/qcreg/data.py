"""Tabular regression data: CSV ingestion, normalization, splits, surrogate.

CSV dialect everywhere: UTF-8, comma separator, decimal point, one header
row, LF line endings; the last column is the regression target.

Normalization maps descriptors to [-1, 1] (the symmetric range keeps the
M-type encoders inside their arcsin domain) and the target to [0, 1].
Validation rows are always transformed with the training constants, so they
may leave the nominal ranges.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParseError, ValidationError
from .fileio import atomic_write_text
from .seeding import substream

PHENOL_DESCRIPTORS = ("logKow", "pKa", "E_HOMO", "E_LUMO", "N_hdon")
PHENOL_TARGET = "log_inv_IC50"

# Descriptor generation ranges for the synthetic surrogate. The d = 5 table
# mimics a small-molecule descriptor panel (hydrophobicity, acidity,
# frontier-orbital energies, H-bond donor count); other widths cycle the
# generic table.
_SURROGATE_RANGES_5 = (
    (-1.0, 6.5),
    (3.5, 11.0),
    (-9.8, -8.2),
    (-1.4, 0.9),
    (0.0, 3.0),
)
_SURROGATE_RANGES_GENERIC = ((-2.0, 3.0), (0.0, 10.0), (-5.0, -1.0), (-1.0, 1.0))

# Fixed coefficient tables of the surrogate target (cycled over columns):
# y = sum_j LIN[j] z_j + sum_j QUAD[j] z_j^2 + sum_j INTER[j] z_j z_{j+1}
#     + 0.8 sin(pi z_0) + noise,   z_j = column j scaled to [-1, 1].
_LIN = (0.9, -0.7, 0.55, -0.45, 0.65)
_QUAD = (0.85, 0.6, -0.5, 0.4, 0.3)
_INTER = (0.6, -0.5, 0.45, 0.35, -0.4)
_SIN_COEF = 0.8
_NOISE_SCALE = 0.15


@dataclass
class Dataset:
    descriptor_names: list[str]
    X: np.ndarray
    y: np.ndarray
    source: str = ""
    target_name: str = "target"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2 or self.y.ndim != 1:
            raise ValidationError("X must be 2-D and y 1-D")
        n, d = self.X.shape
        if n < 1:
            raise ValidationError("dataset must contain at least one row")
        if self.y.shape[0] != n:
            raise ValidationError(f"X has {n} rows but y has {self.y.shape[0]}")
        if len(self.descriptor_names) != d:
            raise ValidationError(
                f"{len(self.descriptor_names)} descriptor names for {d} columns"
            )
        if len(set(self.descriptor_names)) != d:
            raise ValidationError("descriptor names must be unique")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise ValidationError("dataset contains non-finite entries")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_descriptors(self) -> int:
        return self.X.shape[1]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return replace(self, X=self.X[indices], y=self.y[indices])


@dataclass
class SplitPlan:
    train_indices: list[int]
    val_indices: list[int]

    def __post_init__(self):
        self.train_indices = [int(i) for i in self.train_indices]
        self.val_indices = [int(i) for i in self.val_indices]
        combined = self.train_indices + self.val_indices
        if sorted(combined) != list(range(len(combined))):
            raise ValidationError(
                "split plan must partition 0..N-1 into disjoint train/val sets"
            )

    @property
    def n_total(self) -> int:
        return len(self.train_indices) + len(self.val_indices)


@dataclass
class NormStats:
    """Affine constants mapping descriptors to [-1, 1] and the target to [0, 1]."""

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    def normalize_features(self, X: np.ndarray) -> np.ndarray:
        span = self.feature_max - self.feature_min
        return 2.0 * (np.asarray(X, dtype=float) - self.feature_min) / span - 1.0

    def denormalize_features(self, X_norm: np.ndarray) -> np.ndarray:
        span = self.feature_max - self.feature_min
        return (np.asarray(X_norm, dtype=float) + 1.0) * span / 2.0 + self.feature_min

    def normalize_target(self, y: np.ndarray) -> np.ndarray:
        return (np.asarray(y, dtype=float) - self.target_min) / (
            self.target_max - self.target_min
        )

    def denormalize_target(self, y_norm: np.ndarray) -> np.ndarray:
        return np.asarray(y_norm, dtype=float) * (self.target_max - self.target_min) + (
            self.target_min
        )

    def apply(self, ds: Dataset) -> Dataset:
        return replace(
            ds, X=self.normalize_features(ds.X), y=self.normalize_target(ds.y)
        )


def normalize(ds: Dataset) -> tuple[Dataset, NormStats]:
    """Min-max normalize a dataset and return the constants for reuse."""
    f_min = ds.X.min(axis=0)
    f_max = ds.X.max(axis=0)
    for j, name in enumerate(ds.descriptor_names):
        if f_max[j] == f_min[j]:
            raise ValidationError(f"descriptor column {name!r} has zero range")
    t_min, t_max = float(ds.y.min()), float(ds.y.max())
    if t_max == t_min:
        raise ValidationError("target column has zero range")
    stats = NormStats(f_min, f_max, t_min, t_max)
    return stats.apply(ds), stats


def load_csv(path: str) -> Dataset:
    """Parse a descriptor CSV; the last column is the target."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return _parse_csv(handle, source=path)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _parse_csv(handle, source: str) -> Dataset:
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{source}: file is empty") from None
    header = [cell.strip() for cell in header]
    if len(header) < 2:
        raise ParseError(f"{source}: line 1: need at least one descriptor and a target")
    if any(_is_number(cell) for cell in header):
        raise ParseError(f"{source}: line 1: missing header row (numeric cell found)")
    rows = []
    targets = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"{source}: line {line_no}: expected {len(header)} cells, got {len(row)}"
            )
        values = []
        for col, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{source}: line {line_no}: column {header[col]!r}: "
                    f"non-numeric cell {cell.strip()!r}"
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"{source}: line {line_no}: column {header[col]!r}: "
                    f"non-finite cell {cell.strip()!r}"
                )
            values.append(value)
        rows.append(values[:-1])
        targets.append(values[-1])
    if not rows:
        raise ParseError(f"{source}: no data rows")
    return Dataset(
        descriptor_names=header[:-1],
        X=np.array(rows, dtype=float),
        y=np.array(targets, dtype=float),
        source=source,
        target_name=header[-1],
    )


def dataset_to_csv(ds: Dataset) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(ds.descriptor_names) + [ds.target_name])
    for row, target in zip(ds.X, ds.y):
        writer.writerow([f"{value:.17g}" for value in row] + [f"{target:.17g}"])
    return buffer.getvalue()


def save_dataset_csv(ds: Dataset, path: str):
    atomic_write_text(path, dataset_to_csv(ds))


def kennard_stone_split(X: np.ndarray, n_train: int) -> SplitPlan:
    """Maximin (Kennard-Stone) selection of a space-covering training set.

    Seeds with the most distant pair, then repeatedly adds the point whose
    minimum Euclidean distance to the already-selected set is largest.
    Ties always resolve to the lowest row index. Selected rows become the
    training set (in selection order); the rest validate.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 2 <= n_train <= n:
        raise ValidationError(f"n_train must be in [2, {n}], got {n_train}")
    diff = X[:, None, :] - X[None, :, :]
    dist2 = np.sum(diff * diff, axis=2)
    # row-major argmax scans (i, j) lexicographically -> lowest-index pair on ties
    flat = int(np.argmax(dist2))
    first, second = divmod(flat, n)
    selected = [first, second] if first < second else [second, first]
    min_dist = np.minimum(dist2[selected[0]], dist2[selected[1]])
    chosen = np.zeros(n, dtype=bool)
    chosen[selected] = True
    while len(selected) < n_train:
        masked = np.where(chosen, -np.inf, min_dist)
        pick = int(np.argmax(masked))
        selected.append(pick)
        chosen[pick] = True
        min_dist = np.minimum(min_dist, dist2[pick])
    val = [i for i in range(n) if not chosen[i]]
    return SplitPlan(train_indices=selected, val_indices=val)


def kfold(n: int, k: int, seed: int) -> list[SplitPlan]:
    """Seeded shuffle then contiguous folds; fold sizes differ by at most one."""
    if not 2 <= k <= n:
        raise ValidationError(f"k must be in [2, {n}], got {k}")
    perm = substream(seed, "shuffle").permutation(n)
    folds = np.array_split(perm, k)
    plans = []
    for i, fold in enumerate(folds):
        val = sorted(int(j) for j in fold)
        train = sorted(
            int(j) for other in (folds[:i] + folds[i + 1 :]) for j in other
        )
        plans.append(SplitPlan(train_indices=train, val_indices=val))
    return plans


def _surrogate_ranges(d: int) -> list[tuple[float, float]]:
    if d == 5:
        return list(_SURROGATE_RANGES_5)
    return [_SURROGATE_RANGES_GENERIC[j % len(_SURROGATE_RANGES_GENERIC)] for j in range(d)]


def synthesize_surrogate(n: int, d: int = 5, seed: int = 0) -> Dataset:
    """Deterministic synthetic regression set standing in for lab data.

    Descriptors are uniform draws over fixed per-column ranges (column 4 of
    the d = 5 layout is an integer count). The target is the documented
    nonlinear function of the range-scaled descriptors (see module constants)
    plus Gaussian noise of scale 0.15, all from the ``surrogate`` stream of
    the given seed.
    """
    if n < 10:
        raise ValidationError(f"surrogate requires n >= 10, got {n}")
    if d < 1:
        raise ValidationError(f"d must be >= 1, got {d}")
    rng = substream(seed, "surrogate")
    ranges = _surrogate_ranges(d)
    columns = []
    for j, (lo, hi) in enumerate(ranges):
        if d == 5 and j == 4:
            columns.append(rng.integers(int(lo), int(hi) + 1, size=n).astype(float))
        else:
            columns.append(rng.uniform(lo, hi, size=n))
    X = np.column_stack(columns)
    z = np.column_stack(
        [2.0 * (X[:, j] - lo) / (hi - lo) - 1.0 for j, (lo, hi) in enumerate(ranges)]
    )
    y = np.zeros(n)
    for j in range(d):
        y += _LIN[j % 5] * z[:, j]
        y += _QUAD[j % 5] * z[:, j] ** 2
        if d >= 2:
            y += _INTER[j % 5] * z[:, j] * z[:, (j + 1) % d]
    y += _SIN_COEF * np.sin(np.pi * z[:, 0])
    y += _NOISE_SCALE * rng.standard_normal(n)
    names = list(PHENOL_DESCRIPTORS) if d == 5 else [f"x{j + 1}" for j in range(d)]
    target = PHENOL_TARGET if d == 5 else "y"
    return Dataset(
        descriptor_names=names,
        X=X,
        y=y,
        source=f"surrogate(n={n}, d={d}, seed={seed})",
        target_name=target,
    )


# --- split-plan persistence -------------------------------------------------


def split_plan_to_csv(plan: SplitPlan) -> str:
    lines = ["index,role"]
    roles = {i: "train" for i in plan.train_indices}
    roles.update({i: "val" for i in plan.val_indices})
    lines += [f"{i},{roles[i]}" for i in sorted(roles)]
    return "\n".join(lines) + "\n"


def save_split_plan(plan: SplitPlan, path: str):
    atomic_write_text(path, split_plan_to_csv(plan))


def load_split_plan(path: str) -> SplitPlan:
    train, val = [], []
    with open(path, "r", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["index", "role"]:
            raise ParseError(f"{path}: line 1: expected header 'index,role'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or row[1] not in ("train", "val"):
                raise ParseError(f"{path}: line {line_no}: expected '<index>,train|val'")
            try:
                index = int(row[0])
            except ValueError:
                raise ParseError(f"{path}: line {line_no}: bad index {row[0]!r}") from None
            (train if row[1] == "train" else val).append(index)
    return SplitPlan(train_indices=train, val_indices=val)


def fold_plans_to_csv(plans: list[SplitPlan]) -> str:
    lines = ["index,fold"]
    assignment = {}
    for fold_no, plan in enumerate(plans):
        for i in plan.val_indices:
            assignment[i] = fold_no
    lines += [f"{i},{assignment[i]}" for i in sorted(assignment)]
    return "\n".join(lines) + "\n"


def save_fold_plans(plans: list[SplitPlan], path: str):
    atomic_write_text(path, fold_plans_to_csv(plans))
