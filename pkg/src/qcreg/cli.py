"""Command-line surface: fit, predict, bench-fn, cost-table, split, cv, surrogate.

Run configuration is a flat text file with one ``section.key = value`` per
line (``#`` starts a comment); see the README for the full grammar. All
commands are deterministic under a fixed --seed, outputs go only to --out
paths and are written atomically. Exit codes: 0 success, 1 validation or
input errors, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from . import data as qdata
from .encoders import EncoderSpec
from .errors import (
    CapacityError,
    NumericalError,
    OptimizationError,
    ParseError,
    QcregError,
    ValidationError,
)
from .fileio import atomic_write_text, stable_json
from .model import (
    DEFAULT_HYBRID_SCALE,
    QmlModel,
    load_model,
    model_to_text,
    predict_batch,
)
from .statevector import trotter_cost
from .training import (
    BENCHMARK_OPTIMIZER,
    BENCHMARK_TASKS,
    FitConfig,
    FitReport,
    GridSpec,
    OptimizerOptions,
    benchmark_task,
    fit,
)

DEFAULT_SCALE_GRID = (1.0, 2.0, 4.0, 6.0, 8.0, 10.0)

_CONFIG_KEYS = {
    "encoder.id", "encoder.copies",
    "ansatz.unit", "ansatz.layers", "ansatz.layer_grid",
    "ansatz.ising_time", "ansatz.ising_trotter_steps",
    "readout.mode", "readout.measured_qubit", "readout.m",
    "readout.scale", "readout.scale_grid",
    "optimizer.max_iterations", "optimizer.f_abs_tolerance",
    "optimizer.x_abs_tolerance", "optimizer.initial_step", "optimizer.restarts",
    "split.kind", "split.n_train", "split.plan",
    "seed",
}


@dataclass
class RunConfig:
    fit_config: FitConfig
    split_kind: str = "none"  # none | kennard-stone | plan
    n_train: int | None = None
    plan_path: str | None = None
    raw: dict[str, str] = field(default_factory=dict)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"{source}: line {line_no}: expected 'section.key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ParseError(f"{source}: line {line_no}: unknown key {key!r}")
        if key in entries:
            raise ParseError(f"{source}: line {line_no}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _parse_number_list(value: str, cast, source: str, key: str):
    try:
        return tuple(cast(tok) for tok in value.split())
    except ValueError:
        raise ParseError(f"{source}: bad value for {key}: {value!r}") from None


def build_run_config(entries: dict[str, str], descriptor_count: int,
                     seed_override: int | None, source: str = "<config>") -> RunConfig:
    def get(key, default=None):
        return entries.get(key, default)

    def get_int(key, default):
        value = get(key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"{source}: bad integer for {key}: {value!r}") from None

    def get_float(key, default):
        value = get(key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            raise ParseError(f"{source}: bad number for {key}: {value!r}") from None

    encoder = EncoderSpec(
        id=get("encoder.id", "A1"),
        copies=get_int("encoder.copies", 1),
        descriptor_count=descriptor_count,
    )

    if "ansatz.layers" in entries and "ansatz.layer_grid" in entries:
        raise ParseError(f"{source}: give ansatz.layers or ansatz.layer_grid, not both")
    if "ansatz.layer_grid" in entries:
        layer_values = _parse_number_list(entries["ansatz.layer_grid"], int, source,
                                          "ansatz.layer_grid")
    elif "ansatz.layers" in entries:
        layer_values = (get_int("ansatz.layers", 0),)
    else:
        layer_values = tuple(range(3, 13))

    mode = get("readout.mode", "pure")
    if "readout.scale" in entries and "readout.scale_grid" in entries:
        raise ParseError(f"{source}: give readout.scale or readout.scale_grid, not both")
    if "readout.scale_grid" in entries:
        scale_values = _parse_number_list(entries["readout.scale_grid"], float, source,
                                          "readout.scale_grid")
    elif "readout.scale" in entries:
        scale_values = (get_float("readout.scale", 0.0),)
    elif mode == "hybrid":
        scale_values = (DEFAULT_HYBRID_SCALE,)
    else:
        scale_values = DEFAULT_SCALE_GRID

    optimizer = OptimizerOptions(
        max_iterations=get_int("optimizer.max_iterations", 20000),
        f_abs_tolerance=get_float("optimizer.f_abs_tolerance", 1e-6),
        x_abs_tolerance=get_float("optimizer.x_abs_tolerance", 1e-6),
        initial_step=get_float("optimizer.initial_step", 0.1),
        restarts=get_int("optimizer.restarts", 1),
    )

    seed = seed_override if seed_override is not None else get_int("seed", 0)
    fit_config = FitConfig(
        encoder=encoder,
        unit=get("ansatz.unit", "cnot"),
        readout_mode=mode,
        measured_qubit=get_int("readout.measured_qubit", 0),
        n_measured=get_int("readout.m", 1),
        grid=GridSpec(layer_values=layer_values, scale_values=scale_values),
        optimizer=optimizer,
        seed=seed,
        ising_time=get_float("ansatz.ising_time", 10.0),
        ising_trotter_steps=get_int("ansatz.ising_trotter_steps", 0),
    )

    split_kind = get("split.kind", "none")
    if split_kind not in ("none", "kennard-stone", "plan"):
        raise ParseError(f"{source}: unknown split.kind {split_kind!r}")
    return RunConfig(
        fit_config=fit_config,
        split_kind=split_kind,
        n_train=get_int("split.n_train", 0) or None,
        plan_path=get("split.plan"),
        raw=dict(entries),
    )


def load_run_config(path: str | None, descriptor_count: int,
                    seed_override: int | None) -> RunConfig:
    entries: dict[str, str] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            entries = parse_config_text(handle.read(), source=path)
    return build_run_config(entries, descriptor_count, seed_override,
                            source=path or "<defaults>")


# --- output writers -----------------------------------------------------------


def _predictions_csv(sets: list[tuple[str, np.ndarray, np.ndarray]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["set", "observed", "predicted"])
    for label, observed, predicted in sets:
        for obs, pred in zip(observed, predicted):
            writer.writerow([label, f"{obs:.17g}", f"{pred:.17g}"])
    return buffer.getvalue()


def _write_fit_outputs(out_dir: str, model: QmlModel, report: FitReport,
                       train: qdata.Dataset, val: qdata.Dataset):
    os.makedirs(out_dir, exist_ok=True)
    preds_train = predict_batch(model, train.X)
    preds_val = predict_batch(model, val.X)
    atomic_write_text(os.path.join(out_dir, "report.json"),
                      stable_json(report.json_payload()))
    atomic_write_text(
        os.path.join(out_dir, "predictions.csv"),
        _predictions_csv([("train", train.y, preds_train), ("val", val.y, preds_val)]),
    )
    atomic_write_text(os.path.join(out_dir, "model.txt"), model_to_text(model))
    atomic_write_text(os.path.join(out_dir, "grid.csv"), report.grid_csv())


# --- commands ------------------------------------------------------------------


def cmd_fit(args) -> int:
    train_full = qdata.load_csv(args.data)
    run = load_run_config(args.config, train_full.n_descriptors, args.seed)
    plan = None
    if args.val is not None:
        train, val = train_full, qdata.load_csv(args.val)
    elif run.split_kind == "kennard-stone":
        n_train = run.n_train or 0
        if not n_train:
            raise ValidationError("split.kind = kennard-stone needs split.n_train")
        normed, _ = qdata.normalize(train_full)
        plan = qdata.kennard_stone_split(normed.X, n_train)
        train, val = train_full.subset(plan.train_indices), train_full.subset(plan.val_indices)
    elif run.split_kind == "plan":
        if not run.plan_path:
            raise ValidationError("split.kind = plan needs split.plan = <path>")
        plan = qdata.load_split_plan(run.plan_path)
        train, val = train_full.subset(plan.train_indices), train_full.subset(plan.val_indices)
    else:
        raise ValidationError("no validation source: pass --val or configure split.kind")

    model, report = fit(run.fit_config, train, val, jobs=args.jobs)
    _write_fit_outputs(args.out, model, report, train, val)
    if plan is not None:
        qdata.save_split_plan(plan, os.path.join(args.out, "split_plan.csv"))
    print(f"fit: L={report.layers} f={report.scale:g} "
          f"r2_train={report.r2_train:.4f} r2_val={report.r2_val:.4f}")
    return 0


def _load_descriptor_table(path: str, model: QmlModel):
    """Descriptor CSV for prediction; a trailing target column is optional."""
    d = model.encoder.descriptor_count
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ParseError(f"{path}: file is empty")
    header = [cell.strip() for cell in rows[0]]
    if len(header) == d + 1:
        ds = qdata.load_csv(path)
        return ds.X, ds.y
    if len(header) != d:
        raise ParseError(
            f"{path}: expected {d} descriptor columns (or {d + 1} with a target), "
            f"got {len(header)}"
        )
    values = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != d:
            raise ParseError(f"{path}: line {line_no}: expected {d} cells")
        try:
            values.append([float(cell) for cell in row])
        except ValueError:
            raise ParseError(f"{path}: line {line_no}: non-numeric cell") from None
    if not values:
        raise ParseError(f"{path}: no data rows")
    return np.array(values, dtype=float), None


def cmd_predict(args) -> int:
    model = load_model(args.model)
    X, observed = _load_descriptor_table(args.data, model)
    predicted = predict_batch(model, X)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if observed is None:
        writer.writerow(["index", "predicted"])
        for i, pred in enumerate(predicted):
            writer.writerow([i, f"{pred:.17g}"])
    else:
        writer.writerow(["index", "observed", "predicted"])
        for i, (obs, pred) in enumerate(zip(observed, predicted)):
            writer.writerow([i, f"{obs:.17g}", f"{pred:.17g}"])
    atomic_write_text(args.out, buffer.getvalue())
    print(f"predict: {len(predicted)} rows -> {args.out}")
    return 0


def cmd_bench_fn(args) -> int:
    tasks = args.tasks.split(",") if args.tasks else list(BENCHMARK_TASKS)
    units = args.units.split(",") if args.units else ["ising", "cnot", "cz"]
    optimizer = (
        OptimizerOptions(max_iterations=args.max_iterations)
        if args.max_iterations
        else BENCHMARK_OPTIMIZER
    )
    raw_rows = []
    medians = {}
    for unit in units:
        for task in tasks:
            scores = []
            for offset in range(args.n_seeds):
                seed = args.seed + offset
                _, report = benchmark_task(task, unit, seed=seed, optimizer=optimizer)
                scores.append(report.r2_train)
                raw_rows.append((unit, task, seed, report.r2_train,
                                 report.iterations))
            medians[(unit, task)] = float(np.median(scores))

    lines = ["unit," + ",".join(tasks)]
    for unit in units:
        lines.append(unit + "," + ",".join(f"{medians[(unit, task)]:.4f}" for task in tasks))
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    if args.per_seed_out:
        raw = ["unit,task,seed,r2_train,iterations"]
        raw += [f"{u},{t},{s},{r:.6f},{it}" for u, t, s, r, it in raw_rows]
        atomic_write_text(args.per_seed_out, "\n".join(raw) + "\n")
    for line in lines:
        print(line)
    return 0


def _format_cost(value: float) -> str:
    return str(int(value)) if value == int(value) else f"{value:.17g}"


def cmd_cost_table(args) -> int:
    lines = ["n_qubits,matrix_dim,relative_cost,memory_mb"]
    for n in range(1, args.max_n + 1):
        est = trotter_cost(n)
        lines.append(
            f"{n},{est.matrix_dim},{_format_cost(est.relative_cost)},"
            f"{_format_cost(est.memory_mb)}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    print(text, end="")
    return 0


def cmd_split(args) -> int:
    ds = qdata.load_csv(args.data)
    normed, _ = qdata.normalize(ds)
    plan = qdata.kennard_stone_split(normed.X, args.n_train)
    qdata.save_split_plan(plan, args.out)
    print(f"split: {len(plan.train_indices)} train / {len(plan.val_indices)} val -> {args.out}")
    return 0


def cmd_cv(args) -> int:
    ds = qdata.load_csv(args.data)
    run = load_run_config(args.config, ds.n_descriptors, args.seed)
    plans = qdata.kfold(ds.n_samples, args.k, run.fit_config.seed)
    os.makedirs(args.out, exist_ok=True)
    qdata.save_fold_plans(plans, os.path.join(args.out, "fold_plans.csv"))
    fold_rows = []
    for fold_no, plan in enumerate(plans):
        train = ds.subset(plan.train_indices)
        val = ds.subset(plan.val_indices)
        _, report = fit(run.fit_config, train, val, jobs=args.jobs)
        atomic_write_text(
            os.path.join(args.out, f"fold_{fold_no}.json"),
            stable_json(report.json_payload()),
        )
        fold_rows.append({
            "fold": fold_no,
            "r2_train": report.r2_train,
            "r2_val": report.r2_val,
            "layers": report.layers,
            "scale": report.scale,
        })
        print(f"fold {fold_no}: r2_train={report.r2_train:.4f} "
              f"r2_val={report.r2_val:.4f}")
    summary = {
        "k": args.k,
        "seed": run.fit_config.seed,
        "folds": fold_rows,
        "mean_r2_train": float(np.mean([r["r2_train"] for r in fold_rows])),
        "mean_r2_val": float(np.mean([r["r2_val"] for r in fold_rows])),
    }
    atomic_write_text(os.path.join(args.out, "cv_summary.json"), stable_json(summary))
    print(f"cv: mean r2_train={summary['mean_r2_train']:.4f} "
          f"mean r2_val={summary['mean_r2_val']:.4f}")
    return 0


def cmd_surrogate(args) -> int:
    ds = qdata.synthesize_surrogate(args.n, args.d, seed=args.seed or 0)
    qdata.save_dataset_csv(ds, args.out)
    print(f"surrogate: {ds.n_samples} rows, {ds.n_descriptors} descriptors -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcreg",
        description="Quantum-circuit-learning regression toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="train a model with grid search")
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--data", required=True, help="training CSV")
    p.add_argument("--val", help="validation CSV (overrides split config)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--jobs", type=int, default=1, help="parallel grid workers")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="predict with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="descriptor CSV")
    p.add_argument("--out", required=True, help="output predictions CSV")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench-fn", help="1-D function benchmark grid")
    p.add_argument("--out", required=True, help="output CSV (median R^2 per unit/task)")
    p.add_argument("--per-seed-out", help="optional per-seed raw CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-seeds", type=int, default=5)
    p.add_argument("--tasks", help="comma list from: " + ",".join(BENCHMARK_TASKS))
    p.add_argument("--units", help="comma list from: ising,cnot,cz")
    p.add_argument("--max-iterations", type=int, help="optimizer budget per fit")
    p.set_defaults(func=cmd_bench_fn)

    p = sub.add_parser("cost-table", help="dense evolution-operator cost model")
    p.add_argument("--max-n", type=int, default=20)
    p.add_argument("--out", help="output CSV (also printed)")
    p.set_defaults(func=cmd_cost_table)

    p = sub.add_parser("split", help="maximin (Kennard-Stone) hold-out split")
    p.add_argument("--data", required=True)
    p.add_argument("--n-train", type=int, required=True)
    p.add_argument("--out", required=True, help="output plan CSV")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("surrogate", help="generate the synthetic dataset")
    p.add_argument("--n", type=int, default=221)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_surrogate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OptimizationError, NumericalError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, CapacityError, ParseError, QcregError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
