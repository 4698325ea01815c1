"""The full tabular-regression pipeline on the synthetic surrogate dataset.

Generates a 221-row surrogate with the five-descriptor toxicity schema,
produces the 180/41 maximin (Kennard-Stone) hold-out split, trains a
quantum model and both classical baselines, and compares them on the
validation set.

Run:  python3 demos/04_qstr_pipeline.py        (~1 min)
"""

import numpy as np

from qcreg import baselines as bl
from qcreg.data import kennard_stone_split, normalize, synthesize_surrogate
from qcreg.encoders import EncoderSpec
from qcreg.model import predict_batch
from qcreg.training import FitConfig, GridSpec, OptimizerOptions, fit, r_squared

# --- data: synthetic stand-in with the logKow/pKa/E_HOMO/E_LUMO/N_hdon schema

full = synthesize_surrogate(221, 5, seed=7)
print(f"surrogate: {full.n_samples} rows, descriptors {full.descriptor_names}")

normed, _ = normalize(full)
plan = kennard_stone_split(normed.X, 180)
train, val = full.subset(plan.train_indices), full.subset(plan.val_indices)
print(f"maximin split: {len(plan.train_indices)} train / {len(plan.val_indices)} val")

# --- classical baselines ------------------------------------------------------

mlr = bl.fit_mlr(train)
mlr_val = r_squared(val.y, bl.predict_mlr(mlr, val.X))
print(f"\nMLR:    R^2_train = {r_squared(train.y, bl.predict_mlr(mlr, train.X)):.3f}  "
      f"R^2_val = {mlr_val:.3f}")

rbf, k = bl.select_rbf(train, val, seed=0)
rbf_val = r_squared(val.y, bl.predict_rbf(rbf, val.X))
print(f"RBF-NN: R^2_train = {r_squared(train.y, bl.predict_rbf(rbf, train.X)):.3f}  "
      f"R^2_val = {rbf_val:.3f}  (k = {k} centers)")

# --- quantum model: entangler-enhanced encoder, CNOT unit --------------------

config = FitConfig(
    encoder=EncoderSpec("A2-A2-CNOT", copies=1, descriptor_count=5),
    unit="cnot",
    grid=GridSpec(layer_values=(6,), scale_values=(2.0,)),
    optimizer=OptimizerOptions(max_iterations=8000),
    seed=0,
)
model, report = fit(config, train, val)
print(f"QML:    R^2_train = {report.r2_train:.3f}  R^2_val = {report.r2_val:.3f}  "
      f"(A2-A2-CNOT, {config.encoder.n_qubits} qubits, L = {report.layers}, "
      f"f = {report.scale:g})")

# --- observed vs predicted, validation set ------------------------------------

preds = predict_batch(model, val.X)
worst = np.argsort(np.abs(preds - val.y))[-3:]
print("\nlargest validation errors (observed -> predicted):")
for i in worst[::-1]:
    print(f"  {val.y[i]:+.3f} -> {preds[i]:+.3f}")

print(f"\nnonlinear models clear the linear baseline: "
      f"QML {report.r2_val:.3f} and RBF {rbf_val:.3f} vs MLR {mlr_val:.3f}")
