"""Pure vs hybrid readout on the same circuit.

Pure readout predicts from one scaled <Z>. Hybrid readout measures the
first M qubits and solves a small linear layer on top in closed form at
every loss evaluation, so the quantum parameters and the linear weights
are never optimized against each other.

Run:  python3 demos/05_hybrid_readout.py        (~40 s)
"""

import numpy as np

from qcreg.data import kennard_stone_split, normalize, synthesize_surrogate
from qcreg.encoders import EncoderSpec
from qcreg.model import solve_beta
from qcreg.training import FitConfig, GridSpec, OptimizerOptions, fit

full = synthesize_surrogate(221, 5, seed=3)
normed, _ = normalize(full)
plan = kennard_stone_split(normed.X, 180)
train, val = full.subset(plan.train_indices), full.subset(plan.val_indices)

opts = OptimizerOptions(max_iterations=5000)
for mode, m in (("pure", 1), ("hybrid", 4)):
    config = FitConfig(
        encoder=EncoderSpec("A2-A2-CNOT", copies=1, descriptor_count=5),
        unit="cnot",
        readout_mode=mode,
        n_measured=m,
        grid=GridSpec(layer_values=(6,), scale_values=(2.0,) if mode == "pure" else (4.0,)),
        optimizer=opts,
        seed=0,
    )
    model, report = fit(config, train, val)
    beta = "" if model.beta is None else f"  beta = {np.round(model.beta, 3)}"
    print(f"{mode:6s} (M = {m}): R^2_train = {report.r2_train:.3f}  "
          f"R^2_val = {report.r2_val:.3f}{beta}")

print("""
The closed-form layer is plain least squares. Given a readout matrix of
expectation values (one row per measured qubit), the weights minimize the
squared residual; a ridge jitter of 1e-10 keeps collinear rows safe:""")

rng = np.random.default_rng(0)
m = rng.uniform(-1, 1, (4, 30))
y = rng.uniform(0, 1, 30)
beta = solve_beta(m, y)
print("  beta =", np.round(beta, 4))
print("  residual =", round(float(np.mean((y - beta @ m) ** 2)), 6))
