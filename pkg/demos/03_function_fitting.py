"""Fit 1-D functions with a trainable circuit, like the built-in benchmark.

A single descriptor is re-encoded on three qubits (A1 encoder), pushed
through six layers of the CNOT unit, and read out from one scaled <Z>.
Nelder-Mead tunes the 54 rotation angles.

Run:  python3 demos/03_function_fitting.py        (~15 s)
"""

import numpy as np

from qcreg.model import predict_batch
from qcreg.training import OptimizerOptions, benchmark_dataset, benchmark_task

opts = OptimizerOptions(max_iterations=3000)

for task in ("sin", "x2"):
    model, report = benchmark_task(task, unit="cnot", seed=0, optimizer=opts)
    print(f"task {task}: R^2 = {report.r2_train:.4f} after {report.iterations} "
          f"simplex iterations (final loss {report.final_loss:.2e})")

    # a coarse ASCII scatter of truth vs prediction
    ds = benchmark_dataset(task, n_points=13)
    preds = predict_batch(model, ds.X)
    print("      x     target  predicted")
    for x, y, p in zip(ds.X[:, 0], ds.y, preds):
        print(f"  {x:+6.2f} {y:10.4f} {p:10.4f}")
    print()

print("""The loss trace is recorded per simplex iteration; the running
minimum is non-increasing by construction:""")
_, report = benchmark_task("sin", unit="cnot", seed=1,
                           optimizer=OptimizerOptions(max_iterations=400))
for i, value in report.trace[:: max(1, len(report.trace) // 6)]:
    print(f"  iter {i:4d}: best loss {value:.5f}")
