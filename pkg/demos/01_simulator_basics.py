"""Tour of the statevector backend: gates, expectations, Ising evolution.

Run:  python3 demos/01_simulator_basics.py
"""

import numpy as np

from qcreg import statevector as sv

# --- gates act on a dense amplitude vector; qubit 0 is the least
# significant bit of the amplitude index -------------------------------------

state = sv.init_zero(2)
print("|00> amplitudes:", state.amplitudes)

sv.apply_gate(state, sv.ry(0, np.pi / 2))   # |0> -> (|0> + |1>)/sqrt(2)
sv.apply_gate(state, sv.cnot(0, 1))         # entangle: Bell pair
print("Bell amplitudes:", np.round(state.amplitudes, 6))
print("<Z_0> =", round(sv.expectation_z(state, 0), 12),
      " <Z_1> =", round(sv.expectation_z(state, 1), 12))

# --- Ising-Hamiltonian time evolution: exact vs first-order Trotter ----------

rng = np.random.default_rng(42)
n = 3
fields = rng.uniform(-1, 1, n)
couplings = rng.uniform(-1, 1, len(sv.ising_ring_pairs(n)))

exact = sv.apply_ising(sv.init_zero(n), fields, couplings, time=1.0)
print("\nTrotter error vs exact evolution (T = 1):")
for steps in (8, 32, 128):
    approx = sv.apply_ising(sv.init_zero(n), fields, couplings, time=1.0,
                            trotter_steps=steps)
    err = np.max(np.abs(approx.amplitudes - exact.amplitudes))
    print(f"  S = {steps:4d}: max amplitude deviation {err:.2e}")

# --- the cost model that motivates ring entanglers over dense evolution ------

print("\nDense evolution-operator cost model:")
print(f"{'n':>3} {'dim':>9} {'relative cost':>16} {'memory [MB]':>13}")
for n in (5, 10, 15, 20):
    est = sv.trotter_cost(n)
    print(f"{n:3d} {est.matrix_dim:9d} {est.relative_cost:16.0f} {est.memory_mb:13.6g}")
