"""A smooth wave in the first-order hydrodynamic model.

Everything depends on z only.  Time is the rescaled time t' = c c1 t.
"""
# %%
import numpy as np

from sohp import (FlowParams, HydroError, compute_coefficients, initial_state,
                  physical_time, run_hydro)

coeffs = compute_coefficients(d=1.0, alpha=0.0)
state = initial_state("equatorial_wave", 200, length=1.0, amp_rho=0.2, amp_theta=0.2)
snaps = run_hydro(state, coeffs, t_final=0.5, out_dt=0.1)

for s in snaps:
    print(f"t' = {s.time:.2f} (t = {physical_time(s.time, 1.0, coeffs.c1):.3f})  "
          f"mass = {s.mass():.15f}  theta in [{s.theta.min():.4f}, {s.theta.max():.4f}]")

# %%
# Refining the grid: L1 distance to a fine reference solution halves with the
# cell size, as expected from a first-order scheme.
flow = FlowParams(0.5, 1.5, 0.0)


def solve(n):
    return run_hydro(initial_state("equatorial_wave", n, varphi0=np.pi), flow, 0.2)[-1]


ref = solve(1600)
prev = None
for n in (25, 50, 100, 200):
    s = solve(n)
    k = ref.n // n
    err = np.sum(np.abs(s.theta - ref.theta.reshape(-1, k).mean(axis=1))) / n
    print(f"n = {n:4d}: L1 error in theta = {err:.3e}" +
          ("" if prev is None else f"  (order {np.log2(prev / err):.2f})"))
    prev = err

# %%
# Near the pole, with precession, the model is ill-posed and the solver refuses.
cap = initial_state("polar_cap", 64, theta0=0.3, amp_theta=0.05)
try:
    run_hydro(cap, FlowParams(1.0, 1.0, np.pi / 6), 0.1)
except HydroError as err:
    print("\nrefused:", err)
