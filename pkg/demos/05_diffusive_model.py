"""The diffusive hydrodynamic model on a periodic 2-D grid.

Density is transported conservatively.  Omega feels the first-order transport
terms plus the alignment correction ell = P(kappa c1 Lap(rho Omega) - phi grad rho).
"""
# %%
from dataclasses import replace

import numpy as np

from sohp import (LlgCoefficients, ModelParams, compute_coefficients, dirichlet_energy,
                  ell_term, llg_step, max_stable_dt_diffusive, random_smooth_field,
                  step_diffusive)

params = ModelParams(c=1.0, d=0.5, alpha=2.0, kappa=0.05, phi_rep=0.1)
coeffs = compute_coefficients(params)
print(f"c1 = {coeffs.c1:.5f}, c2 = {coeffs.c2:.5f}, delta = {coeffs.delta:+.5f}")
print("damping 2d + c2 cos(delta) =", 2 * params.d + coeffs.c2 * np.cos(coeffs.delta))

field = random_smooth_field((40, 40), seed=4)
x = field.coordinates()[0]
field = replace(field, rho=np.outer(1 + 0.3 * np.sin(x), np.ones(40)))
ell = ell_term(field, coeffs, params)
print("max |ell . Omega| =", np.max(np.abs(np.sum(ell * field.omega, axis=-1))))

# %%
m0 = field.mass()
for k in range(5):
    for _ in range(100):
        field = step_diffusive(field, coeffs, params,
                               max_stable_dt_diffusive(field, coeffs, params))
    print(f"t = {field.time:.3f}: mass drift {abs(field.mass() - m0) / m0:.1e}, "
          f"energy {dirichlet_energy(field):.4f}, rho in [{field.rho.min():.3f}, {field.rho.max():.3f}]")

# %%
# At zero speed with rho = 1 and no repulsion the model is exactly LLG.
still = replace(params, c=0.0, phi_rep=0.0)
f0 = random_smooth_field((32, 32), seed=6)
llg = LlgCoefficients.from_model(coeffs, still)
a = b = f0
dt = 0.5 * max_stable_dt_diffusive(f0, coeffs, still)
for _ in range(50):
    a = step_diffusive(a, coeffs, still, dt)
    b = llg_step(b, llg, dt)
print("\nzero speed: max |diffusive - LLG| =", np.max(np.abs(a.omega - b.omega)))
