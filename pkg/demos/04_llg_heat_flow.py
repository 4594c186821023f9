"""Landau-Lifschitz-Gilbert dynamics of a unit vector field.

    dOmega/dt = damping P(Lap Omega) - precession Omega x Lap Omega
"""
# %%
import numpy as np

from sohp import (LlgCoefficients, dirichlet_energy, llg_step, max_stable_dt_llg,
                  random_smooth_field, spin_wave)

# The discrete Dirichlet energy of a planar spin wave is close to pi q^2.
for q in (1, 2, 3):
    print(f"q = {q}: energy = {dirichlet_energy(spin_wave(256, q=q)):.6f}   pi q^2 = {np.pi * q * q:.6f}")

# %%
# Damping dissipates energy; precession only rotates the field.
field = random_smooth_field((48, 48), modes=4, seed=1)
for llg in (LlgCoefficients(1.0, 0.0), LlgCoefficients(1.0, 5.0), LlgCoefficients(0.0, 1.0)):
    f = field
    dt = max_stable_dt_llg(f, llg)
    energies = [dirichlet_energy(f)]
    for _ in range(300):
        f = llg_step(f, llg, dt)
        energies.append(dirichlet_energy(f))
    e = np.array(energies)
    print(f"damping {llg.damping}, precession {llg.precession}: energy {e[0]:.4f} -> {e[-1]:.4f}, "
          f"largest one-step rise {np.max(np.diff(e)):+.2e}, max ||Omega|-1| {f.norm_deviation():.1e}")

# %%
# Without damping, the energy is conserved up to the time-stepping error.
f0 = random_smooth_field((64,), seed=8)
llg = LlgCoefficients(0.0, 1.0)
base = int(np.ceil(0.5 / max_stable_dt_llg(f0, llg)))
for k in range(4):
    steps = base * 2**k
    f = f0
    for _ in range(steps):
        f = llg_step(f, llg, 0.5 / steps)
    print(f"dt = {0.5 / steps:.2e}: energy drift {abs(dirichlet_energy(f) - dirichlet_energy(f0)):.3e}")
