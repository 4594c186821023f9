"""Where does the first-order model stop being hyperbolic?

The characteristic speeds of the 1-D system are the roots of a cubic whose
coefficients depend on the latitude theta of Omega and on (a, lambda, delta).
"""
# %%
import numpy as np

from sohp import char_poly, compute_coefficients, scan_hyperbolicity, solve_cubic

a, lam, delta = 1.0, 1.0, np.pi / 6

# At the equator the speeds are 0 and +-lambda; at the pole one speed is 1 and
# the other two are a e^{+-i delta}, complex as soon as delta != 0.
print("theta = pi/2:", solve_cubic(char_poly(np.pi / 2, a, lam, delta)).roots)
print("theta = 0   :", solve_cubic(char_poly(0.0, a, lam, delta)).roots)

# %%
rep = scan_hyperbolicity(a=a, lam=lam, delta=delta)
print("\nnon-hyperbolic intervals:", [(round(lo, 4), round(hi, 4))
                                   for lo, hi in rep.nonhyperbolic_set])
print("root and discriminant tests agree everywhere:", rep.consistent)

# %%
# The extent of the bad region grows with |delta|.
print("\n delta     theta*   measure")
for delta in (0.0, 0.05, 0.1, 0.3, np.pi / 6, 1.0):
    rep = scan_hyperbolicity(a=a, lam=lam, delta=delta)
    first = rep.nonhyperbolic_set[0][1] if rep.nonhyperbolic_set else 0.0
    measure = sum(hi - lo for lo, hi in rep.nonhyperbolic_set)
    print(f"{delta:6.3f}   {first:6.4f}   {measure:6.4f}")

# %%
# With coefficients from the collision-invariant solver, delta is small and the
# non-hyperbolic caps around the poles are thin.
for alpha in (0.0, 1.0, 5.0):
    coeffs = compute_coefficients(d=1.0, alpha=alpha)
    rep = scan_hyperbolicity(coeffs, np.linspace(0, np.pi, 4001))
    print(f"d = 1, alpha = {alpha}: delta = {coeffs.delta:+.5f}, intervals =",
          [(round(lo, 4), round(hi, 4)) for lo, hi in rep.nonhyperbolic_set])
