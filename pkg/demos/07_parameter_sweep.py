"""Tabulate coefficients and hyperbolicity over a (d, alpha) grid.

The same table is produced by ``sohp sweep --config sweep.toml``; here the
configuration is built in code.  Rows come back in grid order whatever the
number of worker processes.
"""
# %%
import numpy as np

from sohp.cli import SWEEP_HEADER, sweep
from sohp.config import parse_config

cfg = parse_config("""
d_values = [0.25, 0.5, 1.0, 2.0]
alpha_values = [0.0, 1.0, 3.0]
grid_n = 1001
n_theta = 501
workers = 2
""", "sweep")

rows = sweep(cfg)
cols = ["d", "alpha", "c2", "delta", "theta_star"]
print("  ".join(f"{c:>10}" for c in cols))
for r in rows:
    print("  ".join(f"{r[c]:10.5f}" for c in cols))

# %%
# Points that fail (here d = 0) are recorded, not fatal.
bad = sweep(parse_config("d_values = [0.0]\nalpha_values = [1.0]\ngrid_n = 201", "sweep"))
print("\nerror column:", bad[0]["error"])
print("columns:", ", ".join(SWEEP_HEADER))
