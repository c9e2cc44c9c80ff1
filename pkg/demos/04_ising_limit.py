"""Shrinking the cutoff width turns the pair coupling into a dipolar kernel.

The coupling of two spins a distance 2 apart is compared with
-1/(4 pi |x|^3) = -1/(32 pi).  On the coarse widths 0.2, 0.1, 0.05 the
transition region of the plateau cutoff is still comparable to the
separation and the values oscillate; from 0.02 on they settle.
"""

# %%
import numpy as np

from spinphoton import SpinConfig
from spinphoton.stationary import ising_kernel, ising_limit_study

cfg = SpinConfig([[1.0, 0, 0], [-1.0, 0, 0]], [0, 0, 1.0])
limit = ising_kernel([2.0, 0, 0])
for eps_list, ro, ao in [([0.2, 0.1, 0.05, 0.02], 96, 120), ([0.01], 160, 230)]:
    rep = ising_limit_study(cfg, eps_list, radial_order=ro, angular_order=ao)
    for row in rep.rows:
        print(f"eps={row['eps']:<5} F={row['F_eps']:+.7f}  limit={limit:+.7f}  "
              f"|error|={row['abs_err']:.2e}")

# %% [markdown]
# The self term is the same for every spin configuration; only the pair
# term distinguishes aligned from opposed spins.

# %%
energies = rep.energies[0.01]
for E, parts in energies.items():
    print(f"E={str(set(E)) if E else '{}':>7}  interaction={parts['interaction']:+.6f}  "
          f"dipolar limit={parts['limit']:+.6f}  self={parts['self']:+.4f}")
