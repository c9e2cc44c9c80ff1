"""Every product state of spins lying in a plane orthogonal to beta, dressed
with its own static field, is a stationary point of the coupled system.
"""

# %%
import itertools

import numpy as np

from spinphoton import CutoffProfile, ModeSpace, SpinConfig, System, basis_state, build_grid_for
from spinphoton.stationary import fixed_point_energy, is_fixed_point

chi = CutoffProfile()
space = ModeSpace(build_grid_for(chi, 16, 10), chi)
planar = SpinConfig([[0.5, 0, 0], [-0.5, 0, 0], [0.1, 0.6, 0]], [0, 0, 1.0])
system = System(space, planar, h=1.0)

print(f"{'E':>9} {'residual':>10} {'energy':>12} {'direct H':>12}")
for k in range(4):
    for E in itertools.combinations(range(3), k):
        v = is_fixed_point(system, basis_state(E, planar.beta, 3))
        en = fixed_point_energy(system, E)
        print(f"{str(set(E)) if E else '{}':>9} {v.residual:10.1e} {en.formula:12.6f} {en.direct:12.6f}")

# %% [markdown]
# Lift one particle out of the plane and the product states stop being
# stationary: the mixed couplings no longer cancel.

# %%
tilted = SpinConfig([[0, 0, 0], [0.4, 0, 0.3]], [0, 0, 1.0])
v = is_fixed_point(System(space, tilted, 1.0), basis_state({0}, tilted.beta, 2))
print("tilted pair residual:", f"{v.residual:.2e}", "fixed" if v.is_fixed else "not fixed")
