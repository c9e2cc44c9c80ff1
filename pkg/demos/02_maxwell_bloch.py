"""The semiclassical fields obey Maxwell's equations with a spin current, and
each spin obeys the Bloch precession law in the local field.
"""

# %%
import numpy as np

from spinphoton import (
    CutoffProfile,
    IntegratorSpec,
    ModeSpace,
    SpinConfig,
    System,
    TrajectoryState,
    build_grid_for,
    integrate,
    product_state,
)
from spinphoton.observables import bloch_residual, maxwell_residuals, photon_number_law

chi = CutoffProfile()
space = ModeSpace(build_grid_for(chi, 8, 6), chi)
system = System(space, SpinConfig([[0.5, 0, 0], [-0.5, 0, 0]], [0, 0, 1.0]), h=2.0)
X0 = np.random.default_rng(3).standard_normal((2, space.grid.n, 2)) * chi(space.grid.radii)[:, None]
s0 = TrajectoryState(0.0, X0, product_state([[1, 0, 0], [0, 1, 1]]))

# %% [markdown]
# Residuals are finite-difference estimates, so they should fall as the
# time stride and the spatial step shrink together.

# %%
print(f"{'dt':>6} {'faraday':>10} {'ampere':>10} {'div B':>10} {'bloch':>10} {'dN/dt':>10}")
for dt, dx in [(0.04, 4e-2), (0.02, 2e-2), (0.01, 1e-2)]:
    traj = integrate(system, s0, IntegratorSpec(dt=dt, t_final=0.4))
    mx = maxwell_residuals(system, traj, dx=dx)
    bl = bloch_residual(system, traj)
    pn = photon_number_law(system, traj)
    print(f"{dt:6.2f} {mx['faraday']:10.2e} {mx['ampere']:10.2e} {mx['div_B']:10.2e} "
          f"{bl['bloch']:10.2e} {pn['direct']:10.2e}")
print("the two forms of dN/dt agree to", f"{pn['forms_agree']:.1e}")
