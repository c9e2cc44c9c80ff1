"""A single spin precessing, then two spins exchanging energy with the field.

Run with ``python demos/01_larmor_and_conservation.py``.
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
    build_grid,
    build_grid_for,
    energies,
    integrate,
    product_state,
    spin_expectations,
)

# %% [markdown]
# With the cutoff switched off the spin decouples from the field and
# precesses about beta at angular frequency 2|beta|.

# %%
free = ModeSpace(build_grid(4, 6, 0.1, 2.0), CutoffProfile("zero"))
larmor = System(free, SpinConfig([[0.0, 0.0, 0.0]], [0.0, 0.0, 1.0]), h=1.0)
s0 = TrajectoryState(0.0, np.zeros((2, free.grid.n, 2)), product_state([[1, 0, 0]]))
traj = integrate(larmor, s0, IntegratorSpec(dt=1e-3, t_final=5.0, record_every=1000))
for s in traj:
    S = spin_expectations(s.a)[0]
    print(f"t={s.t:4.1f}  S=({S[0]:+.6f}, {S[1]:+.6f}, {S[2]:+.6f})  "
          f"closed form=({np.cos(2 * s.t):+.6f}, {np.sin(2 * s.t):+.6f}, 0)")

# %% [markdown]
# Two coupled spins on a 512-mode grid.  The interaction-picture RK4 step
# keeps the energy drift small and it shrinks about 16x per halving of dt.

# %%
chi = CutoffProfile()
space = ModeSpace(build_grid_for(chi, 16, 6), chi)
pair = System(space, SpinConfig([[0.5, 0, 0], [-0.5, 0, 0]], [0, 0, 1.0]), h=10.0)
X0 = np.random.default_rng(1).normal(size=(2, space.grid.n, 2)) * chi(space.grid.radii)[:, None]
start = TrajectoryState(0.0, X0, product_state([[1, 0, 0], [0, 1, 1]]))

previous = None
for dt in (0.025, 0.0125, 0.00625):
    run = integrate(pair, start, IntegratorSpec(dt=dt, t_final=10.0, record_every=int(round(0.5 / dt))))
    E = energies(pair, run)
    drift = np.abs(E - E[0]).max() / abs(E[0])
    ratio = "" if previous is None else f"  (ratio {previous / drift:.1f})"
    print(f"dt={dt:<8} relative energy drift {drift:.3e}{ratio}")
    previous = drift
