"""An approximate ground state in powers of sqrt(h) on a truncated Fock space.

Residuals of the truncated series should scale like h^2 (lowest order) and
h^2.5 (with the second-order energy).  A wrong second-order energy loses
the extra half power.
"""

# %%
import numpy as np

from spinphoton import CutoffProfile, ModeSpace, SpinConfig, build_grid_for
from spinphoton.quasimode import (
    QuasimodeModel,
    exact_operator_oracle,
    lambda2_closed_form,
    quasimode_series,
    residual_norm,
)

chi = CutoffProfile()
space = ModeSpace(build_grid_for(chi, 16, 10), chi)
cfg = SpinConfig([[0.4, 0, 0], [-0.4, 0.1, 0]], [0, 0, 1.5])
model = QuasimodeModel.build(space, cfg, D=40, max_sector=3)
series = quasimode_series(model, 1)
print(f"Fock space dimension {model.dim}; lambda_1={series.lam[1]}, lambda_2={series.lam[2]:.6e}")

hs = np.array([1e-1, 1e-2, 1e-3])
for p, terms in [(0, "odd"), (1, "even")]:
    r = np.array([residual_norm(series, p, h, terms) for h in hs])
    print(f"p={p}: residuals {r}, slope {np.polyfit(np.log(hs), np.log(r), 1)[0]:.3f}")

# %% [markdown]
# The second-order energy from the recursion against its closed form, on
# the full mode set (one-photon sector suffices for lambda_2).

# %%
full = quasimode_series(QuasimodeModel.build(space, cfg, D=None, max_sector=1), 0)
print("lambda_2 recursion  ", full.lam[2])
print("lambda_2 closed form", lambda2_closed_form(space, cfg))

# %% [markdown]
# Exact diagonalization of a tiny model bounds the error of the series energy.

# %%
tiny = QuasimodeModel.build(space, SpinConfig([[0, 0, 0]], [0, 0, 1.0]), D=4, max_sector=3)
ts = quasimode_series(tiny, 1)
h = 0.1
lowest = np.linalg.eigvalsh(exact_operator_oracle(tiny, h))[0]
bound = residual_norm(ts, 1, h) / np.linalg.norm(ts.trial(h, 2))
print(f"lowest eigenvalue {lowest:.12f}, series {ts.energy(h, 1):.12f}, bound {bound:.1e}")
