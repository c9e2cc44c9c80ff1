"""The magnetic field carried by the approximate ground state at first order.

It is static and divergence free, its curl is -h e_3 ^ grad(sum of rho),
and the matching electric field vanishes.
"""

# %%
import numpy as np

from spinphoton import CutoffProfile, ModeSpace, SpinConfig, build_grid_for
from spinphoton.observables import curl, divergence
from spinphoton.quasimode import QuasimodeModel, first_order_field, first_order_quadrature, quasimode_series

chi = CutoffProfile()
space = ModeSpace(build_grid_for(chi, 16, 10), chi)
cfg = SpinConfig([[0.4, 0, 0], [-0.4, 0.1, 0]], [0, 0, 1.0])
h = 0.5
series = quasimode_series(QuasimodeModel.build(space, cfg, D=None, max_sector=1), 0)

for x in ([0.0, 0.0, 0.0], [0.4, 0.0, 0.0], [1.0, 1.0, 0.5]):
    fo = first_order_field(series, x, h)
    print(f"x={x}: B(Fock)={np.round(fo.fock, 8)}  B(quadrature)={np.round(fo.quadrature, 8)}  "
          f"|E|={np.abs(fo.electric).max():.1e}")

# %%
f = lambda y: first_order_quadrature(space, cfg, y, h)
pts = np.random.default_rng(0).uniform(-1, 1, (4, 3))
grad_phi = sum(space.grad_rho(pts - xl) for xl in cfg.positions)
print("div B  ", np.abs(divergence(f, pts)).max())
print("rot B + h e3 ^ grad Phi", np.abs(curl(f, pts) + h * np.cross([0, 0, 1.0], grad_phi)).max())
