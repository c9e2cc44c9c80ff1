"""Classical spin-photon dynamics, fixed points and quasimodes on a k-space grid."""

from .dynamics import IntegratorSpec, System, TrajectoryState, energies, integrate
from .mode_space import CutoffProfile, KGrid, ModeSpace, build_grid, build_grid_for
from .spin_algebra import SpinConfig, basis_state, product_state, spin_expectations

__all__ = [
    "CutoffProfile",
    "IntegratorSpec",
    "KGrid",
    "ModeSpace",
    "SpinConfig",
    "System",
    "TrajectoryState",
    "basis_state",
    "build_grid",
    "build_grid_for",
    "energies",
    "integrate",
    "product_state",
    "spin_expectations",
]
