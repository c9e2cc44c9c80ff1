import numpy as np
import pytest
from scipy import integrate

from spinphoton.mode_space import TWO_PI_CUBED, CutoffProfile, ModeSpace, build_grid_for


def radial_integral(chi, f, lo=0.0, hi=None):
    """High-accuracy 1-D integral of ``chi(r)^2 f(r)`` used as an independent oracle."""
    if hi is None:
        hi = chi.support()[1] + 2.0
    g = lambda r: chi(np.array([r]))[0] ** 2 * f(r)
    pts = np.linspace(lo, hi, 41)
    return sum(
        integrate.quad(g, a, b, limit=200, epsabs=1e-17, epsrel=1e-13)[0]
        for a, b in zip(pts[:-1], pts[1:])
    )


def c33_diagonal_oracle(chi):
    """``(2 pi)^{-3} (2/3) 4 pi int chi^2 r^2 dr``."""
    return (2 / 3) * 4 * np.pi * radial_integral(chi, lambda r: r**2) / TWO_PI_CUBED


def rho0_oracle(chi):
    return 4 * np.pi * radial_integral(chi, lambda r: r**2) / TWO_PI_CUBED


@pytest.fixture(scope="session")
def chi():
    return CutoffProfile()


@pytest.fixture(scope="session")
def small_space(chi):
    return ModeSpace(build_grid_for(chi, 8, 6), chi)


@pytest.fixture(scope="session")
def space(chi):
    return ModeSpace(build_grid_for(chi, 16, 10), chi)


@pytest.fixture(scope="session")
def fine_space(chi):
    return ModeSpace(build_grid_for(chi, 40, 12), chi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
