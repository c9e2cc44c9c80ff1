"""Semiclassical observables and the residuals of their evolution laws.

Everything here is a pure function of recorded trajectories.  Spatial and
time derivatives use fourth-order central differences; ``grad rho`` is
analytic because it enters as a source term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import System, TrajectoryState, stack
from .spin_algebra import spin_expectations

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0  # f'(0) * step from f(-2..2)
_OFFS = np.array([-2, -1, 0, 1, 2])


def photon_number(s: TrajectoryState, grid) -> float:
    """``(|q|^2 + |p|^2) / 2h``."""
    if s.h <= 0:
        raise ValueError("h must be positive")
    return grid.norm2(s.X) / (2.0 * s.h)


def field_B(system: System, s: TrajectoryState, x):
    return system.space.field_B(x, s.X)


def field_E(system: System, s: TrajectoryState, x):
    return system.space.field_E(x, s.X)


def default_probes(config, scale: float = 1.0, n_random: int = 8, seed: int = 0):
    """Particle positions, pairwise midpoints and random points around the hull."""
    pos = config.positions
    pts = [p for p in pos]
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            pts.append(0.5 * (pos[i] + pos[j]))
    lo = pos.min(axis=0) if len(pos) else np.zeros(3)
    hi = pos.max(axis=0) if len(pos) else np.zeros(3)
    c = 0.5 * (lo + hi)
    rng = np.random.default_rng(seed)
    half = 0.5 * (hi - lo) + 2.0 * scale
    pts.extend(c + rng.uniform(-1, 1, size=(n_random, 3)) * half)
    return np.array(pts)


def _stencil_points(x, dx):
    """Points ``x + o dx e_j`` for offsets -2..2 and axes j: shape ``(P, 3, 5, 3)``."""
    x = np.atleast_2d(x)
    e = np.eye(3)
    return x[:, None, None, :] + dx * _OFFS[None, None, :, None] * e[None, :, None, :]


def _jacobian(fieldfn, x, dx):
    """``J[P, i, j] = d F_i / d x_j`` by fourth-order central differences."""
    pts = _stencil_points(x, dx)
    vals = fieldfn(pts.reshape(-1, 3)).reshape(pts.shape[:3] + (3,))
    return np.einsum("pjoi,o->pij", vals, _D1) / dx


def divergence(fieldfn, x, dx=1e-3):
    return np.trace(_jacobian(fieldfn, x, dx), axis1=1, axis2=2)


def curl(fieldfn, x, dx=1e-3):
    J = _jacobian(fieldfn, x, dx)
    return np.stack(
        [J[:, 2, 1] - J[:, 1, 2], J[:, 0, 2] - J[:, 2, 0], J[:, 1, 0] - J[:, 0, 1]], axis=1
    )


def _time_derivative(values, tau):
    """Fourth-order central difference along axis 0 at interior samples 2..n-3."""
    v = np.asarray(values)
    n = len(v)
    return sum(c * v[2 + o : n - 2 + o] for c, o in zip(_D1, _OFFS)) / tau


def _uniform_stride(times):
    if len(times) < 5:
        raise ValueError(f"need at least 5 recorded states for time derivatives, got {len(times)}")
    d = np.diff(times)
    if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
        raise ValueError("recorded states are not uniformly spaced in time")
    return d[0]


def spin_current(system: System, S, x):
    """``h sum_lam grad rho(x - x_lam) ^ S_lam`` at points ``x``.

    This is the source in ``dE/dt = rot B + current``; the orientation
    follows from ``K_12(x, x_lam) = -d_3 rho(x - x_lam)``.
    """
    x = np.atleast_2d(x)
    out = np.zeros_like(x)
    for xl, Sl in zip(system.config.positions, S):
        out += np.cross(system.space.grad_rho(x - xl), Sl)
    return system.h * out


@dataclass
class ResidualReport:
    """Maximum residual per law, with the sampling steps that produced it."""

    residuals: dict
    dt: float
    dx: float | None = None
    detail: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.residuals[key]


def maxwell_residuals(system: System, traj, probes=None, dx: float = 1e-3) -> ResidualReport:
    """Residuals of the div, Faraday and Ampere laws at probe points.

    ``faraday = max |dB/dt + rot E|``, ``ampere = max |dE/dt - rot B - current|``,
    both over interior recorded times.  ``div_B``/``div_E`` are maxima over
    all recorded times.
    """
    t, Xs, As, _ = stack(traj)
    tau = _uniform_stride(t)
    if probes is None:
        probes = default_probes(system.config)
    probes = np.atleast_2d(probes)
    space = system.space
    B = np.array([space.field_B(probes, X) for X in Xs])
    E = np.array([space.field_E(probes, X) for X in Xs])
    rotB = np.array([curl(lambda y: space.field_B(y, X), probes, dx) for X in Xs])
    rotE = np.array([curl(lambda y: space.field_E(y, X), probes, dx) for X in Xs])
    divB = np.array([divergence(lambda y: space.field_B(y, X), probes, dx) for X in Xs])
    divE = np.array([divergence(lambda y: space.field_E(y, X), probes, dx) for X in Xs])
    cur = np.array([spin_current(system, spin_expectations(a), probes) for a in As])
    dB = _time_derivative(B, tau)
    dE = _time_derivative(E, tau)
    far = np.linalg.norm(dB + rotE[2:-2], axis=-1)
    amp = np.linalg.norm(dE - rotB[2:-2] - cur[2:-2], axis=-1)
    return ResidualReport(
        residuals={
            "faraday": float(far.max()),
            "ampere": float(amp.max()),
            "div_B": float(np.abs(divB).max()),
            "div_E": float(np.abs(divE).max()),
        },
        dt=tau,
        dx=dx,
        detail={
            "field_scale": float(max(np.abs(B).max(), np.abs(E).max())),
            "current_scale": float(np.abs(cur).max()),
        },
    )


def bloch_rhs(system: System, X, a):
    """``2 (beta + B(x_lam)) ^ S_lam`` for every particle."""
    S = spin_expectations(a)
    return 2.0 * np.cross(system.coefficients(X), S)


def bloch_residual(system: System, traj) -> ResidualReport:
    t, Xs, As, _ = stack(traj)
    tau = _uniform_stride(t)
    S = np.array([spin_expectations(a) for a in As])
    lhs = _time_derivative(S, tau)
    rhs = np.array([bloch_rhs(system, X, a) for X, a in zip(Xs[2:-2], As[2:-2])])
    per = np.linalg.norm(lhs - rhs, axis=-1).max(axis=0)
    return ResidualReport(
        residuals={"bloch": float(per.max()) if per.size else 0.0},
        dt=tau,
        detail={"per_particle": per},
    )


def photon_number_rates(system: System, X, a) -> tuple[float, float]:
    """Two expressions for ``dN/dt``.

    ``direct = sum B_m(x_lam, -p, q) S_m``;
    ``polarized = sum (E_j(x_lam, Pi_- X) - E_j(x_lam, Pi_+ X)) S_j``.
    """
    S = spin_expectations(a)
    if system.config.N == 0:
        return 0.0, 0.0
    pos = system.config.positions
    space = system.space
    q, p = X
    direct = np.sum(space.field_B(pos, np.stack([-p, q])) * S)
    plus, minus = system.grid.polarization_projectors(X)
    polarized = np.sum((space.field_E(pos, minus) - space.field_E(pos, plus)) * S)
    return float(direct), float(polarized)


def photon_number_law(system: System, traj) -> ResidualReport:
    """Compare the finite-difference ``dN/dt`` with both closed forms."""
    t, Xs, As, _ = stack(traj)
    tau = _uniform_stride(t)
    N = np.array([system.grid.norm2(X) / (2.0 * system.h) for X in Xs])
    dN = _time_derivative(N, tau)
    rates = np.array([photon_number_rates(system, X, a) for X, a in zip(Xs, As)])
    inner = rates[2:-2]
    scale = max(np.abs(rates).max(), 1e-300)
    return ResidualReport(
        residuals={
            "direct": float(np.abs(dN - inner[:, 0]).max()),
            "polarized": float(np.abs(dN - inner[:, 1]).max()),
            "forms_agree": float(np.abs(rates[:, 0] - rates[:, 1]).max() / scale),
        },
        dt=tau,
        detail={"rate_scale": float(scale)},
    )
