"""Coupled field/spin Hamiltonian dynamics.

The field obeys ``q' = M p + Q``, ``p' = -M q + P`` with the spin-sourced
terms ``Q = h sum S_m b_m(x_lam)`` and ``P = -h sum S_m a_m(x_lam)``, where
``S`` are the spin expectations.  The spinor follows
``a' = -i T a + i <T a, a> a / |a|^2`` with ``T = sum (beta + B(x_lam)).sigma``.

The default stepper is RK4 in the interaction picture: the free rotation
(frequencies up to ``r_max``) is applied exactly and RK4 only sees the
bounded coupling terms.

On a finite grid every generator is bounded, so there is no distinction
between weak and strong solutions; nothing here emulates unbounded-domain
effects.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .mode_space import ModeSpace
from .spin_algebra import (
    SpinConfig,
    apply_T_coeffs,
    propagate_frozen,
    spin_expectations,
)

log = logging.getLogger(__name__)

METHODS = ("rk4", "strang")
RENORMALIZE_EVERY = 100


@dataclass(eq=False)
class System:
    """Everything a trajectory needs besides its state."""

    space: ModeSpace
    config: SpinConfig
    h: float

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("h must be nonnegative")

    @property
    def grid(self):
        return self.space.grid

    @cached_property
    def a_cpl(self) -> np.ndarray:
        """``a_m(x_lam)``, shape ``(N, 3, n, 2)``."""
        return self.space.coupling_a(self.config.positions).reshape(self.config.N, 3, self.grid.n, 2)

    @cached_property
    def b_cpl(self) -> np.ndarray:
        return self.space.coupling_b(self.config.positions).reshape(self.config.N, 3, self.grid.n, 2)

    @cached_property
    def _wa(self):
        return self.a_cpl * self.grid.weights[:, None]

    @cached_property
    def _wb(self):
        return self.b_cpl * self.grid.weights[:, None]

    def fields_at_particles(self, X) -> np.ndarray:
        """``B_m(x_lam, q, p)`` as an ``(N, 3)`` array."""
        q, p = X
        return np.einsum("lmnc,nc->lm", self._wa, q) + np.einsum("lmnc,nc->lm", self._wb, p)

    def coefficients(self, X) -> np.ndarray:
        """Rows ``beta + B(x_lam)`` defining ``T(q, p)``."""
        return self.config.beta + self.fields_at_particles(X)

    def source(self, S) -> np.ndarray:
        """Interaction part ``(Q, P)`` of the field velocity for spin expectations ``S``."""
        Q = np.einsum("lm,lmnc->nc", S, self.b_cpl)
        P = -np.einsum("lm,lmnc->nc", S, self.a_cpl)
        return self.h * np.stack([Q, P])


@dataclass(frozen=True, eq=False)
class TrajectoryState:
    t: float
    X: np.ndarray
    a: np.ndarray
    action: float = 0.0
    h: float = 1.0


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = "rk4"
    dt: float = 1e-3
    t_final: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(abs(self.t_final) / self.dt))

    @property
    def signed_dt(self) -> float:
        return self.dt if self.t_final >= 0 else -self.dt


def spin_velocity(c, a):
    Ta = apply_T_coeffs(c, a)
    return -1j * Ta + 1j * np.vdot(a, Ta) * a / np.vdot(a, a).real


def hamiltonian(system: System, X, a) -> float:
    """``H_ph(X) + h <T(X) a, a>`` (the beta term included)."""
    S = spin_expectations(a)
    return system.grid.photon_energy(X) + system.h * float(np.sum(system.coefficients(X) * S))


def rhs(system: System, X, a):
    """Time derivatives ``(dX/dt, da/dt)`` of the full (non-rotating) system."""
    g = system.grid
    S = spin_expectations(a)
    q, p = X
    free = np.stack([g.apply_M(p), -g.apply_M(q)])
    return free + system.source(S), spin_velocity(system.coefficients(X), a)


def action_density(system: System, X, a, dX=None) -> float:
    """Integrand ``(p.q' - q.p')/2 - H`` of the phase."""
    if dX is None:
        dX, _ = rhs(system, X, a)
    g = system.grid
    kin = 0.5 * (g.inner(X[1], dX[0]) - g.inner(X[0], dX[1]))
    return kin - hamiltonian(system, X, a)


class _Rotations:
    """Cached exact free rotations for the stage offsets of one step size."""

    def __init__(self, radii, dt):
        self.radii = radii
        self.cache = {}
        for tau in (0.5 * dt, dt, -0.5 * dt, -dt):
            self.cache[tau] = (np.cos(tau * radii)[:, None], np.sin(tau * radii)[:, None])

    def __call__(self, X, tau):
        if tau == 0:
            return X
        c, s = self.cache[tau]
        q, p = X
        return np.stack([c * q + s * p, -s * q + c * p])


def _interaction_velocity(system, Y, a, tau, rot):
    X = rot(Y, tau)
    S = spin_expectations(a)
    c = system.config.beta + system.fields_at_particles(X)
    G = system.source(S)
    g = system.grid
    q, p = X
    dX = np.stack([g.apply_M(p), -g.apply_M(q)]) + G
    kin = 0.5 * (g.inner(p, dX[0]) - g.inner(q, dX[1]))
    H = g.photon_energy(X) + system.h * float(np.sum(c * S))
    return rot(G, -tau), spin_velocity(c, a), kin - H


def _step_rk4(system, s, dt, rot):
    Y, a = s.X, s.a
    k1 = _interaction_velocity(system, Y, a, 0.0, rot)
    k2 = _interaction_velocity(system, Y + 0.5 * dt * k1[0], a + 0.5 * dt * k1[1], 0.5 * dt, rot)
    k3 = _interaction_velocity(system, Y + 0.5 * dt * k2[0], a + 0.5 * dt * k2[1], 0.5 * dt, rot)
    k4 = _interaction_velocity(system, Y + dt * k3[0], a + dt * k3[1], dt, rot)
    Y1 = Y + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    a1 = a + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    phi = s.action + dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return replace(s, t=s.t + dt, X=rot(Y1, dt), a=a1, action=phi)


def _step_strang(system, s, dt, rot):
    X = rot(s.X, 0.5 * dt)
    X = X + 0.5 * dt * system.source(spin_expectations(s.a))
    c = system.coefficients(X)
    # the phase-correction term is a pure phase because <Ta, a> is constant
    # under the frozen propagator
    a = propagate_frozen(c, s.a, dt)
    a = a * np.exp(1j * dt * np.vdot(s.a, apply_T_coeffs(c, s.a)).real)
    phi = s.action + dt * action_density(system, X, a)
    X = X + 0.5 * dt * system.source(spin_expectations(a))
    return replace(s, t=s.t + dt, X=rot(X, 0.5 * dt), a=a, action=phi)


_STEPPERS = {"rk4": _step_rk4, "strang": _step_strang}


def step(system: System, s: TrajectoryState, spec: IntegratorSpec, dt: float | None = None):
    """Advance by one step of ``spec.method``; ``dt`` may be negative."""
    dt = spec.signed_dt if dt is None else dt
    return _STEPPERS[spec.method](system, s, dt, _Rotations(system.grid.radii, dt))


def integrate(system: System, s0: TrajectoryState, spec: IntegratorSpec) -> list[TrajectoryState]:
    """Run ``spec.n_steps`` steps, recording every ``spec.record_every`` (and the start)."""
    dt = spec.signed_dt
    rot = _Rotations(system.grid.radii, dt)
    stepper = _STEPPERS[spec.method]
    s = replace(s0, h=system.h)
    out = [s]
    for i in range(1, spec.n_steps + 1):
        s = stepper(system, s, dt, rot)
        if i % RENORMALIZE_EVERY == 0:
            nrm = np.linalg.norm(s.a)
            if abs(nrm - 1.0) > 1e-10:
                log.info("renormalized spinor at t=%.6g (|a|-1 = %.3e)", s.t, nrm - 1.0)
            s = replace(s, a=s.a / nrm)
        if i % spec.record_every == 0:
            out.append(s)
    return out


def stack(traj):
    """Arrays ``(t, X, a, action)`` from a list of states."""
    return (
        np.array([s.t for s in traj]),
        np.stack([s.X for s in traj]),
        np.stack([s.a for s in traj]),
        np.array([s.action for s in traj]),
    )


def energies(system: System, traj) -> np.ndarray:
    return np.array([hamiltonian(system, s.X, s.a) for s in traj])


@dataclass
class DivergenceCurve:
    t: np.ndarray
    separation: np.ndarray
    slope: float
    intercept: float
    info: dict = field(default_factory=dict)

    def bounded_by_affine(self, slack: float = 2.0) -> bool:
        """``log sep(t) <= intercept + slope t + log slack`` at every recorded time."""
        pos = self.separation > 0
        if not pos.any():
            return True
        logs = np.log(self.separation[pos])
        return bool(np.all(logs <= self.intercept + self.slope * self.t[pos] + np.log(slack) + 1e-12))


def stability_probe(system: System, s0, s0_perturbed, spec: IntegratorSpec) -> DivergenceCurve:
    """Separation ``|dX(t)| + sum_lam |dS_lam(t)|`` of two nearby trajectories.

    The log-separation is fitted by an upper affine envelope: the least
    squares line shifted up to touch the highest point.
    """
    ta = integrate(system, s0, spec)
    tb = integrate(system, s0_perturbed, spec)
    t = np.array([s.t for s in ta])
    sep = np.array(
        [
            np.sqrt(system.grid.norm2(a.X - b.X))
            + np.sum(np.linalg.norm(spin_expectations(a.a) - spin_expectations(b.a), axis=1))
            for a, b in zip(ta, tb)
        ]
    )
    pos = sep > 0
    if pos.sum() < 2:
        return DivergenceCurve(t, sep, 0.0, -np.inf)
    slope, icpt = np.polyfit(t[pos], np.log(sep[pos]), 1)
    icpt += np.max(np.log(sep[pos]) - (icpt + slope * t[pos]))
    return DivergenceCurve(t, sep, float(slope), float(icpt))
