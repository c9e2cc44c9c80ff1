"""Discretized transverse field space.

A field ``f`` on k-space with ``k . f(k) = 0`` is stored by its two
polarization components at each quadrature node, so an array of shape
``(n, 2)`` is a field vector and an array of shape ``(2, n, 2)`` holds a
phase-space point ``(q, p)``.  Transversality is therefore structural.

Coupling vectors, the smearing density ``rho`` and the fields read off a
phase-space point live on :class:`ModeSpace`, which pairs a :class:`KGrid`
with a radial cutoff profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import optimize
from scipy.integrate import lebedev_rule

TWO_PI_CUBED = (2.0 * np.pi) ** 3

__all__ = [
    "CutoffProfile",
    "KGrid",
    "ModeSpace",
    "build_grid",
    "build_grid_for",
    "plateau_bump",
]


def plateau_bump(s):
    """Smooth bump equal to 1 on [0, 1/2] and vanishing on [1, inf)."""
    s = np.asarray(s, dtype=float)

    def f(t):
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out

    up = f(1.0 - s)
    return up / (up + f(s - 0.5))


@dataclass(frozen=True)
class CutoffProfile:
    """Radial form factor ``chi(|k|)`` entering the couplings.

    ``kind`` is one of

    ``"default"``
        ``exp(-s^2/(r - rho_cut)^2) * exp(-r^2/(2 s^2))`` for ``r > rho_cut``
        and zero below.  Smooth, rapidly decaying, vanishing near the origin.
    ``"plateau"``
        ``plateau_bump(r * eps)``; equals 1 near the origin (Ising studies).
    ``"zero"``
        identically zero, which decouples spins from the field.
    """

    kind: str = "default"
    rho_cut: float = 0.1
    scale: float = 1.0
    eps: float = 0.1

    def __post_init__(self):
        if self.kind not in ("default", "plateau", "zero"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")
        if self.kind == "default" and (self.rho_cut <= 0 or self.scale <= 0):
            raise ValueError("rho_cut and scale must be positive")
        if self.kind == "plateau" and self.eps <= 0:
            raise ValueError("eps must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "plateau":
            return plateau_bump(r * self.eps)
        out = np.zeros_like(r)
        m = r > self.rho_cut
        s2 = self.scale**2
        out[m] = np.exp(-s2 / (r[m] - self.rho_cut) ** 2 - r[m] ** 2 / (2.0 * s2))
        return out

    def support(self, floor: float = 1e-12) -> tuple[float, float]:
        """Radial interval outside of which ``chi`` is zero or below ``floor``."""
        if self.kind == "plateau":
            return 0.0, 1.0 / self.eps
        if self.kind == "zero":
            return 0.0, 1.0
        peak = self.rho_cut + self.scale
        hi = optimize.brentq(
            lambda r: np.log(self(np.array([r]))[0]) - np.log(floor),
            peak,
            peak + 20.0 * self.scale,
        )
        return self.rho_cut, hi


def _frames(khat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    zhat = np.array([0.0, 0.0, 1.0])
    e1 = np.cross(zhat, khat)
    nrm = np.linalg.norm(e1, axis=1)
    pole = nrm < 1e-8
    e1[~pole] /= nrm[~pole, None]
    e1[pole] = [1.0, 0.0, 0.0]
    e2 = np.cross(khat, e1)
    return e1, e2


def _angular_rule(angular_order: int, angular: str):
    if angular == "lebedev":
        orders = (3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31, 35, 41,
                  47, 53, 59, 65, 71, 77, 83, 89, 95, 101, 107, 113, 119, 125, 131)
        order = next((o for o in orders if o >= angular_order), None)
        if order is None:
            raise ValueError(f"no Lebedev rule of degree >= {angular_order}")
        x, w = lebedev_rule(order)
        return x.T, w
    if angular != "gauss":
        raise ValueError(f"unknown angular rule {angular!r}")
    # Gauss-Legendre in cos(theta) x uniform phi, exact to degree angular_order.
    # n_phi is a multiple of 4 so the rule is invariant under 90 degree turns
    # about z and under the reflections x -> -x, y -> -y, z -> -z.
    n_theta = (angular_order + 2) // 2
    n_phi = 4 * ((angular_order + 4) // 4)
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - ct**2)
    dirs = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(ct, n_phi),
        ],
        axis=1,
    )
    w = np.repeat(wt, n_phi) * (2.0 * np.pi / n_phi)
    return dirs, w


@dataclass(frozen=True, eq=False)
class KGrid:
    """Product quadrature on k-space with a polarization frame per node.

    ``weights`` include the ``r^2`` Jacobian so ``sum(weights * g(|k|))``
    approximates the volume integral of ``g``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    @property
    def n(self) -> int:
        return len(self.weights)

    @cached_property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes, axis=1)

    @cached_property
    def khat(self) -> np.ndarray:
        return self.nodes / self.radii[:, None]

    @property
    def r_min(self) -> float:
        return float(self.radii.min())

    # -- field-vector algebra -------------------------------------------------

    def _check(self, f):
        f = np.asarray(f)
        if f.shape[-2:] != (self.n, 2):
            raise ValueError(
                f"field of shape {f.shape} does not live on a grid with {self.n} nodes"
            )
        return f

    def zeros(self, phase_space: bool = True) -> np.ndarray:
        return np.zeros((2, self.n, 2) if phase_space else (self.n, 2))

    def inner(self, f, g) -> float:
        """Real inner product ``sum_i w_i f(k_i) . g(k_i)``.

        Phase-space points are paired componentwise and summed.
        """
        f, g = self._check(f), self._check(g)
        if f.shape != g.shape:
            raise ValueError("shape mismatch")
        return float(np.sum(f * g * self.weights[:, None]))

    def norm2(self, f) -> float:
        return self.inner(f, f)

    def apply_M(self, f):
        return self._check(f) * self.radii[:, None]

    def apply_M_inv(self, f):
        return self._check(f) / self.radii[:, None]

    def helicity_J(self, X):
        """Rotate each polarization vector by +90 degrees about ``k``."""
        X = self._check(X)
        out = np.empty_like(X)
        out[..., 0] = -X[..., 1]
        out[..., 1] = X[..., 0]
        return out

    def polarization_projectors(self, X):
        """Return ``(Pi_plus X, Pi_minus X)``, the circular polarization parts.

        ``Pi_pm = (I pm J^{-1} F) / 2`` with ``F(q, p) = (-p, q)``.  These are
        complementary orthogonal projectors and ``F Pi_pm = pm J Pi_pm``.
        """
        X = self._check(X)
        FX = np.stack([-X[1], X[0]])
        JinvFX = -self.helicity_J(FX)
        return 0.5 * (X + JinvFX), 0.5 * (X - JinvFX)

    def free_rotation(self, X, t: float):
        """Exact free-field flow: per node rotation of ``(q, p)`` by ``t |k|``."""
        X = self._check(X)
        c = np.cos(t * self.radii)[:, None]
        s = np.sin(t * self.radii)[:, None]
        q, p = X
        return np.stack([c * q + s * p, -s * q + c * p])

    def photon_energy(self, X) -> float:
        """``1/2 sum_i w_i |k_i| (|q_i|^2 + |p_i|^2)``."""
        X = self._check(X)
        return 0.5 * float(np.sum(self.weights * self.radii * np.sum(X**2, axis=(0, 2))))

    def to_vectors(self, f) -> np.ndarray:
        """Rebuild the 3-vector field ``c1 e1 + c2 e2`` at every node."""
        f = self._check(f)
        return f[..., 0:1] * self.e1 + f[..., 1:2] * self.e2

    def from_vectors(self, v) -> np.ndarray:
        """Project 3-vectors onto the polarization frames (drops the ``k`` part)."""
        v = np.asarray(v)
        return np.stack([np.sum(v * self.e1, -1), np.sum(v * self.e2, -1)], axis=-1)


def build_grid(
    radial_order: int,
    angular_order: int,
    r_min: float,
    r_max: float,
    angular: str = "gauss",
) -> KGrid:
    """Gauss-Legendre in ``|k|`` on ``[r_min, r_max]`` times a spherical rule.

    Radial nodes are interior to the interval, so every node has ``|k| > 0``
    even for ``r_min = 0``.
    """
    if radial_order < 2:
        raise ValueError("radial_order must be >= 2")
    if angular_order < 6:
        raise ValueError("angular_order must be >= 6")
    if not (0 <= r_min < r_max):
        raise ValueError(f"need 0 <= r_min < r_max, got r_min={r_min}, r_max={r_max}")
    x, wr = np.polynomial.legendre.leggauss(radial_order)
    r = 0.5 * (r_max - r_min) * x + 0.5 * (r_max + r_min)
    wr = 0.5 * (r_max - r_min) * wr * r**2
    dirs, wa = _angular_rule(angular_order, angular)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    weights = np.outer(wr, wa).ravel()
    khat = np.tile(dirs, (radial_order, 1))
    e1, e2 = _frames(khat)
    return KGrid(nodes=nodes, weights=weights, e1=e1, e2=e2)


def build_grid_for(
    chi: CutoffProfile, radial_order: int, angular_order: int, angular: str = "gauss"
) -> KGrid:
    """Grid whose radial interval covers the numerical support of ``chi``."""
    lo, hi = chi.support()
    return build_grid(radial_order, angular_order, lo, hi, angular)


@dataclass(eq=False)
class ModeSpace:
    """A grid together with the cutoff; owns every coupling kernel.

    Axes ``m`` are 0-based (0, 1, 2 for x, y, z).  Positions may be a single
    3-vector or an array of shape ``(P, 3)``; coupling arrays then carry the
    leading ``P`` axis.
    """

    grid: KGrid
    chi: CutoffProfile = field(default_factory=CutoffProfile)

    @cached_property
    def amp(self) -> np.ndarray:
        g = self.grid
        return self.chi(g.radii) * np.sqrt(g.radii) / TWO_PI_CUBED**0.5

    @cached_property
    def kernel_B(self) -> np.ndarray:
        """Frame components of ``k^ x e_m``: shape ``(n, 3, 2)``."""
        g = self.grid
        return np.stack([-g.e2, g.e1], axis=-1)

    @cached_property
    def kernel_E(self) -> np.ndarray:
        """Frame components of ``k^ x (k^ x e_m)``, i.e. minus the transverse ``e_m``."""
        g = self.grid
        return np.stack([-g.e1, -g.e2], axis=-1)

    @cached_property
    def chi2(self) -> np.ndarray:
        return self.chi(self.grid.radii) ** 2

    def _phase(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.grid.nodes.T

    def _coupling(self, x, m, trig, kernel):
        ph = trig(self._phase(x))
        out = (ph * self.amp)[..., None, :, None] * np.moveaxis(kernel, 1, 0)
        return out if m is None else out[..., m, :, :]

    def coupling_a(self, x, m=None):
        """``a_m(x)(k) = chi |k|^{1/2} (2 pi)^{-3/2} sin(k.x) (k x e_m)/|k|``."""
        return self._coupling(x, m, np.sin, self.kernel_B)

    def coupling_b(self, x, m=None):
        return self._coupling(x, m, np.cos, self.kernel_B)

    def coupling_alpha(self, x, m=None):
        """Electric-field counterpart of :meth:`coupling_a`."""
        return self._coupling(x, m, np.sin, self.kernel_E)

    def coupling_beta(self, x, m=None):
        return self._coupling(x, m, np.cos, self.kernel_E)

    def _field(self, x, X, kernel):
        q, p = self.grid._check(X)
        ph = self._phase(x)
        wa = self.grid.weights * self.amp
        qk = np.einsum("nc,nmc->nm", q, kernel)
        pk = np.einsum("nc,nmc->nm", p, kernel)
        return (np.sin(ph) * wa) @ qk + (np.cos(ph) * wa) @ pk

    def field_B(self, x, X):
        """``B_m(x, q, p) = a_m(x).q + b_m(x).p`` for ``m = 0, 1, 2``."""
        return self._field(x, X, self.kernel_B)

    def field_E(self, x, X):
        """``E_m(x, q, p) = alpha_m(x).q + beta_m(x).p``."""
        return self._field(x, X, self.kernel_E)

    def rho(self, x):
        """Smearing density ``(2 pi)^{-3} int chi^2 cos(k.x) dk``."""
        return np.cos(self._phase(x)) @ (self.grid.weights * self.chi2) / TWO_PI_CUBED

    def grad_rho(self, x):
        s = np.sin(self._phase(x)) * (self.grid.weights * self.chi2)
        return -(s @ self.grid.nodes) / TWO_PI_CUBED

    def coupling_integral(self, d, u, v, denominator=None):
        """``(2 pi)^{-3} sum_i w_i chi^2 cos(k.d) (k^ x u).(k^ x v) / den``.

        The direct quadrature form of the coupling constants, evaluated
        without going through coupling vectors.  ``den`` defaults to ``|k|``
        cancelled against the ``|k|`` in ``|a|^2``, i.e. no extra factor.
        """
        g = self.grid
        u, v = np.asarray(u, float), np.asarray(v, float)
        ang = u @ v - (g.khat @ u) * (g.khat @ v)
        w = g.weights * self.chi2 * ang
        if denominator is not None:
            w = w * g.radii / denominator(g.radii)
        return np.cos(self._phase(d)) @ w / TWO_PI_CUBED
