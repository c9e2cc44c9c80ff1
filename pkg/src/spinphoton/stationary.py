"""Fixed points of the coupled system, their energies and the Ising limit.

Fixed points have ``q = q_h(u)``, ``p = p_h(u)`` and ``u`` an eigenvector of
``T(q, p)``.  For particles in a plane orthogonal to ``beta`` every product
state ``a_E`` qualifies.  Instead of rotating coordinates so that ``beta``
points along ``z``, the code uses ``beta_hat`` wherever the aligned
formulas use ``e_3``; the two are equal in the continuum.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .dynamics import System, hamiltonian
from .mode_space import CutoffProfile, ModeSpace, build_grid
from .spin_algebra import SpinConfig, apply_T_coeffs, basis_state, spin_expectations


def fixed_point_fields(system: System, u) -> np.ndarray:
    """``(q_h, p_h) = -h M^{-1} sum S_m (a_m(x_lam), b_m(x_lam))``."""
    S = spin_expectations(u)
    g = system.grid
    q = -system.h * g.apply_M_inv(np.einsum("lm,lmnc->nc", S, system.a_cpl))
    p = -system.h * g.apply_M_inv(np.einsum("lm,lmnc->nc", S, system.b_cpl))
    return np.stack([q, p])


@dataclass
class FixedPointVerdict:
    is_fixed: bool
    residual: float
    eigenvalue: float
    X: np.ndarray


def is_fixed_point(system: System, u, tol: float = 1e-8) -> FixedPointVerdict:
    """Eigenvector residual ``|T u - <T u, u> u|`` of ``T(q_h(u), p_h(u))``."""
    u = np.asarray(u, dtype=complex)
    u = u / np.linalg.norm(u)
    X = fixed_point_fields(system, u)
    Tu = apply_T_coeffs(system.coefficients(X), u)
    mu = np.vdot(u, Tu).real
    res = float(np.linalg.norm(Tu - mu * u))
    return FixedPointVerdict(res <= tol, res, mu, X)


def coupling_matrix(space: ModeSpace, config: SpinConfig, lam, mu, m, n, method="inner"):
    """``C_mn^{[lam, mu]} = a_m(x_lam).M^{-1} a_n(x_mu) + b_m(x_lam).M^{-1} b_n(x_mu)``.

    ``method="quadrature"`` evaluates the equivalent k-space integral
    directly from the cutoff and the geometry.
    """
    xl, xm = config.positions[lam], config.positions[mu]
    if method == "inner":
        g = space.grid
        term = (
            g.inner(space.coupling_a(xl, m), g.apply_M_inv(space.coupling_a(xm, n)))
            + g.inner(space.coupling_b(xl, m), g.apply_M_inv(space.coupling_b(xm, n)))
        )
        return float(term)
    if method == "quadrature":
        e = np.eye(3)
        return float(space.coupling_integral(xl - xm, e[m], e[n]))
    raise ValueError(f"unknown method {method!r}")


def coupling_tensor(space: ModeSpace, config: SpinConfig, method="inner") -> np.ndarray:
    """All ``C_mn^{[lam, mu]}`` as an array indexed ``[lam, m, mu, n]``."""
    N = config.N
    if method == "inner":
        a = space.coupling_a(config.positions).reshape(N * 3, -1)
        b = space.coupling_b(config.positions).reshape(N * 3, -1)
        w = np.repeat(space.grid.weights / space.grid.radii, 2)
        return ((a * w) @ a.T + (b * w) @ b.T).reshape(N, 3, N, 3)
    out = np.empty((N, 3, N, 3))
    for lam, mu in itertools.product(range(N), repeat=2):
        for m, n in itertools.product(range(3), repeat=2):
            out[lam, m, mu, n] = coupling_matrix(space, config, lam, mu, m, n, "quadrature")
    return out


def beta_coupling(space: ModeSpace, config: SpinConfig) -> np.ndarray:
    """``C^{[lam, mu]}`` along ``beta_hat`` (the ``C_33`` block when beta is along z)."""
    bhat = config.beta / config.beta_norm
    N = config.N
    out = np.empty((N, N))
    for lam, mu in itertools.product(range(N), repeat=2):
        d = config.positions[lam] - config.positions[mu]
        out[lam, mu] = space.coupling_integral(d, bhat, bhat)
    return out


def _require_coplanar(config: SpinConfig):
    if not config.is_coplanar():
        raise ValueError("particles are not coplanar in a plane orthogonal to beta")


def signs(E, N: int) -> np.ndarray:
    """``eps_lam = +1`` for ``lam`` in ``E``, else ``-1``."""
    E = set(E)
    return np.array([1.0 if lam in E else -1.0 for lam in range(N)])


@dataclass
class FixedPointEnergy:
    formula: float
    direct: float
    linear: float
    quadratic: float

    @property
    def rel_diff(self) -> float:
        return abs(self.formula - self.direct) / max(abs(self.direct), 1e-300)


def fixed_point_energy(system: System, E) -> FixedPointEnergy:
    """``h|beta| sum eps - (h^2/2) sum C^{[lam,mu]} eps eps`` against ``H(q_h, p_h, a_E)``."""
    cfg = system.config
    _require_coplanar(cfg)
    eps = signs(E, cfg.N)
    C = beta_coupling(system.space, cfg)
    lin = system.h * cfg.beta_norm * eps.sum()
    quad = -0.5 * system.h**2 * eps @ C @ eps
    u = basis_state(E, cfg.beta, cfg.N)
    direct = hamiltonian(system, fixed_point_fields(system, u), u)
    return FixedPointEnergy(lin + quad, direct, lin, quad)


def ising_kernel(x) -> float:
    """Limit ``-(d_1^2 + d_2^2) 1/(4 pi |x|)``; equals ``-1/(4 pi |x|^3)`` for ``x_3 = 0``."""
    x = np.asarray(x, float)
    r = np.linalg.norm(x)
    return float(-(r**2 - 3 * x[2] ** 2) / (4 * np.pi * r**5))


def ising_space(eps: float, radial_order: int = 64, angular_order: int = 72) -> ModeSpace:
    """Mode space for ``chi_eps(r) = phi(r eps)`` with the radial support fully resolved."""
    if radial_order < 64:
        raise ValueError("the Ising study needs at least 64 radial nodes")
    chi = CutoffProfile("plateau", eps=eps)
    grid = build_grid(radial_order, angular_order, 0.0, 1.0 / eps)
    return ModeSpace(grid, chi)


@dataclass
class IsingReport:
    """Per ``eps``: pair kernels, self term and subset energies."""

    rows: list = field(default_factory=list)
    self_terms: dict = field(default_factory=dict)
    energies: dict = field(default_factory=dict)

    def errors(self, pair=(0, 1)) -> np.ndarray:
        return np.array([r["abs_err"] for r in self.rows if r["pair"] == pair])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "pair", "F_eps", "limit_kernel", "abs_err"])
            for r in self.rows:
                pair = f"{r['pair'][0]}-{r['pair'][1]}"
                w.writerow([f"{r['eps']:.17g}", pair, f"{r['F_eps']:.17g}",
                            f"{r['limit_kernel']:.17g}", f"{r['abs_err']:.17g}"])


def ising_limit_study(
    config: SpinConfig,
    eps_list,
    h: float = 1.0,
    radial_order: int = 64,
    angular_order: int = 72,
) -> IsingReport:
    """Fixed-point interaction energies under ``chi_eps`` against the dipolar limit.

    ``F_eps(x) = (2 pi)^{-3} int chi_eps^2 cos(k.x) (k_1^2 + k_2^2)/|k|^2 dk``
    in the frame where ``beta`` is along ``z``.  The self term
    ``C_eps = sum_lam C^{[lam,lam]}`` does not depend on ``E``.
    """
    _require_coplanar(config)
    aligned, _ = config.aligned()
    N = aligned.N
    rep = IsingReport()
    for eps in eps_list:
        space = ising_space(eps, radial_order, angular_order)
        C = beta_coupling(space, aligned)
        for lam, mu in itertools.combinations(range(N), 2):
            d = aligned.positions[lam] - aligned.positions[mu]
            lim = ising_kernel(d)
            rep.rows.append(
                dict(eps=eps, pair=(lam, mu), F_eps=C[lam, mu], limit_kernel=lim,
                     abs_err=abs(C[lam, mu] - lim))
            )
        off = C - np.diag(np.diag(C))
        subset_energies = {}
        for k in range(N + 1):
            for E in itertools.combinations(range(N), k):
                e = signs(E, N)
                full = h * aligned.beta_norm * e.sum() - 0.5 * h**2 * e @ C @ e
                self_part = -0.5 * h**2 * np.sum(np.diag(C) * e**2)
                inter = -0.5 * h**2 * e @ off @ e
                lim = 0.0
                for lam, mu in itertools.permutations(range(N), 2):
                    r = np.linalg.norm(aligned.positions[lam] - aligned.positions[mu])
                    lim += h**2 * e[lam] * e[mu] / (8 * np.pi * r**3)
                subset_energies[E] = dict(total=full, self=self_part, interaction=inter, limit=lim)
        rep.self_terms[eps] = -0.5 * h**2 * float(np.trace(C))
        rep.energies[eps] = subset_energies
    return rep
