"""Quasimode recursion on a truncated, discretized Fock space.

Modes are (grid node, polarization) pairs with amplitudes carrying the
square root of the quadrature weight, so the discrete Fock inner product is
the plain sum and creation/annihilation stay canonical.  A Fock vector is a
flat complex array indexed ``f * 2**N + e``: ``f`` enumerates occupation
multisets with total occupation at most ``max_sector`` in graded
lexicographic order, ``e`` enumerates the spin basis ``a_E`` (bit ``N-1-lam``
of ``e`` set iff particle ``lam`` is in ``E``).

The rescaled Hamiltonian is ``K(h) = h K_1 + h^{3/2} K_32`` with
``K_1 = dGamma(M) + T_0`` diagonal and ``K_32 = sum Phi_S(a_m + i b_m) x sigma_m``,
``Phi_S(g) = (a^*(g) + a(g)) / sqrt 2``.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from .mode_space import ModeSpace
from .spin_algebra import PAULI, MAX_PARTICLES, SpinConfig, eigvecs_along

SQRT2 = np.sqrt(2.0)


class FockBasis:
    """Occupation multisets of ``n_modes`` modes with total occupation ``<= max_sector``."""

    def __init__(self, n_modes: int, max_sector: int):
        if n_modes < 1 or max_sector < 0:
            raise ValueError("need n_modes >= 1 and max_sector >= 0")
        self.n_modes = n_modes
        self.max_sector = max_sector
        self.sectors = [self._enumerate(s) for s in range(max_sector + 1)]
        sizes = [len(s) for s in self.sectors]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self._index = [
            {st: i for i, st in enumerate(states)} for states in self.sectors
        ]

    def _enumerate(self, s):
        return list(itertools.combinations_with_replacement(range(self.n_modes), s))

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def sector_slice(self, s) -> slice:
        return slice(int(self.offsets[s]), int(self.offsets[s + 1]))

    @cached_property
    def sector_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.max_sector + 1), np.diff(self.offsets))

    def index(self, state) -> int:
        """Global index of a sorted occupation multiset."""
        s = len(state)
        return int(self.offsets[s]) + self._index[s][tuple(state)]

    def counts(self, i: int) -> np.ndarray:
        s = int(self.sector_of[i])
        return np.bincount(
            np.array(self.sectors[s][i - int(self.offsets[s])], dtype=int),
            minlength=self.n_modes,
        )

    def energies(self, omega) -> np.ndarray:
        """``sum_i n_i omega_i`` for every basis element."""
        omega = np.asarray(omega)
        out = [np.zeros(1)]
        for s in range(1, self.max_sector + 1):
            out.append(omega[np.array(self.sectors[s], dtype=int)].sum(axis=1))
        return np.concatenate(out)

    def creation_triples(self, s: int, target_index=None):
        """``(target, source, mode, sqrt(n_mode + 1))`` for ``a^*_mode`` from sector ``s``.

        Sources are global indices; targets are global unless ``target_index``
        maps a multiset of size ``s + 1`` to some other enumeration.
        """
        if target_index is None:
            target_index = self.index
        tgt, src, mode, amp = [], [], [], []
        base = int(self.offsets[s])
        for i, st in enumerate(self.sectors[s]):
            for j in range(self.n_modes):
                new = list(st)
                bisect.insort(new, j)
                tgt.append(target_index(tuple(new)))
                src.append(base + i)
                mode.append(j)
                amp.append(np.sqrt(new.count(j)))
        return (np.array(tgt, dtype=np.int64), np.array(src, dtype=np.int64),
                np.array(mode, dtype=np.int64), np.array(amp))


def mode_scores(space: ModeSpace, config: SpinConfig) -> np.ndarray:
    """Coupling strength ``sum_{m,lam} w |a_m(x_lam) + i b_m(x_lam)|^2`` per (node, polarization)."""
    a = space.coupling_a(config.positions).reshape(config.N, 3, space.grid.n, 2)
    b = space.coupling_b(config.positions).reshape(config.N, 3, space.grid.n, 2)
    return np.sum(np.abs(a + 1j * b) ** 2, axis=(0, 1)) * space.grid.weights[:, None]


def select_modes(space: ModeSpace, config: SpinConfig, D: int | None = None) -> np.ndarray:
    """The ``D`` most strongly coupled (node, polarization) pairs, or all of them."""
    scores = mode_scores(space, config).ravel()
    if D is None:
        order = np.arange(scores.size)
    else:
        if not 1 <= D <= scores.size:
            raise ValueError(f"D must lie in [1, {scores.size}], got {D}")
        order = np.argsort(-scores, kind="stable")[:D]
    return np.stack(np.divmod(order, 2), axis=1)


def _embed(op, lam, N):
    return np.kron(np.kron(np.eye(2**lam), op), np.eye(2 ** (N - lam - 1)))


@dataclass(eq=False)
class QuasimodeModel:
    """Truncated Fock space tensored with spins, with ``K_1`` and ``K_32`` assembled."""

    space: ModeSpace
    config: SpinConfig
    modes: np.ndarray
    max_sector: int = 3

    def __post_init__(self):
        self.modes = np.asarray(self.modes, dtype=int).reshape(-1, 2)
        if self.config.N < 1:
            raise ValueError("need at least one particle")
        if self.config.N > MAX_PARTICLES:
            raise ValueError(f"N={self.config.N} exceeds the cap of {MAX_PARTICLES}")
        if self.config.beta_norm == 0:
            raise ValueError("beta must be nonzero")
        self.basis = FockBasis(len(self.modes), self.max_sector)

    @classmethod
    def build(cls, space, config, D=None, max_sector=3):
        return cls(space, config, select_modes(space, config, D), max_sector)

    @property
    def N(self) -> int:
        return self.config.N

    @property
    def D(self) -> int:
        return len(self.modes)

    @property
    def n_spin(self) -> int:
        return 2**self.N

    @property
    def dim(self) -> int:
        return self.basis.size * self.n_spin

    @property
    def lambda1(self) -> float:
        return -self.N * self.config.beta_norm

    @cached_property
    def omega(self) -> np.ndarray:
        return self.space.grid.radii[self.modes[:, 0]]

    def mode_amplitudes(self, coupling) -> np.ndarray:
        """``sqrt(w_i) * c[..., node_i, pol_i]`` for a coupling array ``(..., n, 2)``."""
        w = np.sqrt(self.space.grid.weights[self.modes[:, 0]])
        return coupling[..., self.modes[:, 0], self.modes[:, 1]] * w

    @cached_property
    def g(self) -> np.ndarray:
        """``g[lam, m, j]`` for ``a_m(x_lam) + i b_m(x_lam)``."""
        pos = self.config.positions
        return self.mode_amplitudes(self.space.coupling_a(pos) + 1j * self.space.coupling_b(pos))

    @cached_property
    def spin_paulis(self) -> np.ndarray:
        """``sigma_m^{[lam]}`` in the ``a_E`` basis, shape ``(N, 3, 2^N, 2^N)``."""
        b0, b1 = eigvecs_along(self.config.beta)
        V = np.stack([b0, b1], axis=1)
        local = np.einsum("xa,mxy,yb->mab", V.conj(), PAULI, V)
        return np.array([[_embed(local[m], lam, self.N) for m in range(3)] for lam in range(self.N)])

    @cached_property
    def spin_couplings(self) -> np.ndarray:
        """``A_j = sum_{lam,m} g[lam,m,j] sigma_m^{[lam]}``, shape ``(D, 2^N, 2^N)``."""
        return np.einsum("lmj,lmab->jab", self.g, self.spin_paulis)

    @cached_property
    def spin_energies(self) -> np.ndarray:
        pop = np.array([bin(e).count("1") for e in range(self.n_spin)])
        return (2 * pop - self.N) * self.config.beta_norm

    @cached_property
    def k1_diagonal(self) -> np.ndarray:
        fock = self.basis.energies(self.omega)
        return (fock[:, None] + self.spin_energies[None, :]).ravel()

    def _creation_matrix(self, triples, n_rows, A):
        tgt, src, mode, amp = triples
        ns = self.n_spin
        a, b = np.meshgrid(np.arange(ns), np.arange(ns), indexing="ij")
        rows = (tgt[:, None, None] * ns + a).ravel()
        cols = (src[:, None, None] * ns + b).ravel()
        data = (amp[:, None, None] * A[mode]).ravel() / SQRT2
        return sparse.csr_matrix((data, (rows, cols)), shape=(n_rows, self.dim))

    @cached_property
    def _triples(self):
        parts = [self.basis.creation_triples(s) for s in range(self.max_sector)]
        if not parts:
            return tuple(np.zeros(0, dtype=np.int64) for _ in range(3)) + (np.zeros(0),)
        return tuple(np.concatenate(x) for x in zip(*parts))

    @cached_property
    def k32(self) -> sparse.csr_matrix:
        """In-range part of ``K_32`` as a sparse hermitian matrix."""
        C = self._creation_matrix(self._triples, self.dim, self.spin_couplings)
        return (C + C.conj().T).tocsr()

    @cached_property
    def _overflow(self):
        S = self.max_sector
        states = list(itertools.combinations_with_replacement(range(self.D), S + 1))
        index = {st: i for i, st in enumerate(states)}
        triples = self.basis.creation_triples(S, target_index=index.__getitem__)
        return self._creation_matrix(triples, len(states) * self.n_spin, self.spin_couplings)

    # -- operators ------------------------------------------------------------

    def vacuum(self) -> np.ndarray:
        """``u_0``: no photons, every spin in ``b_0``."""
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def sector_mask(self, s) -> np.ndarray:
        return np.repeat(self.basis.sector_of == s, self.n_spin)

    def apply_K1(self, v):
        return self.k1_diagonal * v

    def apply_K32(self, v, return_overflow: bool = False):
        """``K_32 v``; the component beyond ``max_sector`` is returned separately on request."""
        out = self.k32 @ v
        if not return_overflow:
            return out
        top = self.sector_mask(self.max_sector)
        if not np.any(v[top]):
            return out, np.zeros(0, dtype=complex)
        return out, self._overflow @ v

    def resolvent_solve(self, f):
        """Solve ``(K_1 - lambda_1) u = f - <f, u_0> u_0`` with ``u`` orthogonal to ``u_0``."""
        den = self.k1_diagonal - self.lambda1
        out = np.zeros_like(np.asarray(f, dtype=complex))
        nz = np.arange(self.dim) != 0
        out[nz] = f[nz] / den[nz]
        return out

    def field_operator(self, x, kernel="B"):
        """Sparse ``Phi_S(g_m(x)) x I`` for ``m = 0, 1, 2`` (in-range part).

        ``kernel="B"`` uses ``a_m(x) + i b_m(x)``; ``"E"`` uses ``alpha_m + i beta_m``.
        """
        if kernel == "B":
            c = self.space.coupling_a(x) + 1j * self.space.coupling_b(x)
        elif kernel == "E":
            c = self.space.coupling_alpha(x) + 1j * self.space.coupling_beta(x)
        else:
            raise ValueError(f"kernel must be 'B' or 'E', got {kernel!r}")
        gm = self.mode_amplitudes(c)
        eye = np.eye(self.n_spin)
        out = []
        for m in range(3):
            C = self._creation_matrix(self._triples, self.dim, gm[m][:, None, None] * eye)
            out.append((C + C.conj().T).tocsr())
        return out


@dataclass
class QuasimodeSeries:
    """``u[j]`` for ``j <= 2 p_max + 1`` and ``lam[j]`` for ``1 <= j <= p_max + 2``."""

    model: QuasimodeModel
    p_max: int
    u: list
    lam: dict
    sources: list = field(default_factory=list)

    def trial(self, h: float, order: int) -> np.ndarray:
        return sum(h ** (j / 2) * self.u[j] for j in range(order + 1))

    def energy(self, h: float, p: int) -> float:
        return sum(self.lam[j] * h**j for j in range(1, p + 2))

    def recursion_residuals(self) -> list[float]:
        """``|(K_1 - lambda_1) u_j - f_j - c_j u_0|`` for ``j >= 1``, ``c_j`` the eigenvalue term."""
        m = self.model
        u0 = self.u[0]
        out = []
        for j in range(1, len(self.u)):
            lhs = m.apply_K1(self.u[j]) - m.lambda1 * self.u[j]
            f = self.sources[j]
            c = self.lam.get(j // 2 + 1, 0.0) if j % 2 == 0 else 0.0
            out.append(float(np.linalg.norm(lhs - f - c * u0)))
        return out


def _source(model, u, lam, n):
    """``-K_32 u_{n-1} + sum_{j>=2} lambda_j u_{n-2j+2}`` over available lower orders."""
    f = -model.apply_K32(u[n - 1])
    for j in range(2, (n + 1) // 2 + 1):
        f = f + lam[j] * u[n - 2 * j + 2]
    return f


def quasimode_series(model: QuasimodeModel, p_max: int) -> QuasimodeSeries:
    """Run the recursion up to ``u_{2 p_max + 1}`` and ``lambda_{p_max + 2}``.

    ``u_j`` occupies sectors ``<= j``, so ``max_sector >= 2 p_max + 1`` keeps
    every ``K_32 u_{j-1}`` inside the truncation.
    """
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    if model.max_sector < 2 * p_max + 1:
        raise ValueError(
            f"max_sector={model.max_sector} is too small for p_max={p_max}; "
            f"need at least {2 * p_max + 1}"
        )
    u0 = model.vacuum()
    u, lam, sources = [u0], {1: model.lambda1}, [np.zeros_like(u0)]
    for n in range(1, 2 * p_max + 2):
        f = _source(model, u, lam, n)
        if n % 2 == 0:
            lam[n // 2 + 1] = _real(-np.vdot(u0, f))
        sources.append(f)
        u.append(model.resolvent_solve(f))
    f = _source(model, u, lam, 2 * p_max + 2)
    lam[p_max + 2] = _real(-np.vdot(u0, f))
    return QuasimodeSeries(model, p_max, u, lam, sources)


def _real(z, tol=1e-10):
    if abs(z.imag) > tol * max(1.0, abs(z.real)):
        raise ArithmeticError(f"eigenvalue coefficient has imaginary part {z.imag:.3e}")
    return float(z.real)


def residual_norm(series: QuasimodeSeries, p: int, h: float, terms: str = "even") -> float:
    """``|(K(h) - sum_{j<=p+1} lambda_j h^j) sum_{j<=J} h^{j/2} u_j|`` with overflow.

    ``terms="even"`` takes ``J = 2p`` (residual of order ``h^{p+3/2}``),
    ``terms="odd"`` takes ``J = 2p + 1`` (order ``h^{p+2}``).
    """
    J = {"even": 2 * p, "odd": 2 * p + 1}.get(terms)
    if J is None:
        raise ValueError("terms must be 'even' or 'odd'")
    if J >= len(series.u) or p + 1 not in series.lam:
        raise ValueError(f"series computed to p_max={series.p_max} is too short for p={p}")
    m = series.model
    U = series.trial(h, J)
    K32U, over = m.apply_K32(U, return_overflow=True)
    r = h * m.apply_K1(U) + h**1.5 * K32U - series.energy(h, p) * U
    return float(np.sqrt(np.linalg.norm(r) ** 2 + h**3 * np.linalg.norm(over) ** 2))


def exact_operator_oracle(model: QuasimodeModel, h: float, max_dim: int = 4096) -> np.ndarray:
    """Dense ``K(h)`` assembled from occupation-count vectors and explicit Kronecker products.

    Independent of the sparse assembly: states are enumerated as count
    vectors and spin operators are built in the standard basis before the
    change to ``a_E``.
    """
    if model.dim > max_dim:
        raise MemoryError(f"dense oracle dimension {model.dim} exceeds the guard {max_dim}")
    D, S, N = model.D, model.max_sector, model.N
    counts = [c for c in itertools.product(range(S + 1), repeat=D) if sum(c) <= S]
    where = {}
    for c in counts:
        ms = tuple(j for j in range(D) for _ in range(c[j]))
        where[c] = model.basis.index(ms)
    b0, b1 = eigvecs_along(model.config.beta)
    V1 = np.stack([b0, b1], axis=1)
    V = np.ones((1, 1))
    for _ in range(N):
        V = np.kron(V, V1)
    sig = np.zeros((N, 3, 2**N, 2**N), dtype=complex)
    for lam in range(N):
        for m in range(3):
            full = np.ones((1, 1))
            for mu in range(N):
                full = np.kron(full, PAULI[m] if mu == lam else np.eye(2))
            sig[lam, m] = V.conj().T @ full @ V
    ns = 2**N
    K = np.zeros((model.dim, model.dim), dtype=complex)
    omega = model.omega
    beta = model.config.beta_norm
    for c in counts:
        i = where[c]
        photons = float(np.dot(c, omega))
        for e in range(ns):
            nE = bin(e).count("1")
            K[i * ns + e, i * ns + e] += h * (photons + (2 * nE - N) * beta)
        if sum(c) == S:
            continue
        for j in range(D):
            c2 = list(c)
            c2[j] += 1
            k = where[tuple(c2)]
            amp = np.sqrt(c2[j]) / SQRT2
            A = np.zeros((ns, ns), dtype=complex)
            for lam in range(N):
                for m in range(3):
                    A += model.g[lam, m, j] * sig[lam, m]
            blk = h**1.5 * amp * A
            K[k * ns : (k + 1) * ns, i * ns : (i + 1) * ns] += blk
            K[i * ns : (i + 1) * ns, k * ns : (k + 1) * ns] += blk.conj().T
    return K


@dataclass
class FirstOrderField:
    """Field at ``x`` from ``u_0 + h^{1/2} u_1``, by the Fock form and by quadrature."""

    x: np.ndarray
    fock: np.ndarray
    quadrature: np.ndarray
    electric: np.ndarray


def first_order_quadrature(space: ModeSpace, config: SpinConfig, x, h: float = 1.0):
    """``h sum_lam (2 pi)^{-3} int chi^2 cos(k.(x - x_lam)) (k^ x e_m).(k^ x beta^)``."""
    bhat = config.beta / config.beta_norm
    x = np.asarray(x, float)
    out = np.zeros(x.shape[:-1] + (3,))
    for xl in config.positions:
        for m in range(3):
            out[..., m] += space.coupling_integral(x - xl, np.eye(3)[m], bhat)
    return h * out


def first_order_field(series: QuasimodeSeries, x, h: float = 1.0) -> FirstOrderField:
    """Expectations of ``h^{1/2} Phi_S(g_m(x))`` in ``u_0 + h^{1/2} u_1``.

    The field operators carry ``h^{1/2}`` in the rescaled representation;
    both the magnetic and the electric forms are returned together with the
    direct quadrature of the magnetic one.
    """
    m = series.model
    x = np.asarray(x, float)
    U = series.trial(h, 1)
    B = np.array([np.sqrt(h) * np.vdot(U, op @ U).real for op in m.field_operator(x, "B")])
    E = np.array([np.sqrt(h) * np.vdot(U, op @ U).real for op in m.field_operator(x, "E")])
    return FirstOrderField(x, B, first_order_quadrature(m.space, m.config, x, h), E)


def lambda2_closed_form(space: ModeSpace, config: SpinConfig) -> float:
    """``-N C - (1/2) sum_{lam,mu} C^{[lam,mu]}`` along ``beta_hat``.

    ``C`` is the single-site coupling transverse to ``beta`` with the
    spin-flip denominator ``|k| + 2|beta|``.  The factor ``1/2`` is the
    square of the Segal normalization ``1/sqrt 2``.
    """
    bhat = config.beta / config.beta_norm
    perp = np.cross(bhat, [1.0, 0.0, 0.0])
    if np.linalg.norm(perp) < 1e-8:
        perp = np.cross(bhat, [0.0, 1.0, 0.0])
    perp /= np.linalg.norm(perp)
    two_b = 2.0 * config.beta_norm
    C = space.coupling_integral(np.zeros(3), perp, perp, denominator=lambda r: r + two_b)
    C33 = 0.0
    for xl in config.positions:
        for xm in config.positions:
            C33 += space.coupling_integral(xl - xm, bhat, bhat)
    return float(-config.N * C - 0.5 * C33)
