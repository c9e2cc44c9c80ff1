"""Spin sector: Pauli operators on ``(C^2)^{\\otimes N}`` without dense matrices.

Spin states are complex arrays of length ``2**N``; particle ``lam`` (0-based)
is the ``lam``-th Kronecker factor counted from the left.  Axes are 0-based
(``sigma_x, sigma_y, sigma_z`` are ``m = 0, 1, 2``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_PARTICLES = 12

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def n_particles(a) -> int:
    n = int(np.log2(len(a)))
    if 2**n != len(a):
        raise ValueError(f"state length {len(a)} is not a power of two")
    return n


def apply_single(op, lam: int, a):
    """Apply a 2x2 matrix to particle ``lam`` of the state ``a``."""
    a = np.asarray(a, dtype=complex)
    N = n_particles(a)
    if not 0 <= lam < N:
        raise IndexError(f"particle index {lam} out of range for N={N}")
    v = a.reshape(2**lam, 2, 2 ** (N - lam - 1))
    return np.einsum("xy,iyj->ixj", op, v).reshape(-1)


def apply_sigma(m: int, lam: int, a):
    if not 0 <= m < 3:
        raise IndexError(f"axis {m} out of range")
    return apply_single(PAULI[m], lam, a)


def reduced_density(a) -> np.ndarray:
    """One-particle reduced density matrices, shape ``(N, 2, 2)``."""
    a = np.asarray(a, dtype=complex)
    N = n_particles(a)
    out = np.empty((N, 2, 2), dtype=complex)
    for lam in range(N):
        v = a.reshape(2**lam, 2, -1)
        out[lam] = np.einsum("ixj,iyj->xy", v, v.conj())
    return out


def spin_expectations(a) -> np.ndarray:
    """``S[lam, m] = <sigma_m^{[lam]} a, a>`` as a real ``(N, 3)`` array."""
    rd = reduced_density(a)
    return np.einsum("lxy,myx->lm", rd, PAULI).real


def apply_T_coeffs(c, a):
    """Apply ``sum_lam sum_m c[lam, m] sigma_m^{[lam]}`` to ``a``."""
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(np.asarray(a, dtype=complex))
    for lam in range(c.shape[0]):
        out += apply_single(np.einsum("m,mxy->xy", c[lam], PAULI), lam, a)
    return out


def single_exponentials(c, t: float) -> np.ndarray:
    """``exp(-i t c.sigma)`` for each row of ``c`` (closed form, shape ``(N, 2, 2)``)."""
    c = np.asarray(c, dtype=float)
    nrm = np.linalg.norm(c, axis=1)
    safe = np.where(nrm > 0, nrm, 1.0)
    nhat = c / safe[:, None]
    ns = np.einsum("lm,mxy->lxy", nhat, PAULI)
    return np.cos(nrm * t)[:, None, None] * np.eye(2) - 1j * np.sin(nrm * t)[:, None, None] * ns


def propagate_frozen(c, a, t: float):
    """Exact ``exp(-i t T) a`` for ``T = sum c[lam].sigma^{[lam]}``.

    The single-particle terms commute, so the exponential is a Kronecker
    product of 2x2 rotations.
    """
    out = np.asarray(a, dtype=complex)
    for lam, u in enumerate(single_exponentials(c, t)):
        out = apply_single(u, lam, out)
    return out


def eigvecs_along(beta) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors ``(b0, b1)`` with ``beta.sigma b0 = -|beta| b0`` and ``+|beta| b1``.

    Phase convention: the first nonzero component is real and positive.
    """
    beta = np.asarray(beta, dtype=float)
    if not np.any(beta):
        raise ValueError("beta must be nonzero")
    w, v = np.linalg.eigh(np.einsum("m,mxy->xy", beta, PAULI))
    out = []
    for col in v.T:
        k = np.flatnonzero(np.abs(col) > 1e-14)[0]
        out.append(col * np.exp(-1j * np.angle(col[k])))
    return out[0], out[1]


def basis_state(E, beta, N: int):
    """Product state ``a_E``: particles in ``E`` carry ``b1``, the others ``b0``."""
    E = set(E)
    if N > MAX_PARTICLES:
        raise ValueError(f"N={N} exceeds the cap of {MAX_PARTICLES} particles")
    if any(not 0 <= lam < N for lam in E):
        raise IndexError(f"subset {sorted(E)} out of range for N={N}")
    b0, b1 = eigvecs_along(beta)
    out = np.ones(1, dtype=complex)
    for lam in range(N):
        out = np.kron(out, b1 if lam in E else b0)
    return out


def product_state(directions):
    """Product of single-spin states whose Bloch vectors are ``directions``."""
    out = np.ones(1, dtype=complex)
    for d in np.atleast_2d(directions):
        d = np.asarray(d, float) / np.linalg.norm(d)
        theta = np.arccos(np.clip(d[2], -1, 1))
        phi = np.arctan2(d[1], d[0])
        out = np.kron(out, [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    return out


def rotation_to_z(v) -> np.ndarray:
    """Proper rotation ``R`` with ``R @ v`` along ``+z``."""
    v = np.asarray(v, float)
    n = v / np.linalg.norm(v)
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(n, z)
    s, c = np.linalg.norm(axis), n @ z
    if s < 1e-14:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * K @ K


@dataclass(frozen=True, eq=False)
class SpinConfig:
    """Fixed particle positions ``(N, 3)`` and the constant field ``beta``."""

    positions: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.size == 0:
            pos = pos.reshape(0, 3)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        if pos.shape[1:] != (3,):
            raise ValueError("positions must have shape (N, 3)")
        if self.beta.shape != (3,):
            raise ValueError("beta must be a 3-vector")
        if len(pos) > MAX_PARTICLES:
            raise ValueError(f"N={len(pos)} exceeds the cap of {MAX_PARTICLES}")

    @property
    def N(self) -> int:
        return len(self.positions)

    @property
    def beta_norm(self) -> float:
        return float(np.linalg.norm(self.beta))

    def is_coplanar(self, rtol: float = 1e-10) -> bool:
        """Whether all particles lie in one plane orthogonal to ``beta``."""
        if self.N < 2:
            return True
        bhat = self.beta / self.beta_norm
        h = (self.positions - self.positions[0]) @ bhat
        diam = max(np.ptp(self.positions, axis=0).max(), 1.0)
        return bool(np.max(np.abs(h)) <= rtol * diam)

    def aligned(self) -> tuple["SpinConfig", np.ndarray]:
        """Rigidly rotated copy with ``beta = (0, 0, |beta|)``, plus the rotation."""
        R = rotation_to_z(self.beta)
        return SpinConfig(self.positions @ R.T, np.array([0.0, 0.0, self.beta_norm])), R
