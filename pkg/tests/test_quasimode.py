import itertools

import numpy as np
import pytest
from scipy import sparse

from conftest import c33_diagonal_oracle
from spinphoton.mode_space import ModeSpace, build_grid_for
from spinphoton.observables import curl, divergence
from spinphoton.quasimode import (
    FockBasis,
    QuasimodeModel,
    exact_operator_oracle,
    first_order_field,
    first_order_quadrature,
    lambda2_closed_form,
    quasimode_series,
    residual_norm,
    select_modes,
)
from spinphoton.spin_algebra import PAULI, SpinConfig, eigvecs_along
from spinphoton.stationary import beta_coupling

ZHAT = np.array([0.0, 0.0, 1.0])
ONE = SpinConfig([[0.0, 0.0, 0.0]], ZHAT)
TWO = SpinConfig([[0.4, 0.0, 0.0], [-0.4, 0.1, 0.0]], [0.0, 0.0, 1.5])

# lambda_2 for one particle, |beta| = 1 and the default cutoff, from the 1-D
# radial quadrature of the closed form (C33 = 0.0028360492860468266,
# C = 0.0012396922172839232).
LAMBDA2_REFERENCE = -0.0026577168603073367


@pytest.fixture(scope="module")
def model_two(space):
    return QuasimodeModel.build(space, TWO, D=6, max_sector=3)


# -- Fock basis ---------------------------------------------------------------------


def test_fock_basis_enumeration():
    fb = FockBasis(3, 2)
    assert fb.size == 1 + 3 + 6
    assert [fb.index(s) for s in [(), (0,), (2,), (0, 0), (2, 2)]] == [0, 1, 3, 4, 9]
    assert np.array_equal(fb.counts(fb.index((0, 2))), [1, 0, 1])
    assert np.allclose(fb.energies([1.0, 2.0, 5.0])[fb.index((1, 2))], 7.0)
    assert list(fb.sector_of) == [0, 1, 1, 1, 2, 2, 2, 2, 2, 2]
    with pytest.raises(ValueError):
        FockBasis(0, 2)


def test_mode_selection(space):
    modes = select_modes(space, TWO, D=5)
    assert modes.shape == (5, 2) and len({tuple(m) for m in modes}) == 5
    assert select_modes(space, TWO).shape == (2 * space.grid.n, 2)
    with pytest.raises(ValueError):
        select_modes(space, TWO, D=0)


# -- K_1, K_32 and the resolvent ------------------------------------------------------------


def test_k1_eigenvalues(model_two):
    m = model_two
    d = m.k1_diagonal.reshape(-1, m.n_spin)
    beta = TWO.beta_norm
    assert m.lambda1 == pytest.approx(-3.0)
    assert d[0, 0] == pytest.approx(-2 * beta)
    for e in range(4):
        assert d[0, e] == pytest.approx((2 * bin(e).count("1") - 2) * beta)
    i = m.basis.index((2,))
    assert d[i, 0] == pytest.approx(m.omega[2] - 2 * beta)


def test_k32_parity_and_hermiticity(model_two, rng):
    m = model_two
    even = np.zeros(m.dim, bool)
    for s in (0, 2):
        even |= m.sector_mask(s)
    v = (rng.standard_normal(m.dim) + 1j * rng.standard_normal(m.dim)) * even
    assert np.all(m.apply_K32(v)[even] == 0)
    for _ in range(5):
        u = rng.standard_normal(m.dim) + 1j * rng.standard_normal(m.dim)
        w = rng.standard_normal(m.dim) + 1j * rng.standard_normal(m.dim)
        assert np.vdot(m.apply_K32(u), w) == pytest.approx(np.vdot(u, m.apply_K32(w)), rel=1e-12)


def test_overflow_is_returned_separately(model_two):
    m = model_two
    v = np.zeros(m.dim, complex)
    v[m.basis.index((0, 0, 0)) * m.n_spin] = 1.0
    out, over = m.apply_K32(v, return_overflow=True)
    assert np.linalg.norm(over) > 0
    low = np.zeros(m.dim, complex)
    low[m.basis.index((1,)) * m.n_spin + 2] = 1.0
    assert m.apply_K32(low, return_overflow=True)[1].size == 0


def ladder_oracle(model):
    """Dense ``K_1`` and ``K_32`` from per-mode ladder matrices, restricted to ``sum n <= S``."""
    D, S, N = model.D, model.max_sector, model.N
    ns = 2**N
    b0, b1 = eigvecs_along(model.config.beta)
    V = np.ones((1, 1))
    for _ in range(N):
        V = np.kron(V, np.stack([b0, b1], axis=1))
    lower = np.diag(np.sqrt(np.arange(1, S + 1)), 1)
    eye = np.eye(S + 1)
    ann = []
    for j in range(D):
        ann.append(
            np.kron(np.kron(np.eye((S + 1) ** j), lower), np.eye((S + 1) ** (D - j - 1)))
        )
    number = [a.T @ a for a in ann]
    K32 = 0
    for lam, mm in itertools.product(range(N), range(3)):
        g = model.g[lam, mm]
        phi = sum(g[j] * ann[j].T + np.conj(g[j]) * ann[j] for j in range(D)) / np.sqrt(2)
        sig = np.ones((1, 1))
        for mu in range(N):
            sig = np.kron(sig, PAULI[mm] if mu == lam else np.eye(2))
        K32 = K32 + np.kron(phi, V.conj().T @ sig @ V)
    T0 = sum(
        model.config.beta[mm] * np.kron(np.kron(np.eye(2**lam), PAULI[mm]), np.eye(2 ** (N - lam - 1)))
        for lam in range(N) for mm in range(3)
    )
    K1 = np.kron(sum(w * n for w, n in zip(model.omega, number)), np.eye(ns)) + np.kron(
        np.eye((S + 1) ** D), V.conj().T @ T0 @ V
    )
    keep, perm = [], []
    for c in itertools.product(range(S + 1), repeat=D):
        if sum(c) <= S:
            flat = int(np.ravel_multi_index(c, (S + 1,) * D))
            keep.append(flat)
            perm.append(model.basis.index(tuple(j for j in range(D) for _ in range(c[j]))))
    rows = np.array([[f * ns + e for e in range(ns)] for f in keep]).ravel()
    dest = np.array([[p * ns + e for e in range(ns)] for p in perm]).ravel()
    out = []
    for K in (K1, K32):
        sub = K[np.ix_(rows, rows)]
        full = np.zeros_like(sub, dtype=complex)
        full[np.ix_(dest, dest)] = sub
        out.append(full)
    return out


def test_operators_match_ladder_oracle(space):
    m = QuasimodeModel.build(space, ONE, D=3, max_sector=2)
    K1, K32 = ladder_oracle(m)
    assert np.allclose(np.diag(K1), m.k1_diagonal, atol=1e-14)
    assert np.allclose(K1 - np.diag(np.diag(K1)), 0, atol=1e-14)
    assert np.allclose(m.k32.toarray(), K32, atol=1e-15)


def test_dense_oracle_matches_sparse_assembly(space):
    m = QuasimodeModel.build(space, TWO, D=3, max_sector=2)
    h = 0.3
    K = exact_operator_oracle(m, h)
    assembled = h * np.diag(m.k1_diagonal) + h**1.5 * m.k32.toarray()
    assert np.abs(K - assembled).max() < 1e-15
    assert np.abs(K - K.conj().T).max() == 0
    K4 = exact_operator_oracle(m, 4 * h)
    diag = np.diag(np.diag(K))
    assert np.allclose(np.diag(np.diag(K4)), 4 * diag)
    assert np.allclose(K4 - np.diag(np.diag(K4)), 8 * (K - diag))
    with pytest.raises(MemoryError):
        exact_operator_oracle(m, h, max_dim=10)


def test_resolvent(model_two, rng):
    m = model_two
    u0 = m.vacuum()
    assert np.all(m.resolvent_solve(u0) == 0)
    f = rng.standard_normal(m.dim) + 1j * rng.standard_normal(m.dim)
    u = m.resolvent_solve(f)
    assert u[0] == 0
    proj = f - np.vdot(u0, f) * u0
    assert np.allclose(m.apply_K1(u) - m.lambda1 * u, proj, atol=1e-14)


# -- the series ---------------------------------------------------------------------------


def test_series_structure(model_two):
    ser = quasimode_series(model_two, 1)
    m = model_two
    assert ser.lam[1] == -3.0
    assert set(ser.lam) == {1, 2, 3}
    assert np.allclose(ser.u[1], -m.resolvent_solve(m.apply_K32(ser.u[0])))
    assert np.all(ser.u[1][~m.sector_mask(1)] == 0)
    for j, uj in enumerate(ser.u):
        sectors = m.basis.sector_of.repeat(m.n_spin)
        assert np.all(uj[(sectors % 2) != (j % 2)] == 0)
        if j:
            assert np.vdot(ser.u[0], uj) == 0
    assert max(ser.recursion_residuals()) < 1e-14


def test_series_needs_room():
    with pytest.raises(ValueError):
        quasimode_series(type("M", (), {"max_sector": 2})(), 1)


@pytest.fixture(scope="module")
def big_series(space):
    model = QuasimodeModel.build(space, TWO, D=40, max_sector=3)
    return quasimode_series(model, 1)


H_LIST = [1e-1, 1e-2, 1e-3]


def slope(series, p, terms):
    r = [residual_norm(series, p, h, terms) for h in H_LIST]
    return np.polyfit(np.log10(H_LIST), np.log10(r), 1)[0]


def test_residual_slopes(big_series):
    assert slope(big_series, 0, "odd") == pytest.approx(2.0, abs=0.1)
    assert slope(big_series, 1, "even") == pytest.approx(2.5, abs=0.1)
    assert slope(big_series, 1, "odd") == pytest.approx(3.0, abs=0.1)
    with pytest.raises(ValueError):
        residual_norm(big_series, 1, 0.1, terms="all")
    with pytest.raises(ValueError):
        residual_norm(big_series, 2, 0.1)


def test_wrong_lambda2_degrades_slope(big_series):
    lam = dict(big_series.lam)
    lam[2] *= 1.1
    broken = type(big_series)(big_series.model, big_series.p_max, big_series.u, lam, big_series.sources)
    assert slope(broken, 1, "even") == pytest.approx(2.0, abs=0.1)


def test_lambda2_recursion_matches_closed_form(space):
    model = QuasimodeModel.build(space, TWO, D=None, max_sector=1)
    lam2 = quasimode_series(model, 0).lam[2]
    assert lam2 == pytest.approx(lambda2_closed_form(space, TWO), rel=1e-10)


def test_lambda2_reference_value(fine_space):
    model = QuasimodeModel.build(fine_space, ONE, D=None, max_sector=1)
    assert quasimode_series(model, 0).lam[2] == pytest.approx(LAMBDA2_REFERENCE, rel=1e-6)
    assert lambda2_closed_form(fine_space, ONE) == pytest.approx(LAMBDA2_REFERENCE, rel=1e-6)


def test_variational_bound(space):
    model = QuasimodeModel.build(space, ONE, D=4, max_sector=3)
    ser = quasimode_series(model, 1)
    h = 0.1
    K = exact_operator_oracle(model, h)
    lo = np.linalg.eigvalsh(K)[0]
    bound = residual_norm(ser, 1, h) / np.linalg.norm(ser.trial(h, 2))
    assert abs(lo - ser.energy(h, 1)) <= bound


# -- first-order field --------------------------------------------------------------------


@pytest.fixture(scope="module")
def field_series(space):
    model = QuasimodeModel.build(space, TWO, D=None, max_sector=1)
    return quasimode_series(model, 0)


def test_first_order_field_fock_matches_quadrature(field_series, rng):
    h = 0.3
    for x in rng.uniform(-1.5, 1.5, (20, 3)):
        fo = first_order_field(field_series, x, h)
        assert np.allclose(fo.fock, fo.quadrature, rtol=1e-6, atol=1e-12 * np.abs(fo.quadrature).max())
        assert np.abs(fo.electric).max() <= 1e-10


def test_first_order_field_single_site_value(fine_space, chi):
    q = first_order_quadrature(fine_space, ONE, np.zeros(3), h=0.5)
    assert q[2] == pytest.approx(0.5 * c33_diagonal_oracle(chi), rel=1e-6)
    assert q[2] == pytest.approx(0.5 * beta_coupling(fine_space, ONE)[0, 0], rel=1e-12)
    assert np.allclose(q[:2], 0, atol=1e-18)


def test_first_order_field_laws(space, rng):
    h = 0.5
    f = lambda y: first_order_quadrature(space, TWO, y, h)
    x = rng.uniform(-1, 1, (6, 3))
    assert np.abs(divergence(f, x, 1e-3)).max() <= 1e-5
    grad_phi = sum(space.grad_rho(x - xl) for xl in TWO.positions)
    resid = curl(f, x, 1e-3) + h * np.cross(ZHAT, grad_phi)
    scale = np.abs(f(x)).max()
    assert np.abs(resid).max() / scale <= 1e-4


def test_field_operator_kernel_check(model_two):
    ops = model_two.field_operator(np.zeros(3), "E")
    assert len(ops) == 3 and all(sparse.issparse(o) for o in ops)
    with pytest.raises(ValueError):
        model_two.field_operator(np.zeros(3), "A")
