import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import c33_diagonal_oracle, rho0_oracle
from spinphoton.mode_space import (
    TWO_PI_CUBED,
    CutoffProfile,
    ModeSpace,
    build_grid,
    build_grid_for,
    plateau_bump,
)

seeds = st.integers(0, 2**32 - 1)


def random_X(grid, rng):
    return rng.standard_normal((2, grid.n, 2))


# -- grid construction ---------------------------------------------------------


def test_unit_ball_volume():
    g = build_grid(12, 8, 0.0, 1.0)
    assert g.weights.sum() == pytest.approx(4 * np.pi / 3, rel=1e-12)


def test_angular_average_of_sin2():
    g = build_grid(2, 10, 0.9, 1.1)
    shell = np.isclose(g.radii, g.radii[0])
    w = g.weights[shell]
    k = g.nodes[shell]
    avg = np.sum(w * (k[:, 0] ** 2 + k[:, 1] ** 2) / g.radii[shell] ** 2) / w.sum()
    assert avg == pytest.approx(2 / 3, rel=1e-12)


def test_odd_integrand_vanishes():
    g = build_grid(10, 8, 0.1, 5.0)
    assert abs(np.sum(g.weights * g.nodes[:, 2] * np.exp(-g.radii**2))) < 1e-14


def test_radial_test_integral():
    g = build_grid(32, 6, 0.0, 8.0)
    val = np.sum(g.weights * np.exp(-g.radii**2))
    assert val == pytest.approx(np.pi**1.5, rel=1e-10)


def test_lebedev_rule_option():
    g = build_grid(12, 11, 0.0, 1.0, angular="lebedev")
    assert g.weights.sum() == pytest.approx(4 * np.pi / 3, rel=1e-12)


def test_frames_are_transverse_and_right_handed():
    g = build_grid(4, 8, 0.1, 3.0)
    khat = g.khat
    assert np.abs(np.sum(g.e1 * khat, 1)).max() < 1e-14
    assert np.abs(np.sum(g.e2 * khat, 1)).max() < 1e-14
    assert np.abs(np.sum(g.e1 * g.e2, 1)).max() < 1e-14
    assert np.allclose(np.linalg.norm(g.e1, axis=1), 1) and np.allclose(np.linalg.norm(g.e2, axis=1), 1)
    assert np.allclose(np.sum(khat * np.cross(g.e1, g.e2), 1), 1.0)


def test_weights_positive_and_radii_bounded_below():
    g = build_grid(6, 6, 0.2, 2.0)
    assert np.all(g.weights > 0)
    assert g.r_min > 0.2


@pytest.mark.parametrize(
    "args",
    [(1, 6, 0.1, 1.0), (4, 5, 0.1, 1.0), (4, 6, 1.0, 1.0), (4, 6, -0.1, 1.0), (4, 6, 2.0, 1.0)],
)
def test_build_grid_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        build_grid(*args)


def test_unknown_angular_rule():
    with pytest.raises(ValueError):
        build_grid(4, 6, 0.1, 1.0, angular="spiral")


# -- cutoff --------------------------------------------------------------------


def test_default_cutoff_vanishes_near_origin_and_decays():
    chi = CutoffProfile()
    r = np.linspace(0, 0.1, 11)
    assert np.all(chi(r) == 0)
    lo, hi = chi.support()
    assert chi(np.array([hi]))[0] < 1.01e-12
    assert np.all(chi(np.linspace(0, 20, 400)) >= 0)


def test_plateau_bump_shape():
    s = np.linspace(0, 1.5, 301)
    v = plateau_bump(s)
    assert np.all(v[s <= 0.5] == 1.0)
    assert np.all(v[s >= 1.0] == 0.0)
    assert np.all(np.diff(v) <= 0)


def test_cutoff_validation():
    with pytest.raises(ValueError):
        CutoffProfile("gaussian")
    with pytest.raises(ValueError):
        CutoffProfile(rho_cut=0.0)
    with pytest.raises(ValueError):
        CutoffProfile("plateau", eps=-1.0)


# -- field-vector algebra --------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_inner_is_symmetric_and_positive(seed):
    g = build_grid(4, 6, 0.1, 2.0)
    rng = np.random.default_rng(seed)
    f, h = rng.standard_normal((2, g.n, 2))
    assert g.inner(f, h) == pytest.approx(g.inner(h, f), rel=1e-13)
    assert g.norm2(f) > 0
    assert g.norm2(np.zeros((g.n, 2))) == 0


def test_inner_rejects_mismatched_grid():
    g1 = build_grid(4, 6, 0.1, 2.0)
    g2 = build_grid(5, 6, 0.1, 2.0)
    with pytest.raises(ValueError):
        g1.inner(np.zeros((g1.n, 2)), np.zeros((g2.n, 2)))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_multiplication_operator(seed):
    g = build_grid(4, 6, 0.1, 2.0)
    f = np.random.default_rng(seed).standard_normal((g.n, 2))
    assert np.array_equal(g.apply_M(np.zeros_like(f)), np.zeros_like(f))
    assert np.allclose(g.apply_M_inv(g.apply_M(f)), f, rtol=1e-15)
    assert g.inner(g.apply_M(f), f) >= g.r_min * g.inner(f, f)


def test_transversality_is_structural(rng):
    g = build_grid(4, 8, 0.1, 2.0)
    v = g.to_vectors(rng.standard_normal((g.n, 2)))
    assert np.abs(np.sum(v * g.nodes, axis=1)).max() < 1e-13
    assert np.allclose(g.from_vectors(v), g.from_vectors(g.to_vectors(g.from_vectors(v))))


def test_helicity_is_isometry_squaring_to_minus_one(rng):
    g = build_grid(4, 8, 0.1, 2.0)
    for _ in range(100):
        X = random_X(g, rng)
        JX = g.helicity_J(X)
        assert np.allclose(g.helicity_J(JX), -X)
        assert g.norm2(JX) == pytest.approx(g.norm2(X), rel=1e-14)


def test_helicity_is_cross_product_with_khat(rng):
    g = build_grid(4, 8, 0.1, 2.0)
    f = rng.standard_normal((g.n, 2))
    expected = np.cross(g.khat, g.to_vectors(f))
    assert np.allclose(g.to_vectors(g.helicity_J(f)), expected)
    one = np.zeros((g.n, 2))
    one[0] = [1.0, 0.0]
    assert np.allclose(g.helicity_J(one)[0], [0.0, 1.0])


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_polarization_projectors(seed):
    g = build_grid(3, 6, 0.1, 2.0)
    rng = np.random.default_rng(seed)
    X, Y = random_X(g, rng), random_X(g, rng)
    P, M = g.polarization_projectors(X)
    assert np.allclose(P + M, X)
    assert np.allclose(g.polarization_projectors(P)[0], P)
    assert np.allclose(g.polarization_projectors(M)[1], M)
    assert np.allclose(g.polarization_projectors(P)[1], 0)
    # orthogonal projector: selfadjoint
    assert g.inner(P, Y) == pytest.approx(g.inner(X, g.polarization_projectors(Y)[0]), abs=1e-12)
    F = lambda Z: np.stack([-Z[1], Z[0]])
    assert np.allclose(F(P), g.helicity_J(P))
    assert np.allclose(F(M), -g.helicity_J(M))


def test_free_rotation_group_law_and_energy(rng):
    g = build_grid(6, 6, 0.1, 4.0)
    X = random_X(g, rng)
    assert np.array_equal(g.free_rotation(X, 0.0), X)
    assert np.allclose(g.free_rotation(g.free_rotation(X, 0.3), 1.1), g.free_rotation(X, 1.4), atol=1e-14)
    for t in (0.5, 3.0, -2.0):
        Y = g.free_rotation(X, t)
        assert g.photon_energy(Y) == pytest.approx(g.photon_energy(X), rel=1e-14)
        assert np.allclose(np.sum(Y**2, axis=(0, 2)), np.sum(X**2, axis=(0, 2)))


# -- couplings and fields -----------------------------------------------------------


def test_couplings_at_origin(small_space):
    assert np.all(small_space.coupling_a(np.zeros(3)) == 0)
    assert np.all(small_space.coupling_alpha(np.zeros(3)) == 0)


def test_b_norm_unrolled(small_space):
    g = small_space.grid
    chi = small_space.chi(g.radii)
    for m in range(3):
        b = small_space.coupling_b(np.zeros(3), m)
        cross2 = np.sum(np.cross(g.khat, np.eye(3)[m]) ** 2, axis=1)
        expect = np.sum(g.weights * chi**2 * g.radii * cross2) / TWO_PI_CUBED
        assert g.norm2(b) == pytest.approx(expect, rel=1e-13)


def test_c33_diagonal_against_radial_oracle(fine_space, chi):
    g = fine_space.grid
    a = fine_space.coupling_a(np.array([0.3, -0.2, 0.5]), 2)
    b = fine_space.coupling_b(np.array([0.3, -0.2, 0.5]), 2)
    val = g.inner(a, g.apply_M_inv(a)) + g.inner(b, g.apply_M_inv(b))
    assert val == pytest.approx(c33_diagonal_oracle(chi), rel=1e-6)


def _synthetic_field(nodes):
    """Smooth transverse test fields ``q = k^ x g_q``, ``p = k^ x g_p`` as 3-vectors."""
    r = np.linalg.norm(nodes, axis=1)
    khat = nodes / r[:, None]
    gq = np.stack([np.ones_like(r), nodes[:, 0], nodes[:, 1] * nodes[:, 2]], 1) * np.exp(-r**2 / 4)[:, None]
    gp = np.stack([nodes[:, 2], -np.ones_like(r), 0.5 * nodes[:, 0]], 1) * np.exp(-r**2 / 3)[:, None]
    return np.cross(khat, gq), np.cross(khat, gp)


def _brute_force_B(chi, x, radial_order, angular_order):
    g = build_grid_for(chi, radial_order, angular_order)
    q, p = _synthetic_field(g.nodes)
    amp = chi(g.radii) * np.sqrt(g.radii) / TWO_PI_CUBED**0.5
    ph = g.nodes @ x
    out = []
    for m in range(3):
        ker = np.cross(g.khat, np.eye(3)[m])
        out.append(np.sum(g.weights * amp * (np.sin(ph) * np.sum(ker * q, 1) + np.cos(ph) * np.sum(ker * p, 1))))
    return np.array(out)


def test_field_B_matches_brute_force_quadrature(chi):
    fine = ModeSpace(build_grid_for(chi, 32, 20), chi)
    g = fine.grid
    q, p = _synthetic_field(g.nodes)
    X = np.stack([g.from_vectors(q), g.from_vectors(p)])
    x = np.array([0.4, -0.3, 0.2])
    oracle = _brute_force_B(chi, x, 32, 20)
    assert np.allclose(fine.field_B(x, X), oracle, rtol=1e-12, atol=1e-14)
    # a coarser grid reproduces the same field to quadrature accuracy
    coarse = ModeSpace(build_grid_for(chi, 24, 16), chi)
    qc, pc = _synthetic_field(coarse.grid.nodes)
    Xc = np.stack([coarse.grid.from_vectors(qc), coarse.grid.from_vectors(pc)])
    assert np.allclose(coarse.field_B(x, Xc), oracle, rtol=1e-4, atol=1e-6)


def test_electric_field_is_minus_B_of_JX(space, rng):
    X = random_X(space.grid, rng)
    x = rng.standard_normal((5, 3))
    assert np.allclose(space.field_E(x, X), -space.field_B(x, space.grid.helicity_J(X)), atol=1e-14)


def test_K_matrix_antisymmetric_and_gradient_of_rho(space):
    x = np.array([0.3, 0.1, -0.2])
    xl = np.array([-0.2, 0.4, 0.1])
    g = space.grid
    K = np.empty((3, 3))
    for m in range(3):
        for n in range(3):
            K[m, n] = g.inner(space.coupling_alpha(x, m), space.coupling_b(xl, n)) - g.inner(
                space.coupling_beta(x, m), space.coupling_a(xl, n)
            )
    assert np.allclose(K, -K.T, atol=1e-15)
    d = x - xl
    step = 1e-4
    e3 = np.array([0.0, 0.0, 1.0])
    fd = (space.rho(d + step * e3) - space.rho(d - step * e3)) / (2 * step)
    assert K[0, 1] == pytest.approx(-fd, rel=1e-6)
    assert space.grad_rho(d)[2] == pytest.approx(fd, rel=1e-6)


def test_rho_at_origin(fine_space, chi):
    assert fine_space.rho(np.zeros(3)) == pytest.approx(rho0_oracle(chi), rel=1e-6)
    assert np.allclose(fine_space.grad_rho(np.zeros(3)), 0, atol=1e-18)


def test_quadrature_converges_under_angular_refinement(chi):
    x = np.array([0.7, -0.4, 0.3])
    coarse = ModeSpace(build_grid_for(chi, 24, 12), chi)
    fine = ModeSpace(build_grid_for(chi, 24, 24), chi)
    e3 = np.eye(3)[2]
    for f in (lambda s: s.rho(x), lambda s: s.coupling_integral(x, e3, e3)):
        assert f(coarse) == pytest.approx(f(fine), rel=1e-6)


def test_coupling_integral_matches_inner_products(space):
    x1, x2 = np.array([0.2, 0.0, 0.1]), np.array([-0.5, 0.3, 0.0])
    g = space.grid
    for m, n in [(0, 0), (0, 2), (2, 2), (1, 2)]:
        via_inner = g.inner(space.coupling_a(x1, m), g.apply_M_inv(space.coupling_a(x2, n))) + g.inner(
            space.coupling_b(x1, m), g.apply_M_inv(space.coupling_b(x2, n))
        )
        direct = space.coupling_integral(x1 - x2, np.eye(3)[m], np.eye(3)[n])
        assert via_inner == pytest.approx(direct, rel=1e-10, abs=1e-16)


def test_grad_rho_against_radial_oracle(chi):
    from scipy.special import spherical_jn

    from conftest import radial_integral

    space = ModeSpace(build_grid_for(chi, 48, 40), chi)
    for R in (0.3, 1.0, 3.0):
        d = np.array([0.6, -0.8, 0.0]) * R
        oracle = -4 * np.pi * radial_integral(chi, lambda r: r**3 * spherical_jn(1, r * R)) / TWO_PI_CUBED
        assert np.allclose(space.grad_rho(d), oracle * d / R, rtol=1e-6, atol=1e-9 * abs(oracle))
        rho = 4 * np.pi * radial_integral(chi, lambda r: r**2 * spherical_jn(0, r * R)) / TWO_PI_CUBED
        assert space.rho(d) == pytest.approx(rho, rel=1e-6)
