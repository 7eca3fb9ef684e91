import numpy as np
import pytest

from curved_nbody.gradient import (
    grad_fd_oracle,
    grad_lagrangian,
    grad_pair_potential,
    hessian_fd,
    restricted_min_abs_eig,
    spectrum,
)
from curved_nbody.model import lagrangian_steady, pair_potential, rotate, rotation_generator
from curved_nbody.seeds import lagrange_triangle

from .conftest import sample_configuration


def fd_pair(uj, uk, kappa, h=1e-6, wrt="second"):
    g = np.zeros(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        if wrt == "second":
            g[i] = (pair_potential(uj, uk + e, kappa) - pair_potential(uj, uk - e, kappa)) / (2 * h)
        else:
            g[i] = (pair_potential(uj + e, uk, kappa) - pair_potential(uj - e, uk, kappa)) / (2 * h)
    return g


def test_grad_pair_potential_flat_example():
    g = grad_pair_potential((0.0, 0.0), (1.0, 0.0), 0.0)
    np.testing.assert_allclose(g, [-0.5, 0.0], atol=1e-15)
    fd = fd_pair(np.zeros(2), np.array([1.0, 0.0]), 0.0)
    assert np.max(np.abs(fd - g)) < 1e-8


def test_grad_pair_potential_against_fd(rng):
    for _ in range(50):
        uj, uk = sample_configuration(rng, 2, 0.3).reshape(2, 2)
        g = grad_pair_potential(uj, uk, 0.3)
        fd = fd_pair(uj, uk, 0.3)
        assert np.linalg.norm(g - fd) / np.linalg.norm(g) < 1e-6


def test_grad_pair_potential_swap_gives_first_argument_gradient(rng):
    for _ in range(50):
        kappa = rng.uniform(-1, 0.4)
        uj, uk = sample_configuration(rng, 2, kappa).reshape(2, 2)
        g_first = grad_pair_potential(uk, uj, kappa)
        fd = fd_pair(uj, uk, kappa, wrt="first")
        assert np.linalg.norm(g_first - fd) / np.linalg.norm(fd) < 1e-6


def test_gradient_vanishes_at_lagrange_triangle():
    u = lagrange_triangle(1, 1, 1)
    assert np.max(np.abs(grad_lagrangian(u, [1, 1, 1], 0.0))) < 1e-13


def test_flat_gradient_block_formula(rng):
    n = 4
    u = sample_configuration(rng, n, 0.0)
    m = rng.uniform(0.5, 2, n)
    p = u.reshape(-1, 2)
    expected = np.zeros_like(p)
    for j in range(n):
        expected[j] = 4 * m[j] * p[j]
        for k in range(n):
            if k != j:
                d = p[j] - p[k]
                expected[j] -= 0.5 * m[j] * m[k] * d / np.linalg.norm(d) ** 3
    np.testing.assert_allclose(grad_lagrangian(u, m, 0.0), expected.ravel(), rtol=1e-13, atol=1e-13)


def test_gradient_tangent_to_rotations(rng):
    for _ in range(100):
        kappa = rng.uniform(-1, 0.4)
        n = int(rng.integers(2, 6))
        u = sample_configuration(rng, n, kappa)
        g = grad_lagrangian(u, rng.uniform(0.2, 3, n), kappa)
        assert abs(g @ rotation_generator(u)) / (np.linalg.norm(g) * np.linalg.norm(u)) < 1e-12


def test_gradient_equivariant(rng):
    for _ in range(50):
        kappa = rng.uniform(-1, 0.4)
        u = sample_configuration(rng, 3, kappa)
        m = rng.uniform(0.2, 3, 3)
        theta = rng.uniform(0, 2 * np.pi)
        lhs = grad_lagrangian(rotate(u, theta), m, kappa)
        rhs = rotate(grad_lagrangian(u, m, kappa), theta)
        assert np.max(np.abs(lhs - rhs)) < 1e-11 * max(1.0, np.max(np.abs(rhs)))


def test_gradient_matches_fd_oracle(rng):
    worst = 0.0
    for _ in range(100):
        kappa = rng.uniform(-1, 0.4)
        n = int(rng.integers(2, 6))
        u = sample_configuration(rng, n, kappa)
        m = rng.uniform(0.2, 3, n)
        g = grad_lagrangian(u, m, kappa)
        worst = max(worst, np.linalg.norm(g - grad_fd_oracle(u, m, kappa)) / np.linalg.norm(g))
    assert worst < 1e-6


def test_fd_oracle_second_order(rng):
    u = sample_configuration(rng, 3, 0.2)
    m = np.array([1.0, 2.0, 3.0])
    g = grad_lagrangian(u, m, 0.2)
    errs = [np.linalg.norm(grad_fd_oracle(u, m, 0.2, h) - g) for h in (1e-2, 1e-3, 1e-4)]
    # truncation-dominated regime: a tenfold smaller step gains a factor ~100
    for coarse, fine in zip(errs, errs[1:]):
        assert 70 < coarse / fine < 130
    # at 1e-5 and 1e-6 roundoff takes over; both stay far below the oracle tolerance
    for h in (1e-5, 1e-6):
        assert np.linalg.norm(grad_fd_oracle(u, m, 0.2, h) - g) / np.linalg.norm(g) < 1e-8


def test_hessian_nearly_symmetric_before_symmetrizing(rng):
    u = sample_configuration(rng, 4, -0.6)
    m = rng.uniform(0.5, 2, 4)
    H = hessian_fd(u, m, -0.6, symmetrize=False)
    assert np.max(np.abs(H - H.T)) < 1e-6
    Hs = hessian_fd(u, m, -0.6)
    np.testing.assert_array_equal(Hs, Hs.T)


def test_hessian_annihilates_rotation_at_central_configuration():
    a = lagrange_triangle(1, 2, 3)
    H = hessian_fd(a, [1, 2, 3], 0.0)
    assert np.linalg.norm(H @ rotation_generator(a)) < 1e-6 * np.linalg.norm(H, 2)


def test_hessian_quadratic_form_matches_directional_fd(rng):
    for kappa in (-0.8, 0.0, 0.35):
        u = sample_configuration(rng, 3, kappa)
        m = rng.uniform(0.5, 2, 3)
        v = rng.normal(size=u.size)
        v /= np.linalg.norm(v)
        eps = 1e-4
        second = (lagrangian_steady(u + eps * v, m, kappa) - 2 * lagrangian_steady(u, m, kappa)
                  + lagrangian_steady(u - eps * v, m, kappa)) / eps**2
        assert v @ hessian_fd(u, m, kappa) @ v == pytest.approx(second, rel=1e-4)


def test_spectrum_identity_and_diagonal():
    spect = spectrum(np.eye(6))
    np.testing.assert_allclose(spect.values, np.ones(6))
    d = np.arange(6.0)
    spect = spectrum(np.diag(d))
    np.testing.assert_allclose(spect.values, d, atol=1e-15)  # |.|-ascending order equals d here
    assert spect.kernel_dimension() == 1


def test_spectrum_orders_by_absolute_value_and_has_small_residual(rng):
    A = rng.normal(size=(6, 6))
    H = A + A.T
    spect = spectrum(H)
    assert np.all(np.diff(np.abs(spect.values)) >= 0)
    for lam, v in zip(spect.values, spect.vectors.T):
        assert np.linalg.norm(H @ v - lam * v) < 1e-10 * np.linalg.norm(H, 2)


def test_lagrange_hessian_has_single_zero_eigenvalue():
    H = hessian_fd(lagrange_triangle(1, 1, 1), [1, 1, 1], 0.0)
    spect = spectrum(H)
    assert spect.kernel_dimension() == 1
    assert np.sum(np.abs(spect.values) < 1e-6 * np.max(np.abs(spect.values))) == 1


def test_restricted_min_abs_eig():
    H = np.diag([0.0, 2.0, 5.0])
    assert restricted_min_abs_eig(H, [1.0, 0, 0]) == pytest.approx(2.0)
    assert restricted_min_abs_eig(H, [0, 1.0, 0]) == pytest.approx(0.0, abs=1e-15)
