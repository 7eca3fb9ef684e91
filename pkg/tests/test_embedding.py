import numpy as np
import pytest

from curved_nbody.embedding import embed, latitude_report, project, rescale_unit
from curved_nbody.errors import DomainError, FlatCurvatureError, PreconditionError
from curved_nbody.model import conformal_factor, rotate

from .conftest import sample_configuration


def test_poles_and_vertex():
    np.testing.assert_allclose(embed([0.0, 0.0], 1.0).points, [[0, 0, -1]], atol=1e-15)
    np.testing.assert_allclose(embed([0.0, 0.0], -1.0).points, [[0, 0, 1]], atol=1e-15)
    np.testing.assert_allclose(embed([0.0, 0.0], 0.25).points, [[0, 0, -2]], atol=1e-15)


def test_far_points_approach_projection_pole():
    z = embed([1e8, 0.0], 1.0).points[0]
    np.testing.assert_allclose(z, [0, 0, 1], atol=1e-7)


def test_errors():
    with pytest.raises(FlatCurvatureError):
        embed([0.1, 0.2], 0.0)
    with pytest.raises(DomainError):
        embed([1.0, 0.0], -1.0)


@pytest.mark.parametrize("kappa", [0.3, 2.0, -0.4, -3.0])
def test_constraint_residual(rng, kappa):
    for _ in range(20):
        ec = embed(sample_configuration(rng, 4, kappa), kappa)
        assert np.max(np.abs(ec.constraint_residual())) < 1e-12 * ec.radius**2
        if kappa < 0:
            assert np.all(ec.points[:, 2] > 0)
        un = rescale_unit(ec, reflect=True)
        assert np.max(np.abs(un.constraint_residual())) < 1e-12


@pytest.mark.parametrize("kappa", [0.3, 2.0, -0.4, -3.0])
@pytest.mark.parametrize("rescaled", [False, True])
def test_round_trip(rng, kappa, rescaled):
    u = sample_configuration(rng, 5, kappa)
    ec = embed(u, kappa)
    if rescaled:
        ec = rescale_unit(ec, reflect=True)
    np.testing.assert_allclose(project(ec), u, rtol=1e-12, atol=1e-14)


def test_rotation_equivariance(rng):
    for kappa in (0.5, -0.5):
        u = sample_configuration(rng, 3, kappa)
        theta = 0.83
        a, b = embed(u, kappa).points, embed(rotate(u, theta), kappa).points
        c, s = np.cos(theta), np.sin(theta)
        np.testing.assert_allclose(b[:, 0], c * a[:, 0] - s * a[:, 1], atol=1e-14)
        np.testing.assert_allclose(b[:, 1], s * a[:, 0] + c * a[:, 1], atol=1e-14)
        np.testing.assert_allclose(b[:, 2], a[:, 2], atol=1e-14)


def test_equal_modulus_gives_equal_height():
    t = np.array([0.1, 1.7, 4.0])
    u = 0.35 * np.column_stack((np.cos(t), np.sin(t))).ravel()
    for kappa in (0.7, -2.0):
        z = embed(u, kappa).points[:, 2]
        assert np.ptp(z) < 1e-15 * abs(z).max() + 1e-15


def test_rescale_and_reflect():
    ec = embed([0.0, 0.0], 0.25)
    np.testing.assert_allclose(ec.points, [[0, 0, -2]], atol=1e-15)
    # dividing by R = 2 lands on the unit sphere's south pole
    np.testing.assert_allclose(rescale_unit(ec).points, [[0, 0, -1]], atol=1e-15)
    np.testing.assert_allclose(rescale_unit(ec, reflect=True).points, [[0, 0, 1]], atol=1e-15)
    ec = embed([0.3, 0.4], 0.25)
    np.testing.assert_allclose(rescale_unit(ec).points, ec.points / 2.0, rtol=1e-15)


def test_double_rescale_refused():
    ec = rescale_unit(embed([0.1, 0.0], 1.0))
    with pytest.raises(PreconditionError):
        rescale_unit(ec)


def test_latitude_report_needs_rescaled():
    with pytest.raises(PreconditionError):
        latitude_report(embed([0.1, 0.0, 0.0, 0.2], 1.0), [1, 1])


def test_single_body_at_pole_on_axis():
    rep = latitude_report(rescale_unit(embed([0.0, 0.0], 1.0)), [1.0])
    assert rep.axis_distance[0] == 0.0


def test_heaviest_closest_to_axis(pos123, neg123):
    for fam in (pos123, neg123):
        for r in fam.records[1::25]:
            rep = latitude_report(rescale_unit(embed(r.u, r.kappa), reflect=True), fam.masses)
            assert np.all(np.diff(rep.masses) > 0)
            assert np.all(np.diff(rep.axis_distance) < 0)


def test_latitude_orders_by_mass():
    ec = rescale_unit(embed([0.3, 0.0, 0.0, 0.1, -0.2, 0.0], 1.0))
    rep = latitude_report(ec, [3.0, 1.0, 2.0])
    np.testing.assert_array_equal(rep.order, [1, 2, 0])
    np.testing.assert_allclose(rep.axis_distance, np.hypot(ec.points[[1, 2, 0], 0], ec.points[[1, 2, 0], 1]))


def test_equal_masses_on_a_parallel(equal_pos, equal_neg):
    for fam in (equal_pos, equal_neg):
        for r in fam.records[1::10]:
            rep = latitude_report(rescale_unit(embed(r.u, r.kappa)), fam.masses)
            assert np.ptp(rep.axis_distance) < 1e-10
            assert np.ptp(rep.z) < 1e-10


@pytest.mark.parametrize("kappa", [0.6, -0.9])
def test_pullback_metric_is_conformal_factor(rng, kappa):
    for _ in range(10):
        u = sample_configuration(rng, 1, kappa)
        eps = 1e-6
        cols = []
        for i in range(2):
            e = np.zeros(2)
            e[i] = eps
            cols.append((embed(u + e, kappa).points[0] - embed(u - e, kappa).points[0]) / (2 * eps))
        dx = np.column_stack(cols)
        sigma = np.sign(kappa)
        g = dx.T @ np.diag([1.0, 1.0, sigma]) @ dx
        lam = conformal_factor(u, kappa)
        np.testing.assert_allclose(g, lam * np.eye(2), rtol=1e-7, atol=1e-7 * lam)
