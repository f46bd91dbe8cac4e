import numpy as np
import pytest

from helmsplit.geometry import (ArcLength, MeshError, NewtonError, build_grids, circle_curve,
                                equal_arclength_mesh, equal_parameter_mesh, point_in_interior)


def test_starfish_length(starfish_arclength, oracles):
    assert starfish_arclength.length == pytest.approx(oracles["starfish_length"], rel=1e-14)


def test_circle_arclength_is_linear():
    a = ArcLength(circle_curve(2.0))
    t = np.linspace(-np.pi, np.pi, 11)
    assert np.allclose(a(t), 2.0 * (t + np.pi), atol=1e-13)


def test_arclength_inverse_roundtrip(starfish_arclength):
    sigma = np.linspace(0, starfish_arclength.length, 101)
    t = starfish_arclength.inverse(sigma)
    assert np.max(np.abs(starfish_arclength(t) - sigma)) < 1e-14


def test_arclength_inverse_reports_failure(starfish_arclength):
    with pytest.raises(NewtonError):
        starfish_arclength.inverse(np.array([0.5]), maxiter=1)


def test_derivatives_by_finite_differences(starfish):
    t = np.linspace(-3, 3, 7)
    h = 1e-5
    v = (starfish.position(t + h) - starfish.position(t - h)) / (2 * h)
    a = (starfish.velocity(t + h) - starfish.velocity(t - h)) / (2 * h)
    assert np.max(np.abs(v - starfish.velocity(t))) < 1e-8
    assert np.max(np.abs(a - starfish.acceleration(t))) < 1e-7


def test_normals_point_outward(starfish):
    t = np.linspace(-np.pi, np.pi, 50, endpoint=False)
    p = starfish.position(t) + 1e-3 * starfish.normal(t)
    assert not point_in_interior(starfish, p).any()
    assert point_in_interior(starfish, starfish.position(t) - 1e-3 * starfish.normal(t)).all()


def test_equal_parameter_mesh(starfish):
    mesh = equal_parameter_mesh(starfish, 10)
    assert mesh.n_pan == 10
    assert np.allclose(np.diff(mesh.breakpoints), 2 * np.pi / 10)


def test_equal_arclength_mesh(starfish, starfish_arclength):
    mesh = equal_arclength_mesh(starfish, 12, arclength=starfish_arclength)
    assert np.ptp(mesh.arclengths) < 1e-13
    assert mesh.arclengths.sum() == pytest.approx(starfish_arclength.length, rel=1e-15)


@pytest.mark.parametrize("make", [equal_parameter_mesh, equal_arclength_mesh])
def test_mesh_rejects_too_few_panels(starfish, make):
    with pytest.raises(MeshError):
        make(starfish, 2)


def test_arclength_mesh_rejects_tiny_tolerance(starfish):
    with pytest.raises(MeshError):
        equal_arclength_mesh(starfish, 8, tol=1e-17)


@pytest.mark.parametrize("unit", [False, True])
def test_grids_integrate_length(starfish, starfish_arclength, unit):
    # 48 panels resolve the speed, whose square roots branch near the concave tips
    mesh = equal_arclength_mesh(starfish, 48, arclength=starfish_arclength)
    coarse, fine = build_grids(starfish, mesh, 16, unit_speed=unit, arclength=starfish_arclength)
    assert coarse.n == 768 and fine.n == 1536
    for g in (coarse, fine):
        assert np.sum(g.speed * g.weights) == pytest.approx(starfish_arclength.length, rel=1e-13)
    if unit:
        assert np.allclose(coarse.speed, 1.0, atol=1e-13)


def test_unit_speed_curvature_matches_parameter_form(starfish, starfish_arclength):
    mesh = equal_parameter_mesh(starfish, 8)
    plain, _ = build_grids(starfish, mesh, 16)
    mesh_a = equal_arclength_mesh(starfish, 8, arclength=starfish_arclength)
    uni, _ = build_grids(starfish, mesh_a, 16, unit_speed=True, arclength=starfish_arclength)
    # the curvature term is parameterization independent: compare at the unit-speed nodes
    v, a = starfish.velocity(uni.t), starfish.acceleration(uni.t)
    nu = -1j * v / np.abs(v)
    kappa = (nu.real * a.real + nu.imag * a.imag) / np.abs(v) ** 2
    assert np.allclose(uni.curvature_term, kappa, atol=1e-12)
    assert plain.curvature_term.shape == (128,)


def test_circle_curvature_term():
    mesh = equal_parameter_mesh(circle_curve(0.5), 4)
    g, _ = build_grids(circle_curve(0.5), mesh, 8)
    assert np.allclose(g.curvature_term, -2.0)


def test_point_in_interior_accepts_real_pairs(starfish):
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert point_in_interior(starfish, pts).tolist() == [True, False]
