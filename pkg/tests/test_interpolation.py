import numpy as np
import pytest

from helmsplit.interpolation import (barycentric_matrix, build_P, build_Px, build_Q, extended_nodes,
                                     gauss_legendre, interpolation_matrix)


@pytest.mark.parametrize("n", [1, 2, 5, 16, 32, 64])
def test_gauss_legendre_matches_numpy(n):
    x, w = gauss_legendre(n)
    xr, wr = np.polynomial.legendre.leggauss(n)
    assert np.allclose(x, xr, atol=1e-15, rtol=0)
    assert np.allclose(w, wr, atol=5e-15, rtol=0)


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(16)
    for j in range(32):
        exact = 2.0 / (j + 1) if j % 2 == 0 else 0.0
        assert abs(w @ x**j - exact) < 1e-14


@pytest.mark.parametrize("n", [0, 65])
def test_gauss_legendre_range(n):
    with pytest.raises(ValueError):
        gauss_legendre(n)


@pytest.mark.parametrize("n_pt", [16, 32])
def test_qp_identity(n_pt):
    qp = build_Q(n_pt, 4).to_dense() @ build_P(n_pt, 4).to_dense()
    assert np.abs(qp - np.eye(4 * n_pt)).max() < 1e-12


@pytest.mark.parametrize("n_pt", [16, 32])
def test_p_and_q_polynomial_exactness(n_pt):
    xc, _ = gauss_legendre(n_pt)
    xf, _ = gauss_legendre(2 * n_pt)
    p, q = build_P(n_pt, 1).blocks[0], build_Q(n_pt, 1).blocks[0]
    for deg in range(n_pt):
        assert np.abs(p @ xc**deg - xf**deg).max() < 1e-11
    for deg in range(2 * n_pt):
        assert np.abs(q @ xf**deg - xc**deg).max() < 1e-11


def test_shapes():
    p, q = build_P(16, 5), build_Q(16, 5)
    assert p.blocks[0].shape == (32, 16) and q.blocks[0].shape == (16, 32)
    px = build_Px(np.ones(5), 16, 4)
    assert px.blocks[0].shape == (32, 24)


def test_px_exactness_across_unequal_neighbors():
    h = np.array([1.0, 0.5, 2.0, 1.5, 0.75])
    n_pt, n_s = 16, 4
    px = build_Px(h, n_pt, n_s)
    br = np.concatenate(([0.0], np.cumsum(h)))
    xc, _ = gauss_legendre(n_pt)
    xf, _ = gauss_legendre(2 * n_pt)
    coarse = (br[:-1, None] + 0.5 * h[:, None] * (xc + 1)).ravel()
    fine = (br[:-1, None] + 0.5 * h[:, None] * (xf + 1)).ravel()
    p = 2  # interior panel, neighbors 1 and 3 lie on the same side of the seam
    c = 0.5 * (br[p] + br[p + 1])
    for deg in range(n_pt + 2 * n_s):
        f = lambda s: ((s - c) / h[p]) ** deg
        got = px.apply(f(coarse))[2 * n_pt * p:2 * n_pt * (p + 1)]
        assert np.abs(got - f(fine[2 * n_pt * p:2 * n_pt * (p + 1)])).max() < 1e-11


def test_px_reproduces_constants_across_seam():
    px = build_Px(np.linspace(1, 2, 6), 16, 4)
    assert np.abs(px.apply(np.ones(96)) - 1).max() < 1e-12


def test_px_with_no_borrowed_nodes_is_p():
    px = build_Px(np.ones(6), 16, 0)
    assert np.abs(px.to_dense() - build_P(16, 6).to_dense()).max() < 1e-15


def test_extended_nodes_layout():
    x = extended_nodes(16, 4, 1.0, 1.0)
    assert x.size == 24 and np.all(np.diff(x) > 0)
    assert x[3] < -1 < x[4] and x[19] < 1 < x[20]


@pytest.mark.parametrize("args", [(16, 9), (16, -1)])
def test_px_rejects_bad_borrow_counts(args):
    with pytest.raises(ValueError):
        build_Px(np.ones(5), *args)


def test_px_needs_three_panels():
    with pytest.raises(ValueError):
        build_Px(np.ones(2), 16, 4)


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_extended_precision_beats_double():
    xc, _ = gauss_legendre(32)
    xf, _ = gauss_legendre(64)
    q_mp = interpolation_matrix(xf, xc) @ interpolation_matrix(xc, xf)
    q_dp = interpolation_matrix(xf, xc, False) @ interpolation_matrix(xc, xf, False)
    assert np.abs(q_mp - np.eye(32)).max() < np.abs(q_dp - np.eye(32)).max()


@pytest.mark.parametrize("n_pt", [16, 32])
def test_barycentric_matches_extended_precision(n_pt):
    xc, _ = gauss_legendre(n_pt)
    xf, _ = gauss_legendre(2 * n_pt)
    assert np.abs(barycentric_matrix(xc, xf) - interpolation_matrix(xc, xf)).max() < 5e-15
    assert np.abs(barycentric_matrix(xf, xc) - interpolation_matrix(xf, xc)).max() < 5e-15
