import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from helmsplit import quadrature as pq
from helmsplit.cli import parse_npan
from helmsplit.interpolation import build_P, build_Q, gauss_legendre
from helmsplit.kernels import combined_kernel
from helmsplit.system import gmres

finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.6, 6.0), st.floats(0, 2 * np.pi))
def test_moments_match_quadrature_away_from_segment(radius, angle):
    xi = radius * np.exp(1j * angle)
    p, q = pq.complex_moments(np.array([xi]), 16, winding=[0])
    x, w = np.polynomial.legendre.leggauss(80)
    leg = pq.legendre_values(x, 17)
    assert np.abs(p[0] - (w / (x - xi)) @ leg).max() < 1e-13
    assert np.abs(q[0] - (w * np.log(x - xi)) @ leg[:, :16]).max() < 1e-13


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2, **finite), min_size=16, max_size=16))
def test_coarse_to_fine_reproduces_polynomials(coeffs):
    x, _ = gauss_legendre(16)
    xf, _ = gauss_legendre(32)
    f = np.polynomial.legendre.legval(x, coeffs)
    ff = np.polynomial.legendre.legval(xf, coeffs)
    scale = 1 + np.abs(coeffs).sum()
    assert np.abs(build_P(16, 1).blocks[0] @ f - ff).max() < 1e-13 * scale
    assert np.abs(build_Q(16, 1).blocks[0] @ ff - f).max() < 1e-13 * scale


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=1, **finite), st.floats(-6, 0), st.floats(0, 2 * np.pi),
       st.floats(0, 2 * np.pi), st.floats(0.5, 300), st.sampled_from(["boundary", "field"]))
def test_split_reassembles_kernel(r, logd, ang, nu_ang, k, ctx):
    rp = r + 10**logd * np.exp(1j * ang)
    nu = np.exp(1j * nu_ang)
    parts, direct = combined_kernel(np.array([r]), np.array([rp]), np.array([nu]), k, 0.5 * k, ctx)
    back = parts.reassemble(np.array([r]), np.array([rp]), np.array([nu]))
    assert abs(back[0] - direct[0]) <= 1e-11 * abs(direct[0]) + 1e-13


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(3, 500), min_size=1, max_size=6))
def test_npan_lists_roundtrip(values):
    assert parse_npan(",".join(map(str, values))) == values
    assert parse_npan(" ".join(map(str, values))) == values


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.2, 20), min_size=2, max_size=12))
def test_gmres_solves_diagonal_systems(diag):
    d = np.array(diag)
    b = np.ones(d.size) + 1j
    res = gmres(lambda v: d * v, b, tol=1e-14)
    assert res.converged
    assert np.abs(res.x - b / d).max() < 1e-11
