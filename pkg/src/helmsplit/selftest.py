"""Quick oracle checks run by ``helmsplit selftest``.

Each check returns (name, passed, detail). References are closed forms or
adaptive quadrature, so the suite runs without the test dependencies.
"""

import numpy as np
from scipy.integrate import quad

from . import quadrature as pq
from .interpolation import build_P, build_Px, build_Q, gauss_legendre
from .kernels import combined_kernel
from .special import bessel_jy


def _log_moment_reference(tt, n):
    out = []
    for j in range(n):
        f = lambda x: np.log(abs(tt - x)) * x**j
        pts = [tt] if -1 < tt < 1 else None
        out.append(quad(f, -1, 1, points=pts, limit=200, epsabs=1e-15, epsrel=1e-14)[0])
    return np.array(out)


def check_gauss_legendre():
    x, w = gauss_legendre(16)
    err = max(abs(w @ x**j - (2.0 / (j + 1) if j % 2 == 0 else 0.0)) for j in range(32))
    return "gauss-legendre exactness", err < 1e-14, f"max error {err:.1e}"


def check_log_weights():
    worst = 0.0
    x, _ = gauss_legendre(16)
    f = np.cos(x) + x**3
    for trans, scale in ((0.0, 1.0), (2.0, 1.0), (-2.0, 1.0), (3.0, 2.0), (-1.5, 0.5)):
        w = pq.log_weight_matrix(trans, scale, 16)
        for m in (0, 7, 15):
            tt = trans + scale * x[m]
            ref = quad(lambda s: np.log(abs(tt - s)) * (np.cos(s) + s**3), -1, 1,
                       points=[tt] if -1 < tt < 1 else None, limit=200, epsabs=1e-15)[0]
            worst = max(worst, abs(w[m] @ f - ref))
    return "log product integration weights", worst < 1e-11, f"max error {worst:.1e}"


def check_cauchy_straight():
    # straight panel from (1, 0) to (-1, 0) with normal (0, 1); c = (r' - r).nu' = -h
    n = 16
    x, w = gauss_legendre(n)
    rj = -x + 0j
    rpw = -w + 0j
    nuj = np.full(n, 1j)
    worst = 0.0
    for h in (1.0, 1e-1, 1e-3):
        z = np.array([0.3 + 1j * h])
        _, wcmp, _ = pq.near_panel_weights(1.0 + 0j, -1.0 + 0j, z, rj, nuj, rpw)
        plain = np.sum(-h / np.abs(rj - z[0]) ** 2 * np.abs(rpw))
        ref = -(np.arctan(0.7 / h) + np.arctan(1.3 / h))
        worst = max(worst, abs(plain + wcmp[0].sum() - ref))
    return "cauchy compensation, straight panel", worst < 1e-11, f"max error {worst:.1e}"


def check_interpolation():
    worst = 0.0
    for n in (16, 32):
        qp = build_Q(n, 3).blocks[0] @ build_P(n, 3).blocks[0]
        worst = max(worst, np.abs(qp - np.eye(n)).max())
    px = build_Px(np.ones(5), 16, 4)
    ones_err = np.abs(px.apply(np.ones(80)) - 1).max()
    ok = worst < 1e-12 and ones_err < 1e-11
    return "interpolation QP = I", ok, f"|QP - I| {worst:.1e}, Px constants {ones_err:.1e}"


def check_reassembly():
    rng = np.random.default_rng(1)
    r = rng.normal(size=200) + 1j * rng.normal(size=200)
    rp = r + 10 ** rng.uniform(-6, 0, 200) * np.exp(2j * np.pi * rng.uniform(size=200))
    nu = np.exp(2j * np.pi * rng.uniform(size=200))
    worst = 0.0
    for k in (1.0, 28.0, 280.0):
        for ctx in ("boundary", "field"):
            parts, direct = combined_kernel(r, rp, nu, k, 0.5 * k, ctx)
            worst = max(worst, np.max(np.abs(parts.reassemble(r, rp, nu) - direct) / np.abs(direct)))
    return "kernel split reassembly", worst < 1e-11, f"max relative error {worst:.1e}"


def check_bessel():
    x = np.array([1e-6, 0.5, 3.0, 24.9, 25.1, 300.0])
    j0, y0, j1, y1 = bessel_jy(x)
    # Wronskian J1 Y0 - J0 Y1 = 2 / (pi x)
    err = np.max(np.abs((j1 * y0 - j0 * y1) * np.pi * x / 2 - 1))
    return "bessel wronskian", err < 1e-13, f"max error {err:.1e}"


CHECKS = (check_gauss_legendre, check_log_weights, check_cauchy_straight,
          check_interpolation, check_reassembly, check_bessel)


def run():
    return [check() for check in CHECKS]
