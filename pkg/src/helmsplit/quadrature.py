"""Product integration for log- and Cauchy-singular kernels on panels.

Weights are built from moments on the canonical interval [-1, 1]. Two
situations are covered:

* target on the curve (same or neighboring panel): real monomial log
  moments, solved against the Gauss-Legendre Vandermonde matrix in
  extended precision and cached;
* target off the curve: complex Legendre moments giving log corrections
  and Cauchy compensation weights, solved in double precision against the
  much better conditioned Legendre matrix at the panel's nodes.

Monomial moments satisfy p(k+1) = xi p(k) + c(k). That recursion runs
forward for |xi| <= ``BACKWARD_THRESHOLD`` and backward from a zero tail
above it, where forward recursion would amplify rounding by |xi|**k.
"""

import math
import warnings
from functools import lru_cache

import mpmath
import numpy as np
import scipy.linalg as sla
from scipy.interpolate import BarycentricInterpolator

from .interpolation import gauss_legendre

BACKWARD_THRESHOLD = 1.1
ENDPOINT_TOL = 1e-13

# activation thresholds keyed by points per panel
BOUNDARY_FACTOR = {16: 1.0, 32: 0.7}
FIELD_FACTOR = {16: 1.1, 32: 0.3}


class EndpointWarning(RuntimeWarning):
    """Target so close to a panel endpoint that the moments lose accuracy."""


def _c(n):
    k = np.arange(1, n + 1)
    return (1.0 - (-1.0) ** k) / k


def _recurse(xi, p_first, n):
    """Moments p(1..n+1) for each xi given p(1); shape (m, n+1)."""
    m = xi.shape[0]
    c = _c(n)
    p = np.zeros((m, n + 1), dtype=np.result_type(xi, p_first))
    p[:, 0] = p_first
    fwd = np.abs(xi) <= BACKWARD_THRESHOLD
    if np.any(fwd):
        xf = xi[fwd]
        pf = p[fwd]
        for k in range(n):
            pf[:, k + 1] = xf * pf[:, k] + c[k]
        p[fwd] = pf
    bwd = ~fwd
    if np.any(bwd):
        xb = xi[bwd]
        extra = int(math.ceil(42.0 / math.log(np.abs(xb).min()))) + 1
        big = n + extra
        cc = _c(big)
        cur = np.zeros(xb.shape, dtype=p.dtype)
        pb = np.empty((xb.shape[0], n + 1), dtype=p.dtype)
        # cur holds p(k+1); step down to p(k) = (p(k+1) - c(k)) / xi
        for k in range(big, 0, -1):
            if k <= n:
                pb[:, k] = cur
            cur = (cur - cc[k - 1]) / xb
        pb[:, 0] = p[bwd, 0]
        p[bwd] = pb
    return p


def _q_from_p(p, p1, n):
    q = np.empty((p.shape[0], n), dtype=p.dtype)
    q[:, 0::2] = p1[:, None] - p[:, 1:n + 1:2]
    q[:, 1::2] = p[:, [0]] - p[:, 2:n + 1:2]
    return q / np.arange(1, n + 1)


def real_log_moments(tt, n):
    """Integrals of log|tt - x| x**j over [-1, 1], j = 0..n-1, for real tt."""
    tt = np.atleast_1d(np.asarray(tt, dtype=float))
    if np.any(np.abs(np.abs(tt) - 1.0) == 0.0):
        raise ValueError("log moments are singular for targets at +-1")
    p = _recurse(tt, np.log(np.abs((1.0 - tt) / (1.0 + tt))), n)
    p1 = np.log(np.abs(1.0 - tt * tt))
    return _q_from_p(p, p1, n)


def legendre_values(z, n):
    """P_0..P_{n-1} at each z; shape z.shape + (n,)."""
    z = np.asarray(z)
    out = np.empty(z.shape + (n,), dtype=np.result_type(z, float))
    out[..., 0] = 1.0
    if n > 1:
        out[..., 1] = z
    for k in range(1, n - 1):
        out[..., k + 1] = ((2 * k + 1) * z * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


def _chord_cauchy_moments(xi, n):
    """Integrals of P_k(x) / (x - xi) over the real segment [-1, 1], k < n.

    These equal -2 Q_k(xi). Close to the segment the three-term recurrence
    runs forward; further out Q_k is its minimal solution and comes from
    backward ratios scaled by the k = 0 value.
    """
    rho = np.abs(xi + np.sqrt(xi - 1.0) * np.sqrt(xi + 1.0))
    rho = np.maximum(rho, 1.0 / np.maximum(rho, 1e-300))
    p = np.empty((xi.shape[0], n), dtype=complex)
    big = np.abs(xi) > 2.0
    # log((xi - 1) / (xi + 1)) = -2 artanh(1 / xi) avoids cancellation far out
    with np.errstate(all="ignore"):
        p[:, 0] = np.where(big, -2.0 * np.arctanh(1.0 / np.where(big, xi, 2.0)),
                           np.log(1.0 - xi) - np.log(-1.0 - xi))
    fwd = 2 * n * np.log(rho) <= np.log(1e2)
    if np.any(fwd) and n > 1:
        xf = xi[fwd]
        pf = p[fwd]
        pf[:, 1] = 2.0 + xf * pf[:, 0]
        for k in range(1, n - 1):
            pf[:, k + 1] = ((2 * k + 1) * xf * pf[:, k] - k * pf[:, k - 1]) / (k + 1)
        p[fwd] = pf
    bwd = ~fwd
    if np.any(bwd) and n > 1:
        xb = xi[bwd]
        top = n + int(math.ceil(37.0 / (2.0 * np.log(rho[bwd]).min()))) + 2
        r = np.zeros(xb.shape, dtype=complex)
        ratios = np.empty((xb.shape[0], n), dtype=complex)
        # r_k = p_k / p_{k-1}, from (k+1) p_{k+1} = (2k+1) xi p_k - k p_{k-1}
        for k in range(top, 0, -1):
            r = k / ((2 * k + 1) * xb - (k + 1) * r)
            if k < n:
                ratios[:, k] = r
        pb = p[bwd]
        for k in range(1, n):
            pb[:, k] = pb[:, k - 1] * ratios[:, k]
        p[bwd] = pb
    return p


def complex_moments(xi, n, winding=None):
    """Legendre Cauchy moments p (m, n+1) and log moments q (m, n).

    p[:, k] integrates P_k(x) / (x - xi) and q[:, k] integrates
    P_k(x) log(x - xi) along the panel image from -1 to 1, the log being
    continued from its principal value at x = -1. ``winding`` is the
    winding number of the closed loop (panel, then chord back) around each
    xi; it adds the residue 2 pi i winding P_k(xi). Without it, targets
    with Im xi > 0 and |Re xi| < 1 are taken to lie inside a panel bulging
    towards them.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    if winding is None:
        winding = -((xi.imag > 0) & (np.abs(xi.real) < 1)).astype(int)
    winding = np.broadcast_to(np.asarray(winding), xi.shape)
    p = _chord_cauchy_moments(xi, n + 1)
    loop = winding != 0
    if np.any(loop):
        p[loop] += 2j * np.pi * winding[loop, None] * legendre_values(xi[loop], n + 1)
    q = np.empty((xi.shape[0], n), dtype=complex)
    start = np.log(-1.0 - xi)
    q[:, 0] = (1.0 - xi) * (start + p[:, 0]) + (1.0 + xi) * start - 2.0
    # by parts with P_k = (P_{k+1} - P_{k-1})' / (2k + 1); boundary terms vanish for k >= 1
    k = np.arange(1, n)
    q[:, 1:] = -(p[:, 2:n + 1] - p[:, 0:n - 1]) / (2 * k + 1)
    return p, q


def _segment_distance(z, a, b):
    ab = b - a
    t = np.clip(((z - a) * np.conj(ab)).real / np.maximum(np.abs(ab) ** 2, 1e-300), 0.0, 1.0)
    return np.abs(z - (a + t * ab))


def _refined_turn(curve, z, s0, s1, f0, f1, depth):
    # arg change of (curve(s) - z) over [s0, s1], splitting until the chord is trustworthy
    sm = 0.5 * (s0 + s1)
    fm = complex(curve(sm))
    dev = abs(fm - 0.5 * (f0 + f1))
    if depth == 0 or s1 - s0 < 1e-14 or _segment_distance(z, f0, f1) > 4.0 * dev:
        return np.angle((f1 - z) / (f0 - z))
    return (_refined_turn(curve, z, s0, sm, f0, fm, depth - 1)
            + _refined_turn(curve, z, sm, s1, fm, f1, depth - 1))


def panel_winding(xi, nodes, tau, n_sample=None):
    """Winding number, around each xi, of the panel image (through ``tau`` at
    canonical ``nodes``, from -1 to 1) closed by the chord from 1 back to -1."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    curve = BarycentricInterpolator(nodes, tau)
    s = np.linspace(-1.0, 1.0, n_sample or 8 * len(nodes) + 1)
    f = curve(s).astype(complex)
    f[0], f[-1] = -1.0, 1.0
    d = f[None, :] - xi[:, None]
    turn = np.angle(d[:, 1:] / d[:, :-1])
    dev = np.abs(curve(0.5 * (s[1:] + s[:-1])) - 0.5 * (f[1:] + f[:-1]))
    dist = _segment_distance(xi[:, None], f[None, :-1], f[None, 1:])
    theta = turn.sum(axis=1)
    for i, j in zip(*np.nonzero(dist <= 4.0 * dev[None, :])):
        theta[i] += _refined_turn(curve, xi[i], s[j], s[j + 1], f[j], f[j + 1], 60) - turn[i, j]
    principal = np.angle(1.0 - xi) - np.angle(-1.0 - xi)
    return np.rint((theta - principal) / (2.0 * np.pi)).astype(int)


@lru_cache(maxsize=None)
def _mp_vandermonde_lu(nodes, dps=50):
    ctx = mpmath.MPContext()
    ctx.dps = dps
    m = len(nodes)
    a = ctx.matrix([[ctx.mpf(x) ** j for x in nodes] for j in range(m)])
    return ctx, ctx.LU_decomp(a)


def _solve_vandermonde_rows(nodes, rhs):
    """Rows W with W V = rhs, V_ij = nodes_i**j, solved in extended precision."""
    ctx, (lu, perm) = _mp_vandermonde_lu(tuple(map(float, nodes)))
    out = np.empty_like(rhs, dtype=float)
    for i, row in enumerate(rhs):
        b = ctx.matrix([ctx.mpf(float(v)) for v in row])
        out[i] = [float(v) for v in ctx.U_solve(lu, ctx.L_solve(lu, b, perm))]
    return out


@lru_cache(maxsize=None)
def _log_weight_matrix(trans, scale, n):
    x, _ = gauss_legendre(n)
    q = real_log_moments(trans + scale * x, n)
    out = _solve_vandermonde_rows(x, q)
    out.setflags(write=False)
    return out


def log_weight_matrix(trans, scale, n):
    """Product-integration matrix W for log|tt_m - x| on [-1, 1].

    Row m holds weights with sum_j W[m, j] f(x_j) = integral of
    log|tt_m - x| f(x) for polynomials f of degree < n, where x_j are the
    n-point Gauss-Legendre nodes and tt_m = trans + scale * x_m.
    """
    return _log_weight_matrix(float(trans), float(scale), int(n))


def self_panel_corrections(n, panel_length, speeds):
    """Log weight corrections for targets and sources on the same panel.

    ``panel_length`` is the panel length in the discretization parameter
    and ``speeds`` the |r'| values at the panel's nodes.
    """
    x, w = gauss_legendre(n)
    wl = log_weight_matrix(0.0, 1.0, n)
    with np.errstate(divide="ignore"):
        corr = wl / w[None, :] - np.log(np.abs(x[:, None] - x[None, :]))
    idx = np.arange(n)
    corr[idx, idx] = np.diag(wl) / w + np.log(np.abs(0.5 * panel_length * np.asarray(speeds)))
    return corr


def neighbor_corrections(n, scale, side):
    """Log weight corrections for targets on a panel adjacent to the source panel.

    ``scale`` is target panel length over source panel length;
    ``side`` is +1 when the target panel follows the source panel and -1
    when it precedes it.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    x, w = gauss_legendre(n)
    trans = side * (1.0 + scale)
    wl = log_weight_matrix(trans, scale, n)
    tt = trans + scale * x
    return wl / w[None, :] - np.log(np.abs(tt[:, None] - x[None, :]))


def near_panel_weights(ra, rb, targets, rj, nuj, rpwj):
    """Log corrections and Cauchy compensation weights for off-curve targets.

    Parameters
    ----------
    ra, rb : complex
        Panel start and end points.
    targets : complex array (m,)
        Target points off the panel.
    rj, nuj, rpwj : complex arrays (n,)
        Panel nodes, unit normals, and velocity times weight.

    Returns
    -------
    wcorr : (m, n) real
        Corrections multiplying G_L * rho * s * w at each node.
    wcmp : (m, n) real
        Compensation weights multiplying G_C * rho at each node.
    near_end : (m,) bool
        Targets within ENDPOINT_TOL of a panel endpoint.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=complex))
    n = len(rj)
    dr = 0.5 * (rb - ra)
    mid = 0.5 * (rb + ra)
    xi = (targets - mid) / dr
    tj = (rj - mid) / dr
    near_end = np.minimum(np.abs(targets - ra), np.abs(targets - rb)) < ENDPOINT_TOL
    if np.any(near_end):
        warnings.warn("target within %.0e of a panel endpoint" % ENDPOINT_TOL, EndpointWarning)
    x, _ = gauss_legendre(n)
    p, q = complex_moments(xi, n, winding=panel_winding(xi, x, tj))
    a = legendre_values(tj, n).T
    lu = sla.lu_factor(a)
    wp = sla.lu_solve(lu, p[:, :n].T).T
    wq = sla.lu_solve(lu, q.T).T
    diff = rj[None, :] - targets[:, None]
    wcorr = np.imag(wq * dr * np.conj(nuj)[None, :]) / np.abs(rpwj)[None, :] - np.log(np.abs(diff / dr))
    wcmp = np.imag(wp - rpwj[None, :] / diff)
    return wcorr, wcmp, near_end


def _factor(table, n_pt, small, large):
    if n_pt in table:
        return table[n_pt]
    return small if n_pt < 32 else large


def activate_boundary(t_i, t_a, t_b, n_pt):
    """Whether a target node at parameter t_i needs product integration on [t_a, t_b]."""
    f = _factor(BOUNDARY_FACTOR, n_pt, 1.0, 0.7)
    return np.abs(np.asarray(t_i) - 0.5 * (t_a + t_b)) < f * (t_b - t_a)


def panel_distance(curve, t_a, t_b, z, n_scan=20, newton_steps=30):
    """Minimum distance from points z to the curve piece r([t_a, t_b])."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ts = np.linspace(t_a, t_b, n_scan + 1)
    d2 = np.abs(curve.position(ts)[None, :] - z[:, None]) ** 2
    t = ts[np.argmin(d2, axis=1)]
    for _ in range(newton_steps):
        diff = curve.position(t) - z
        v = curve.velocity(t)
        a = curve.acceleration(t)
        g = (v.real * diff.real + v.imag * diff.imag)
        h = np.abs(v) ** 2 + a.real * diff.real + a.imag * diff.imag
        step = np.where(h > 0, g / np.where(h > 0, h, 1.0), 0.0)
        tn = np.clip(t - step, t_a, t_b)
        done = np.abs(tn - t) <= 1e-15 * (t_b - t_a)
        t = tn
        if np.all(done):
            break
    best = np.abs(curve.position(t) - z)
    ends = np.minimum(np.abs(curve.position(t_a) - z), np.abs(curve.position(t_b) - z))
    return np.minimum(np.minimum(best, ends), np.sqrt(d2.min(axis=1)))


def activate_field(distance, panel_arclength, n_pt):
    """Whether a field point at ``distance`` from a panel needs product integration."""
    f = _factor(FIELD_FACTOR, n_pt, 1.1, 0.3)
    return np.asarray(distance) < f * panel_arclength
