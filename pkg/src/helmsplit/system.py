"""Discretized combined-field system for Schemes A-D, GMRES, and field evaluation.

The boundary operator is split into a near part ("star": self and neighbor
panel blocks, where product integration lives) and a far part ("circ":
everything else, plain coarse Gauss-Legendre). Schemes B-D compute the
near blocks on the fine grid and map them back with the interpolation
operators, ``Q @ M_star_fine @ P`` (or ``P_x`` for Scheme D).
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, svds

from . import quadrature as pq
from .geometry import (ArcLength, MeshError, build_grids, equal_arclength_mesh,
                       equal_parameter_mesh, point_in_interior)
from .interpolation import build_P, build_Px, build_Q
from .kernels import _cnum, combined_diag_limit, combined_kernel
from .special import bessel_jy

logger = logging.getLogger(__name__)

SCHEMES = {
    # mesh kind, unit speed, coarse-to-fine interpolation
    "A": ("parameter", False, None),
    "B": ("parameter", False, "P"),
    "C": ("arclength", True, "P"),
    "D": ("arclength", True, "Px"),
}

STAR_CIRC_FACTOR = 2.0
N_S = 4
_ROW_CHUNK = 256


class ConfigurationError(ValueError):
    pass


@dataclass
class Discretization:
    curve: object
    mesh: object
    coarse: object
    fine: object
    scheme: str

    @property
    def n(self):
        return self.coarse.n


def discretize(curve, n_pan, n_pt, scheme, arclength=None):
    """Mesh and grids appropriate for ``scheme``."""
    scheme = scheme.upper()
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    kind, unit, _ = SCHEMES[scheme]
    arclength = arclength or ArcLength(curve)
    if kind == "arclength":
        mesh = equal_arclength_mesh(curve, n_pan, arclength=arclength)
    else:
        mesh = equal_parameter_mesh(curve, n_pan, arclength=arclength)
    coarse, fine = build_grids(curve, mesh, n_pt, unit_speed=unit, arclength=arclength)
    return Discretization(curve, mesh, coarse, fine, scheme)


def combined_direct(targets, sources, normals, k, eta):
    """Direct M = K - i eta S for all target/source pairs, shape (m, n)."""
    diff = sources[None, :] - targets[:, None]
    d = np.abs(diff)
    x = k * d
    j0, y0, j1, y1 = bessel_jy(np.where(x > 0, x, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        c_over_d = (diff.real * normals.real + diff.imag * normals.imag) / d
    return (-0.5j * k) * (j1 + 1j * y1) * c_over_d + (0.5 * eta) * (j0 + 1j * y0)


# ---------------------------------------------------------------- near blocks

def near_blocks(grid, k, eta):
    """Near-interaction blocks with product integration on ``grid``.

    Returns an array (n_pan, 3, n, n): entry [q, o] holds targets on panel q
    against sources on panel q + o - 1 (cyclic), already multiplied by the
    source speed and weight.
    """
    n = grid.n_pt
    n_pan = grid.n_pan
    z = grid.points.reshape(n_pan, n)
    nu = grid.normals.reshape(n_pan, n)
    sw = (grid.speed * grid.weights).reshape(n_pan, n)
    h = grid.panel_lengths()
    x, _ = pq.gauss_legendre(n)
    out = np.empty((n_pan, 3, n, n), dtype=complex)
    idx = np.arange(n)
    for o, side in ((0, -1), (1, 0), (2, 1)):
        # targets on panel q, sources on panel p = q + side
        p = (np.arange(n_pan) + side) % n_pan
        tz = z[:, :, None]
        sz = z[p][:, None, :]
        snu = nu[p][:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            parts, direct = combined_kernel(tz, sz, snu, k, eta, "boundary")
        blk = direct * sw[p][:, None, :]
        if side == 0:
            lim = combined_diag_limit(k, eta, grid.curvature_term.reshape(n_pan, n))
            corr = np.stack([pq.self_panel_corrections(n, h[q], grid.speed[grid.panel(q)])
                             for q in range(n_pan)])
            gl = parts.log_factor
            gl[:, idx, idx] = lim.log_factor
            blk[:, idx, idx] = lim.smooth * sw
            blk = blk + gl * sw[p][:, None, :] * corr
        else:
            # target panel q relative to source panel p is on side -side
            scale = h / h[p]
            # equal panels differ only by rounding; snap so weight matrices are shared
            scale = np.where(np.abs(scale - 1.0) < 1e-12, 1.0, scale)
            tside = -side
            for q in range(n_pan):
                corr = pq.neighbor_corrections(n, scale[q], tside)
                tt = tside * (1.0 + scale[q]) + scale[q] * x
                act = np.abs(tt) < 2.0 * pq._factor(pq.BOUNDARY_FACTOR, n, 1.0, 0.7)
                blk[q, act] += parts.log_factor[q, act] * sw[p[q]][None, :] * corr[act]
        out[:, o] = blk
    return out


# -------------------------------------------------------------- the operator

@dataclass
class SystemOperator:
    """I + M_star + M_circ on the coarse grid."""

    scheme: str
    k: float
    eta: float
    disc: Discretization
    star: sp.csr_matrix
    circ: np.ndarray
    interp: object = None
    Q: object = None
    timings: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.circ.shape[0]

    def matvec(self, x):
        return x + self.star @ x + self.circ @ x

    __matmul__ = matvec

    def to_dense(self):
        a = self.circ + self.star.toarray()
        a[np.diag_indices_from(a)] += 1.0
        return a

    @property
    def star_nnz(self):
        return self.star.nnz


def _near_column_mask(n_pan, n_pt):
    """Boolean (n_pan, n_pan) marking self and neighbor panel pairs."""
    q = np.arange(n_pan)
    m = np.zeros((n_pan, n_pan), dtype=bool)
    for s in (-1, 0, 1):
        m[q, (q + s) % n_pan] = True
    return m


def _circ_matrix(grid, k, eta):
    n, n_pt, n_pan = grid.n, grid.n_pt, grid.n_pan
    sw = grid.speed * grid.weights
    near = _near_column_mask(n_pan, n_pt)
    out = np.empty((n, n), dtype=complex)
    step = max(1, _ROW_CHUNK // n_pt)
    for q0 in range(0, n_pan, step):
        q1 = min(n_pan, q0 + step)
        rows = slice(q0 * n_pt, q1 * n_pt)
        blk = combined_direct(grid.points[rows], grid.points, grid.normals, k, eta) * sw
        mask = np.repeat(np.repeat(near[q0:q1], n_pt, axis=0), n_pt, axis=1)
        blk[mask] = 0.0
        out[rows] = blk
    return out


def assemble(disc, k, eta=None, n_s=N_S):
    """Build the split system operator for ``disc.scheme``."""
    scheme = disc.scheme
    _, unit, kind = SCHEMES[scheme]
    if scheme in ("C", "D") and (disc.mesh.kind != "arclength" or not disc.coarse.unit_speed):
        raise ConfigurationError(f"scheme {scheme} needs an equal-arclength mesh with unit-speed grids")
    eta = 0.5 * k if eta is None else float(eta)
    coarse, fine = disc.coarse, disc.fine
    n_pt, n_pan = coarse.n_pt, coarse.n_pan
    t0 = time.perf_counter()
    interp = qop = None
    if kind is None:
        blocks = near_blocks(coarse, k, eta)
        src_cols = [np.arange(p * n_pt, (p + 1) * n_pt) for p in range(n_pan)]
        mapped = blocks
    else:
        qop = build_Q(n_pt, n_pan)
        interp = build_P(n_pt, n_pan) if kind == "P" else build_Px(coarse.panel_lengths(), n_pt, n_s)
        fblocks = near_blocks(fine, k, eta)
        qb = qop.blocks[0]
        src_cols = interp.columns
        mapped = np.empty((n_pan, 3, n_pt, src_cols[0].size), dtype=complex)
        for o, side in enumerate((-1, 0, 1)):
            p = (np.arange(n_pan) + side) % n_pan
            pb = np.stack([interp.blocks[j] for j in p])
            mapped[:, o] = qb @ fblocks[:, o] @ pb
    rows, cols, vals = [], [], []
    for q in range(n_pan):
        r = np.arange(q * n_pt, (q + 1) * n_pt)
        for o, side in enumerate((-1, 0, 1)):
            c = src_cols[(q + side) % n_pan]
            rows.append(np.repeat(r, c.size))
            cols.append(np.tile(c, n_pt))
            vals.append(mapped[q, o].ravel())
    n = coarse.n
    star = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n)).tocsr()
    star.sum_duplicates()
    t1 = time.perf_counter()
    circ = _circ_matrix(coarse, k, eta)
    t2 = time.perf_counter()
    logger.info("assembled scheme %s: n=%d, star nnz=%d, %.2fs near + %.2fs far",
                scheme, n, star.nnz, t1 - t0, t2 - t1)
    return SystemOperator(scheme, float(k), eta, disc, star, circ, interp, qop,
                          timings={"near": t1 - t0, "far": t2 - t1})


# ----------------------------------------------------------------- GMRES

@dataclass
class GMRESResult:
    x: np.ndarray
    iterations: int
    residuals: list
    converged: bool
    stagnated: bool = False
    breakdown: bool = False


def gmres(matvec, b, tol=np.finfo(float).eps, max_iter=500, stagnation_window=5):
    """Unrestarted GMRES with modified Gram-Schmidt plus one reorthogonalization.

    Stops once the estimated relative residual drops below ``tol``. If the
    estimate fails to decrease for ``stagnation_window`` consecutive steps,
    returns the best iterate with ``stagnated`` set.
    """
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    if hasattr(matvec, "matvec"):
        matvec = matvec.matvec
    b = np.asarray(b, dtype=complex)
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side is not finite")
    beta = np.linalg.norm(b)
    n = b.size
    if beta == 0:
        return GMRESResult(np.zeros(n, complex), 0, [0.0], True)
    m = min(max_iter, n)
    V = np.zeros((m + 1, n), dtype=complex)
    H = np.zeros((m + 1, m), dtype=complex)
    cs = np.zeros(m, dtype=complex)
    sn = np.zeros(m, dtype=complex)
    g = np.zeros(m + 1, dtype=complex)
    g[0] = beta
    V[0] = b / beta
    residuals = [1.0]
    best_j, best_res = 0, 1.0
    no_progress = 0
    stagnated = breakdown = converged = False
    j = 0
    for j in range(m):
        w = matvec(V[j])
        for _ in range(2):
            for i in range(j + 1):
                hij = np.vdot(V[i], w)
                H[i, j] += hij
                w = w - hij * V[i]
        hnext = np.linalg.norm(w)
        H[j + 1, j] = hnext
        for i in range(j):
            tmp = np.conj(cs[i]) * H[i, j] + np.conj(sn[i]) * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = tmp
        a, c = H[j, j], H[j + 1, j]
        denom = np.hypot(abs(a), abs(c))
        if denom == 0:
            breakdown = True
            break
        cs[j] = a / denom
        sn[j] = c / denom
        H[j, j] = denom
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = np.conj(cs[j]) * g[j]
        res = abs(g[j + 1]) / beta
        residuals.append(res)
        if res < best_res:
            best_res, best_j = res, j + 1
            no_progress = 0
        else:
            no_progress += 1
        if res < tol:
            converged = True
            break
        if hnext < np.finfo(float).tiny:
            # happy breakdown: the Krylov space is invariant
            breakdown = converged = True
            break
        if no_progress >= stagnation_window:
            stagnated = True
            break
        V[j + 1] = w / hnext
    kdim = j + 1 if converged else best_j
    y = np.linalg.solve(np.triu(H[:kdim, :kdim]), g[:kdim]) if kdim else np.zeros(0, complex)
    x = V[:kdim].T @ y
    return GMRESResult(x, kdim, residuals, converged, stagnated, breakdown)


def solve(op, rhs, tol=np.finfo(float).eps, max_iter=1000):
    """Solve (I + M) rho = rhs with GMRES; returns a GMRESResult."""
    return gmres(op.matvec, rhs, tol=tol, max_iter=max_iter)


def condition_estimate(op, dense_limit=4000):
    """2-norm condition number of I + M."""
    if hasattr(op, "to_dense"):
        a = op.to_dense()
    else:
        a = np.asarray(op)
    if a.shape[0] <= dense_limit:
        s = np.linalg.svd(a, compute_uv=False)
        return s[0] / s[-1]
    lu = sla.lu_factor(a)
    n = a.shape[0]
    big = svds(LinearOperator((n, n), matvec=lambda v: a @ v, rmatvec=lambda v: a.conj().T @ v,
                              dtype=complex), k=1, return_singular_vectors=False)[0]
    inv = LinearOperator((n, n), matvec=lambda v: sla.lu_solve(lu, v),
                         rmatvec=lambda v: sla.lu_solve(lu, v, trans=2), dtype=complex)
    small_inv = svds(inv, k=1, return_singular_vectors=False)[0]
    return big * small_inv


# --------------------------------------------------------- field evaluation

ROUTE_CIRC, ROUTE_STAR_CIRC, ROUTE_STAR = 0, 1, 2


@dataclass
class FieldEvaluation:
    points: np.ndarray
    u: np.ndarray
    route: np.ndarray
    near_endpoint: np.ndarray


def _panel_bounds(curve, grid, n_sample=33):
    tb = grid.tbreaks
    s = np.linspace(0.0, 1.0, n_sample)
    t = tb[:-1, None] + (tb[1:] - tb[:-1])[:, None] * s
    pts = curve.position(t)
    center = pts[:, n_sample // 2]
    radius = np.abs(pts - center[:, None]).max(axis=1)
    return center, radius


def evaluate_field(op, rho, targets, star_circ_factor=STAR_CIRC_FACTOR, chunk=512,
                   check_interior=True):
    """u at exterior ``targets`` from the coarse density ``rho``."""
    disc = op.disc
    curve, coarse, fine = disc.curve, disc.coarse, disc.fine
    k, eta = op.k, op.eta
    targets = np.atleast_1d(np.asarray(targets, dtype=complex)).ravel()
    if check_interior and curve.radius is not None and np.any(point_in_interior(curve, targets)):
        raise ValueError("field targets must lie outside the curve")
    rho = np.asarray(rho, dtype=complex)
    m = targets.size
    n_pt, n_pan = coarse.n_pt, coarse.n_pan
    if op.interp is None:
        pgrid, prho = coarse, rho
        zone = 0.0
    else:
        pgrid, prho = fine, op.interp.apply(rho)
        zone = star_circ_factor
    act_factor = pq._factor(pq.FIELD_FACTOR, pgrid.n_pt, 1.1, 0.3)
    reach = max(act_factor, zone)
    lengths = coarse.arclengths
    center, radius = _panel_bounds(curve, coarse)

    route = np.zeros((m, n_pan), dtype=np.int8)
    for p in range(n_pan):
        cand = np.nonzero(np.abs(targets - center[p]) - radius[p] < reach * lengths[p])[0]
        if cand.size == 0:
            continue
        d = pq.panel_distance(curve, coarse.tbreaks[p], coarse.tbreaks[p + 1], targets[cand])
        route[cand[d < zone * lengths[p]], p] = ROUTE_STAR_CIRC
        route[cand[d < act_factor * lengths[p]], p] = ROUTE_STAR

    u = np.zeros(m, dtype=complex)
    # far part on the coarse grid, masking panels handled below
    sw_rho = coarse.speed * coarse.weights * rho
    for i0 in range(0, m, chunk):
        i1 = min(m, i0 + chunk)
        g = combined_direct(targets[i0:i1], coarse.points, coarse.normals, k, eta)
        contrib = (g * sw_rho).reshape(i1 - i0, n_pan, n_pt).sum(axis=2)
        u[i0:i1] = np.where(route[i0:i1] == ROUTE_CIRC, contrib, 0.0).sum(axis=1)

    near_end = np.zeros(m, dtype=bool)
    fsw_rho = fine.speed * fine.weights * (prho if op.interp is not None else 0)
    pn = pgrid.n_pt
    for p in range(n_pan):
        tgt = np.nonzero(route[:, p] == ROUTE_STAR_CIRC)[0]
        if tgt.size:
            sl = fine.panel(p)
            g = combined_direct(targets[tgt], fine.points[sl], fine.normals[sl], k, eta)
            u[tgt] += g @ fsw_rho[sl]
        tgt = np.nonzero(route[:, p] == ROUTE_STAR)[0]
        if tgt.size:
            sl = pgrid.panel(p)
            rj, nuj = pgrid.points[sl], pgrid.normals[sl]
            sw = pgrid.speed[sl] * pgrid.weights[sl]
            rpw = pgrid.velocity[sl] * pgrid.weights[sl]
            ra, rb = pgrid.endpoints[p]
            parts, direct = combined_kernel(targets[tgt, None], rj[None, :], nuj[None, :], k, eta, "field")
            wcorr, wcmp, ne = pq.near_panel_weights(ra, rb, targets[tgt], rj, nuj, rpw)
            near_end[tgt] |= ne
            r_p = prho[sl]
            u[tgt] += (direct * sw) @ r_p
            u[tgt] += (parts.log_factor * sw * wcorr) @ r_p
            u[tgt] += (parts.cauchy_factor * wcmp) @ r_p
    return FieldEvaluation(targets, 0.5 * u, route.max(axis=1), near_end)
