"""Gauss-Legendre rules and panelwise interpolation between coarse and fine grids.

Coarse-to-fine and fine-to-coarse maps between Gauss-Legendre node sets
use barycentric Lagrange interpolation, which is stable in double
precision for these nodes. The extended-node maps have larger entries and
a larger Lebesgue constant; there the matrix ``V_target @ inv(V_source)``
is formed by an LU solve with monomial Vandermonde matrices (condition
numbers up to ~1e12) carried out in 50-digit arithmetic and rounded, so
each entry is correct to double precision. Matrices are cached per node set.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
import scipy.linalg as sla
from scipy.interpolate import BarycentricInterpolator


def _legendre_pair(n, x):
    # (P_{n-1}(x), P_n(x)) by the three-term recurrence
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    return p0, p1


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    if not 1 <= n <= 64:
        raise ValueError("gauss_legendre supports 1 <= n <= 64")
    k = np.arange(1, n + 1)
    x = -np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0, p1 = _legendre_pair(n, x)
        dx = p1 / (n * (x * p1 - p0) / (x * x - 1.0))
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    x = 0.5 * (x - x[::-1])
    p0, p1 = _legendre_pair(n, x)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n):
    """Nodes (ascending) and weights of the n-point rule on [-1, 1]."""
    return _gauss_legendre(int(n))


def vandermonde(x, ncols):
    """Matrix with entries x_i**j, j = 0..ncols-1."""
    return np.vander(np.asarray(x), ncols, increasing=True)


@lru_cache(maxsize=64)
def _interpolation_matrix_mp(source, target, dps):
    m = len(source)
    ctx = mpmath.MPContext()
    ctx.dps = dps
    src = [ctx.mpf(x) for x in source]
    a = ctx.matrix([[x**j for x in src] for j in range(m)])  # V_src^T
    lu, perm = ctx.LU_decomp(a)
    rows = []
    for y in target:
        y = ctx.mpf(y)
        b = ctx.matrix([y**j for j in range(m)])
        x = ctx.U_solve(lu, ctx.L_solve(lu, b, perm))
        rows.append([float(v) for v in x])
    out = np.array(rows)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def _barycentric_matrix(source, target):
    out = BarycentricInterpolator(np.array(source), np.eye(len(source)))(np.array(target))
    out.setflags(write=False)
    return out


def barycentric_matrix(source, target):
    """Interpolation matrix from barycentric Lagrange interpolation."""
    return _barycentric_matrix(tuple(map(float, source)), tuple(map(float, target)))


def interpolation_matrix(source, target, extended_precision=True):
    """Matrix mapping values at ``source`` nodes to the interpolating
    polynomial's values at ``target`` nodes (degree len(source)-1).

    With ``extended_precision=False`` the Vandermonde system is solved by
    LAPACK in double precision.
    """
    if extended_precision:
        return _interpolation_matrix_mp(tuple(map(float, source)),
                                        tuple(map(float, target)), 50)
    m = len(source)
    v_src = vandermonde(source, m)
    v_tgt = vandermonde(target, m)
    # V_tgt V_src^{-1}  ==  (V_src^T \ V_tgt^T)^T
    return sla.solve(v_src.T, v_tgt.T).T


@dataclass
class InterpOperator:
    """Blockwise interpolation operator between grids on the same mesh.

    ``blocks[p]`` maps the source values gathered by ``columns[p]`` to the
    target values on panel p. For ``P`` and ``Q`` every panel shares one
    block; for ``Px`` blocks depend on neighbor panel lengths.
    """

    kind: str
    blocks: list
    columns: list
    n_in: int
    n_out: int
    n_s: int = 0
    alphas: np.ndarray = field(default=None)
    betas: np.ndarray = field(default=None)

    @property
    def n_pan(self):
        return len(self.blocks)

    def apply(self, x):
        x = np.asarray(x)
        rows = self.n_out // self.n_pan
        out = np.empty((self.n_out,) + x.shape[1:], dtype=np.result_type(x, float))
        for p, (b, cols) in enumerate(zip(self.blocks, self.columns)):
            out[p * rows:(p + 1) * rows] = b @ x[cols]
        return out

    __matmul__ = apply

    def to_dense(self):
        rows = self.n_out // self.n_pan
        m = np.zeros((self.n_out, self.n_in))
        for p, (b, cols) in enumerate(zip(self.blocks, self.columns)):
            m[p * rows:(p + 1) * rows, cols] += b
        return m


def build_P(n_pt, n_pan):
    """Panelwise degree n_pt-1 interpolation from the coarse to the fine grid."""
    xc, _ = gauss_legendre(n_pt)
    xf, _ = gauss_legendre(2 * n_pt)
    b = barycentric_matrix(xc, xf)
    cols = [np.arange(p * n_pt, (p + 1) * n_pt) for p in range(n_pan)]
    return InterpOperator("P", [b] * n_pan, cols, n_pt * n_pan, 2 * n_pt * n_pan)


def build_Q(n_pt, n_pan):
    """Panelwise degree 2 n_pt-1 interpolation from the fine to the coarse grid."""
    xc, _ = gauss_legendre(n_pt)
    xf, _ = gauss_legendre(2 * n_pt)
    b = barycentric_matrix(xf, xc)
    cols = [np.arange(2 * p * n_pt, 2 * (p + 1) * n_pt) for p in range(n_pan)]
    return InterpOperator("Q", [b] * n_pan, cols, 2 * n_pt * n_pan, n_pt * n_pan)


def extended_nodes(n_pt, n_s, alpha, beta):
    """Canonical coarse nodes of panel p plus n_s nodes borrowed from each
    neighbor, expressed in panel p's canonical coordinate."""
    x, _ = gauss_legendre(n_pt)
    left = alpha * (x[n_pt - n_s:] - 1.0) - 1.0
    right = beta * (x[:n_s] + 1.0) + 1.0
    return np.concatenate((left, x, right))


def build_Px(panel_lengths, n_pt, n_s):
    """Extended interpolation coarse -> fine using n_s nodes from each neighbor.

    ``panel_lengths`` are the panel lengths in the discretization parameter;
    the curve is closed, so neighbors wrap around cyclically.
    """
    h = np.asarray(panel_lengths, dtype=float)
    n_pan = len(h)
    if n_s < 0:
        raise ValueError("n_s must be non-negative")
    if n_pt + 2 * n_s > 2 * n_pt:
        raise ValueError("n_pt + 2 n_s must not exceed 2 n_pt")
    if n_pan < 3:
        raise ValueError("extended interpolation needs at least 3 panels")
    xf, _ = gauss_legendre(2 * n_pt)
    alphas = np.roll(h, 1) / h
    betas = np.roll(h, -1) / h
    # equal panels differ only by rounding; snap so blocks are shared
    alphas[np.abs(alphas - 1.0) < 1e-12] = 1.0
    betas[np.abs(betas - 1.0) < 1e-12] = 1.0
    cache = {}
    blocks, cols = [], []
    for p in range(n_pan):
        key = (alphas[p], betas[p])
        if key not in cache:
            cache[key] = interpolation_matrix(extended_nodes(n_pt, n_s, *key), xf)
        blocks.append(cache[key])
        prev, nxt = (p - 1) % n_pan, (p + 1) % n_pan
        cols.append(np.concatenate((
            np.arange((prev + 1) * n_pt - n_s, (prev + 1) * n_pt),
            np.arange(p * n_pt, (p + 1) * n_pt),
            np.arange(nxt * n_pt, nxt * n_pt + n_s),
        )))
    return InterpOperator("Px", blocks, cols, n_pt * n_pan, 2 * n_pt * n_pan,
                          n_s=n_s, alphas=alphas, betas=betas)
