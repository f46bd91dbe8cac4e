"""Point-source reference solutions and the convergence experiments.

Boundary data are generated by point sources inside the starfish, so the
exact exterior solution is known everywhere and every error below is
measured against it.
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .geometry import ArcLength, point_in_interior, starfish_curve
from .special import hankel1_0
from .system import (ConfigurationError, assemble, discretize, evaluate_field, solve)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointSource:
    position: complex
    strength: float


def default_sources():
    """Five fixed sources with radii in [0.1, 0.2] and strengths in (0, 1)."""
    radii = (0.13, 0.17, 0.11, 0.19, 0.15)
    angles = (0.7, 2.1, 3.5, 4.9, 6.0)
    strengths = (0.9, 0.2, 0.6, 0.5, 0.8)
    return [PointSource(complex(r * np.exp(1j * a)), q) for r, a, q in zip(radii, angles, strengths)]


def exact_field(sources, k, r):
    """Sum of q (i/4) H0(k |r - r_q|) over the sources."""
    r = np.asarray(r, dtype=complex)
    u = np.zeros(r.shape, dtype=complex)
    for s in sources:
        d = np.abs(r - s.position)
        if np.any(d == 0):
            raise ValueError("field requested at a source location")
        u += s.strength * 0.25j * hankel1_0(k * d)
    return u


def far_field_points():
    return 1.25 * np.exp(2j * np.pi * np.arange(9) / 9)


def cartesian_grid(n, half_width=0.75):
    x = np.linspace(-half_width, half_width, n)
    xx, yy = np.meshgrid(x, x)
    return xx + 1j * yy


def near_field_points(curve=None, n=200, half_width=0.75):
    """Exterior points of the n-by-n grid over the square of given half width."""
    curve = curve or starfish_curve()
    z = cartesian_grid(n, half_width).ravel()
    return z[~point_in_interior(curve, z)]


ETA_RULES = {"k/2": 0.5, "k": 1.0, "-k": -1.0}


def resolve_eta(rule, k):
    if isinstance(rule, (int, float)):
        return float(rule)
    rule = str(rule).strip()
    if rule in ETA_RULES:
        return ETA_RULES[rule] * k
    try:
        return float(rule)
    except ValueError:
        raise ConfigurationError(f"eta must be one of {sorted(ETA_RULES)} or a number, got {rule!r}") from None


@dataclass
class ExperimentConfig:
    scheme: str = "C"
    n_pt: int = 16
    n_pan: list = field(default_factory=lambda: [16, 32, 48, 64, 80, 96])
    k: float = 28.0
    eta: object = "k/2"
    tol: float = float(np.finfo(float).eps)
    out: str = None
    max_iter: int = 1000

    def validate(self):
        self.scheme = str(self.scheme).upper()
        if self.scheme not in "ABCD" or len(self.scheme) != 1:
            raise ConfigurationError(f"scheme must be A, B, C or D, got {self.scheme!r}")
        if self.n_pt not in (16, 32):
            raise ConfigurationError("n_pt must be 16 or 32")
        if isinstance(self.n_pan, int):
            self.n_pan = [self.n_pan]
        if not self.n_pan or any(int(p) < 3 for p in self.n_pan):
            raise ConfigurationError("every n_pan must be at least 3")
        self.n_pan = [int(p) for p in self.n_pan]
        if not self.k > 0:
            raise ConfigurationError("k must be positive")
        resolve_eta(self.eta, self.k)
        if not np.finfo(float).eps <= self.tol < 1:
            raise ConfigurationError("tol must lie in [machine epsilon, 1)")
        return self

    @property
    def eta_value(self):
        return resolve_eta(self.eta, self.k)


@dataclass
class Solution:
    op: object
    rho: np.ndarray
    iterations: int
    converged: bool
    assemble_s: float
    solve_s: float


def solve_problem(config, n_pan, sources=None, curve=None, arclength=None):
    """Discretize, assemble and solve for one panel count."""
    curve = curve or starfish_curve()
    sources = sources or default_sources()
    t0 = time.perf_counter()
    disc = discretize(curve, n_pan, config.n_pt, config.scheme, arclength=arclength)
    op = assemble(disc, config.k, config.eta_value)
    t1 = time.perf_counter()
    rhs = 2.0 * exact_field(sources, config.k, disc.coarse.points)
    res = solve(op, rhs, tol=config.tol, max_iter=config.max_iter)
    t2 = time.perf_counter()
    if not np.all(np.isfinite(res.x)):
        raise FloatingPointError("solution contains non-finite values")
    logger.info("scheme %s n_pan=%d: %d iterations (converged=%s)", config.scheme, n_pan,
                res.iterations, res.converged)
    return Solution(op, res.x, res.iterations, res.converged, t1 - t0, t2 - t1)


@dataclass
class ErrorReport:
    n_pan: int
    n_unknowns: int
    gmres_iters: int
    max_rel_err: float = np.nan
    avg_norm_err: float = np.nan
    max_norm_err: float = np.nan
    n_points: int = 0
    assemble_s: float = 0.0
    solve_s: float = 0.0
    eval_s: float = 0.0


def run_far_field(config, sources=None):
    config.validate()
    sources = sources or default_sources()
    curve = starfish_curve()
    arclength = ArcLength(curve)
    z = far_field_points()
    exact = exact_field(sources, config.k, z)
    reports = []
    for n_pan in config.n_pan:
        sol = solve_problem(config, n_pan, sources, curve, arclength)
        t0 = time.perf_counter()
        u = evaluate_field(sol.op, sol.rho, z).u
        t1 = time.perf_counter()
        err = np.max(np.abs(u - exact) / np.abs(exact))
        reports.append(ErrorReport(n_pan, sol.op.n, sol.iterations, max_rel_err=err,
                                   n_points=z.size, assemble_s=sol.assemble_s,
                                   solve_s=sol.solve_s, eval_s=t1 - t0))
    if config.out:
        write_csv(config.out, reports, FARFIELD_COLUMNS, config)
    return reports


def run_near_field(config, sources=None, grid_n=200):
    config.validate()
    sources = sources or default_sources()
    curve = starfish_curve()
    arclength = ArcLength(curve)
    z = near_field_points(curve, grid_n)
    exact = exact_field(sources, config.k, z)
    scale = np.abs(exact).max()
    reports = []
    for n_pan in config.n_pan:
        sol = solve_problem(config, n_pan, sources, curve, arclength)
        t0 = time.perf_counter()
        u = evaluate_field(sol.op, sol.rho, z).u
        t1 = time.perf_counter()
        e = np.abs(u - exact) / scale
        reports.append(ErrorReport(n_pan, sol.op.n, sol.iterations, avg_norm_err=e.mean(),
                                   max_norm_err=e.max(), n_points=z.size,
                                   assemble_s=sol.assemble_s, solve_s=sol.solve_s, eval_s=t1 - t0))
    if config.out:
        write_csv(config.out, reports, NEARFIELD_COLUMNS, config)
    return reports


def run_field_map(config, sources=None, grid_n=700, half_width=0.75):
    """Re u and log10 normalized error on a grid_n x grid_n grid; NaN inside."""
    config.validate()
    sources = sources or default_sources()
    curve = starfish_curve()
    sol = solve_problem(config, config.n_pan[-1], sources, curve)
    z = cartesian_grid(grid_n, half_width)
    inside = point_in_interior(curve, z)
    ext = z[~inside]
    exact = exact_field(sources, config.k, ext)
    u = evaluate_field(sol.op, sol.rho, ext).u
    re_u = np.full(z.shape, np.nan)
    err = np.full(z.shape, np.nan)
    re_u[~inside] = u.real
    with np.errstate(divide="ignore"):
        err[~inside] = np.log10(np.abs(u - exact) / np.abs(exact).max())
    if config.out:
        write_field_map(config.out, re_u, err, half_width, config)
    return re_u, err


def run_eta_study(config, sources=None, include_low_k=True):
    """GMRES iteration counts for eta in {k/2, k, -k}, plus k=2.8 at tol 1e-12."""
    config.validate()
    rows = []
    for rule in ("k/2", "k", "-k"):
        cfg = replace(config, eta=rule, n_pan=[config.n_pan[-1]])
        sol = solve_problem(cfg, cfg.n_pan[0], sources)
        rows.append({"k": cfg.k, "eta": rule, "tol": cfg.tol, "n_unknowns": sol.op.n,
                     "gmres_iters": sol.iterations, "converged": sol.converged})
    if include_low_k:
        cfg = replace(config, k=2.8, eta="k/2", tol=1e-12, n_pan=[config.n_pan[-1]])
        sol = solve_problem(cfg, cfg.n_pan[0], sources)
        rows.append({"k": 2.8, "eta": "k/2", "tol": 1e-12, "n_unknowns": sol.op.n,
                     "gmres_iters": sol.iterations, "converged": sol.converged})
    if config.out:
        write_csv(config.out, rows, ETA_COLUMNS, config)
    return rows


FARFIELD_COLUMNS = ("n_pan", "n_unknowns", "max_rel_err", "gmres_iters", "assemble_s", "solve_s", "eval_s")
NEARFIELD_COLUMNS = ("n_pan", "n_unknowns", "n_points", "avg_norm_err", "max_norm_err", "gmres_iters")
ETA_COLUMNS = ("k", "eta", "tol", "n_unknowns", "gmres_iters", "converged")


def _header(config):
    cfg = asdict(config)
    return [f"# {key}: {json.dumps(cfg[key])}" for key in cfg if key != "out"]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, rows, columns, config):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = _header(config) + [",".join(columns)]
    for row in rows:
        get = row.get if isinstance(row, dict) else lambda c, r=row: getattr(r, c)
        lines.append(",".join(_fmt(get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_field_map(out, re_u, err, half_width, config):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    stem = str(out.with_suffix("")) if out.suffix in (".f64", ".csv") else str(out)
    np.ascontiguousarray(re_u, dtype="<f8").tofile(stem + ".f64")
    np.ascontiguousarray(err, dtype="<f8").tofile(stem + ".err.f64")
    meta = _header(config) + [
        f"rows: {re_u.shape[0]}",
        f"cols: {re_u.shape[1]}",
        f"x_range: {-half_width} {half_width}",
        f"y_range: {-half_width} {half_width}",
        "order: row-major, row index runs along y, little-endian float64",
        "mask_value: NaN (interior points)",
        "files: .f64 holds Re u, .err.f64 holds log10 of |error| / max |u|",
    ]
    Path(stem + ".meta").write_text("\n".join(meta) + "\n")
    return stem
