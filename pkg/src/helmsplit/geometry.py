"""Closed curves, panel meshes and coarse/fine discretization grids.

Points in the plane are stored as complex numbers ``x + 1j*y`` throughout.
Curves are traversed counterclockwise and the normal ``-1j * velocity/speed``
points out of the enclosed domain.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .interpolation import gauss_legendre


class MeshError(ValueError):
    pass


class NewtonError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Curve:
    """Closed 2*pi-periodic curve with analytic first and second derivatives.

    ``radius`` is the radial function r(theta) for curves that are starlike
    about the origin; it is only used for inside/outside classification.
    """

    position: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    acceleration: Callable[[np.ndarray], np.ndarray]
    radius: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "curve"

    def speed(self, t):
        return np.abs(self.velocity(t))

    def normal(self, t):
        v = self.velocity(t)
        return -1j * v / np.abs(v)


def starfish_curve():
    """Five-armed starfish r(t) = (9/20)(1 + (20/81) sin 5t)(cos t, sin t)."""
    a, b = 9.0 / 20.0, 20.0 / 81.0

    def rad(t):
        return a * (1.0 + b * np.sin(5.0 * t))

    def drad(t):
        return 5.0 * a * b * np.cos(5.0 * t)

    def ddrad(t):
        return -25.0 * a * b * np.sin(5.0 * t)

    def position(t):
        t = np.asarray(t, dtype=float)
        return rad(t) * np.exp(1j * t)

    def velocity(t):
        t = np.asarray(t, dtype=float)
        return (drad(t) + 1j * rad(t)) * np.exp(1j * t)

    def acceleration(t):
        t = np.asarray(t, dtype=float)
        return (ddrad(t) + 2j * drad(t) - rad(t)) * np.exp(1j * t)

    return Curve(position, velocity, acceleration, radius=rad, name="starfish")


def circle_curve(radius=1.0):
    def position(t):
        return radius * np.exp(1j * np.asarray(t, dtype=float))

    def velocity(t):
        return 1j * radius * np.exp(1j * np.asarray(t, dtype=float))

    def acceleration(t):
        return -radius * np.exp(1j * np.asarray(t, dtype=float))

    def rad(t):
        return np.full(np.shape(t), float(radius))

    return Curve(position, velocity, acceleration, radius=rad, name="circle")


class ArcLength:
    """Arclength sigma(t) measured from t = -pi, and its inverse.

    sigma is evaluated with composite Gauss-Legendre quadrature of the
    speed; the inverse uses Newton's method with bisection as a fallback.
    """

    def __init__(self, curve, n_aux=64, order=32):
        self.curve = curve
        self.breaks = np.linspace(-np.pi, np.pi, n_aux + 1)
        self._x, self._w = gauss_legendre(order)
        h = np.diff(self.breaks)
        t = self.breaks[:-1, None] + 0.5 * h[:, None] * (self._x + 1.0)
        seg = 0.5 * h * (curve.speed(t) @ self._w)
        self._cum = np.concatenate(([0.0], np.cumsum(seg)))
        self.length = self._cum[-1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        j = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, len(self.breaks) - 2)
        a = self.breaks[j]
        h = t - a
        tq = a[..., None] + 0.5 * h[..., None] * (self._x + 1.0)
        part = 0.5 * h * (self.curve.speed(tq) @ self._w)
        return self._cum[j] + part

    def inverse(self, sigma, tol=1e-15, maxiter=30):
        sigma = np.asarray(sigma, dtype=float)
        # initial guess from piecewise-linear interpolation of the table
        t = np.interp(sigma, self._cum, self.breaks)
        lo = np.full(sigma.shape, -np.pi)
        hi = np.full(sigma.shape, np.pi)
        scale = tol * self.length
        for _ in range(maxiter):
            f = self(t) - sigma
            lo = np.where(f < 0, np.maximum(lo, t), lo)
            hi = np.where(f > 0, np.minimum(hi, t), hi)
            done = np.abs(f) <= scale
            if np.all(done):
                return t
            tn = t - f / self.curve.speed(t)
            bad = (tn < lo) | (tn > hi)
            t = np.where(done, t, np.where(bad, 0.5 * (lo + hi), tn))
        f = self(t) - sigma
        if np.all(np.abs(f) <= 8 * scale):
            return t
        raise NewtonError(f"arclength inversion did not converge, residual {np.abs(f).max():.2e}")


@dataclass(frozen=True)
class Mesh:
    """Panel breakpoints in the curve parameter t plus panel arclengths."""

    breakpoints: np.ndarray
    arclengths: np.ndarray
    kind: str = "parameter"

    @property
    def n_pan(self):
        return len(self.breakpoints) - 1


def equal_parameter_mesh(curve, n_pan, arclength=None):
    if n_pan < 3:
        raise MeshError("a closed curve needs at least 3 panels")
    arclength = arclength or ArcLength(curve)
    br = -np.pi + 2.0 * np.pi * np.arange(n_pan + 1) / n_pan
    br[-1] = np.pi
    return Mesh(br, np.diff(arclength(br)), "parameter")


def equal_arclength_mesh(curve, n_pan, tol=1e-15, arclength=None):
    if n_pan < 3:
        raise MeshError("a closed curve needs at least 3 panels")
    if tol < 1e-15:
        raise MeshError("tol below 1e-15 is not attainable")
    arclength = arclength or ArcLength(curve)
    targets = arclength.length * np.arange(1, n_pan) / n_pan
    inner = arclength.inverse(targets, tol=tol)
    br = np.concatenate(([-np.pi], inner, [np.pi]))
    return Mesh(br, np.diff(arclength(br)), "arclength")


@dataclass(frozen=True)
class Grid:
    """Quadrature grid on a paneled curve.

    ``nodes``/``weights``/``breakpoints`` live in the discretization
    parameter: the curve parameter t, or arclength sigma for unit-speed
    grids. ``t`` always holds the curve parameter of each node and
    ``tbreaks`` the curve-parameter panel endpoints. Velocity and
    acceleration are derivatives with respect to the discretization
    parameter, so ``speed`` is identically one on unit-speed grids.
    """

    nodes: np.ndarray
    weights: np.ndarray
    t: np.ndarray
    points: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    breakpoints: np.ndarray
    tbreaks: np.ndarray
    arclengths: np.ndarray
    endpoints: np.ndarray
    n_pt: int
    unit_speed: bool = False

    @property
    def n(self):
        return len(self.nodes)

    @property
    def n_pan(self):
        return len(self.breakpoints) - 1

    @property
    def speed(self):
        return np.abs(self.velocity)

    @property
    def normals(self):
        return -1j * self.velocity / np.abs(self.velocity)

    @property
    def curvature_term(self):
        """(nu . r'') / |r'|^2 at each node; signed curvature under unit speed."""
        nu = self.normals
        return (nu.real * self.acceleration.real + nu.imag * self.acceleration.imag) / self.speed**2

    def panel(self, p):
        return slice(p * self.n_pt, (p + 1) * self.n_pt)

    def panel_lengths(self):
        return np.diff(self.breakpoints)


def _make_grid(curve, mesh, n_pt, unit_speed, arclength):
    x, w = gauss_legendre(n_pt)
    if unit_speed:
        br = arclength(mesh.breakpoints) - arclength(mesh.breakpoints[0])
        br[-1] = arclength.length
    else:
        br = np.asarray(mesh.breakpoints, dtype=float)
    h = np.diff(br)
    nodes = (br[:-1, None] + 0.5 * h[:, None] * (x + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w).ravel()
    if unit_speed:
        t = arclength.inverse(nodes + arclength(mesh.breakpoints[0]))
        v = curve.velocity(t)
        a = curve.acceleration(t)
        s = np.abs(v)
        ds = (v.real * a.real + v.imag * a.imag) / s
        vel = v / s
        acc = a / s**2 - v * ds / s**3
    else:
        t = nodes
        vel = curve.velocity(t)
        acc = curve.acceleration(t)
    grid = Grid(nodes=nodes, weights=weights, t=t, points=curve.position(t),
                velocity=vel, acceleration=acc, breakpoints=br,
                tbreaks=np.asarray(mesh.breakpoints, dtype=float),
                arclengths=np.asarray(mesh.arclengths, dtype=float),
                endpoints=np.stack([curve.position(mesh.breakpoints[:-1]),
                                    curve.position(mesh.breakpoints[1:])], axis=1),
                n_pt=n_pt, unit_speed=unit_speed)
    return grid


def build_grids(curve, mesh, n_pt, unit_speed=False, arclength=None):
    """Coarse (n_pt per panel) and fine (2 n_pt per panel) grids on ``mesh``."""
    if unit_speed and arclength is None:
        arclength = ArcLength(curve)
    coarse = _make_grid(curve, mesh, n_pt, unit_speed, arclength)
    fine = _make_grid(curve, mesh, 2 * n_pt, unit_speed, arclength)
    return coarse, fine


def point_in_interior(curve, p):
    """True where ``p`` lies strictly inside a curve that is starlike about 0."""
    if curve.radius is None:
        raise MeshError("interior test needs a starlike curve with a radial function")
    p = np.asarray(p)
    if not np.iscomplexobj(p):
        p = np.asarray(p, dtype=float)
        p = p[..., 0] + 1j * p[..., 1]
    return np.abs(p) < curve.radius(np.angle(p))
