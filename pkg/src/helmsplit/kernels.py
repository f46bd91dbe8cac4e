"""Helmholtz layer kernels and their explicit smooth/log/Cauchy splits.

With Phi_k = (i/4) H_0^(1)(k|r - r'|) the single- and double-layer kernels are

    S(r, r') = 2 Phi_k = (i/2) H_0^(1)(k d)
    K(r, r') = 2 dPhi_k/dnu' = -(ik/2) H_1^(1)(k d) c / d,   c = (r' - r).nu'

and each split reads

    G = G_0 + log|r - r'| G_L + (c / d^2) G_C .

The log factors are -(2/pi) Im{G}. Smooth parts are computed from the
log-free Bessel combinations in :mod:`helmsplit.special` so that no large
terms cancel as r' -> r. The combined kernel is M = K - i eta S.
"""

from dataclasses import dataclass

import numpy as np

from .special import bessel_jy, digamma_one, y0_hat, y1_hat


@dataclass
class KernelSplitParts:
    """Smooth part, log coefficient and Cauchy coefficient of a kernel."""

    smooth: np.ndarray
    log_factor: np.ndarray
    cauchy_factor: np.ndarray

    def reassemble(self, r, rp, nup=None):
        d = np.abs(rp - r)
        out = self.smooth + np.log(d) * self.log_factor
        if nup is not None and np.any(self.cauchy_factor != 0):
            out = out + _cnum(r, rp, nup) / d**2 * self.cauchy_factor
        return out

    def __add__(self, other):
        return KernelSplitParts(self.smooth + other.smooth,
                                self.log_factor + other.log_factor,
                                self.cauchy_factor + other.cauchy_factor)

    def scale(self, a):
        return KernelSplitParts(a * self.smooth, a * self.log_factor, a * self.cauchy_factor)


def _cnum(r, rp, nup):
    diff = rp - r
    return diff.real * nup.real + diff.imag * nup.imag


def _jy(d, k):
    x = k * d
    j0, y0, j1, y1 = bessel_jy(np.where(x > 0, x, 1.0))
    return x, j0, y0, j1, y1


def kernel_S(r, rp, k):
    d = np.abs(np.asarray(rp) - np.asarray(r))
    _, j0, y0, _, _ = _jy(d, k)
    return 0.5j * (j0 + 1j * y0)


def kernel_K(r, rp, nup, k):
    r, rp, nup = np.asarray(r), np.asarray(rp), np.asarray(nup)
    d = np.abs(rp - r)
    _, _, _, j1, y1 = _jy(d, k)
    return -0.5j * k * (j1 + 1j * y1) * _cnum(r, rp, nup) / d


def kernel_M(r, rp, nup, k, eta):
    return kernel_K(r, rp, nup, k) - 1j * eta * kernel_S(r, rp, k)


def _split_S(x, j0, y0, k):
    log_factor = -j0 / np.pi
    smooth = -0.5 * y0_hat(x, j0, y0) - j0 * np.log(0.5 * k) / np.pi + 0.5j * j0
    return KernelSplitParts(smooth, log_factor.astype(complex), np.zeros_like(smooth))


def _split_K(x, j1, y1, k, c_over_d, d, field):
    yh = y1_hat(x, j1, y1)
    smooth = 0.5 * k * c_over_d * (yh + (2.0 / np.pi) * j1 * np.log(0.5 * k) - 1j * j1)
    log_factor = (k / np.pi) * j1 * c_over_d
    if field:
        cauchy = np.full(smooth.shape, -1.0 / np.pi, dtype=complex)
    else:
        smooth = smooth - c_over_d / (np.pi * d)
        cauchy = np.zeros_like(smooth)
    return KernelSplitParts(smooth, log_factor.astype(complex), cauchy)


def split_S(r, rp, k):
    """Split of S for r != r'. Cauchy factor is zero."""
    d = np.abs(np.asarray(rp) - np.asarray(r))
    x, j0, y0, _, _ = _jy(d, k)
    return _split_S(x, j0, y0, k)


def split_K_boundary(r, rp, nup, k):
    """Split of K for r, r' both on the curve; the Cauchy-like term is smooth there
    and is folded into the smooth part."""
    r, rp, nup = np.asarray(r), np.asarray(rp), np.asarray(nup)
    d = np.abs(rp - r)
    x, _, _, j1, y1 = _jy(d, k)
    return _split_K(x, j1, y1, k, _cnum(r, rp, nup) / d, d, field=False)


def split_K_field(r, rp, nup, k):
    """Split of K for r off the curve; Cauchy factor is -1/pi."""
    r, rp, nup = np.asarray(r), np.asarray(rp), np.asarray(nup)
    d = np.abs(rp - r)
    x, _, _, j1, y1 = _jy(d, k)
    return _split_K(x, j1, y1, k, _cnum(r, rp, nup) / d, d, field=True)


def diag_limit_S(k):
    """Limits r' -> r of the smooth and log parts of S."""
    smooth = 0.5j - (np.log(abs(0.5 * k)) - digamma_one()) / np.pi
    return KernelSplitParts(np.asarray(smooth), np.asarray(-1.0 / np.pi + 0j), np.asarray(0j))


def diag_limit_K(curvature_term):
    """Limits r' -> r of the smooth and log parts of K on the curve.

    ``curvature_term`` is (nu . r'') / |r'|^2 at the point.
    """
    c = np.asarray(curvature_term, dtype=float)
    return KernelSplitParts(c / (2.0 * np.pi) + 0j, np.zeros(c.shape, complex), np.zeros(c.shape, complex))


def combined_kernel(r, rp, nup, k, eta, context="boundary"):
    """Split parts of M = K - i eta S, for ``context`` 'boundary' or 'field'.

    Evaluates the Bessel functions once for both kernels. Also returns the
    direct kernel value.
    """
    if context not in ("boundary", "field"):
        raise ValueError("context must be 'boundary' or 'field'")
    r, rp, nup = np.asarray(r), np.asarray(rp), np.asarray(nup)
    d = np.abs(rp - r)
    x, j0, y0, j1, y1 = _jy(d, k)
    c_over_d = _cnum(r, rp, nup) / d
    s = _split_S(x, j0, y0, k)
    kk = _split_K(x, j1, y1, k, c_over_d, d, field=(context == "field"))
    parts = kk + s.scale(-1j * eta)
    direct = (-0.5j * k * (j1 + 1j * y1) * c_over_d) - 1j * eta * (0.5j * (j0 + 1j * y0))
    return parts, direct


def combined_diag_limit(k, eta, curvature_term):
    return diag_limit_K(curvature_term) + diag_limit_S(k).scale(-1j * eta)
