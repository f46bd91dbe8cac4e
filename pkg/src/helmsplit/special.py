"""Hankel functions of the first kind, orders 0 and 1, for real positive argument.

Small and moderate arguments use the Cephes routines shipped with scipy.
Above ``ASYMPTOTIC_CROSSOVER`` the Hankel asymptotic expansion is summed
directly and the phase ``exp(i x)`` is taken from correctly reduced
``cos``/``sin`` so that relative accuracy does not degrade with ``x``.

Also provides the "log-free" parts of Y0 and Y1,

    Y0_hat(x) = Y0(x) - (2/pi) J0(x) log(x/2)
    Y1_hat(x) = Y1(x) - (2/pi) J1(x) log(x/2) + 2/(pi x)

which are entire functions of ``x`` and are what the kernel splits need.
"""

import math

import numpy as np
from scipy import special as _sp

EULER_GAMMA = 0.57721566490153286061

ASYMPTOTIC_CROSSOVER = 25.0
SERIES_CROSSOVER = 2.0

_N_ASYMPTOTIC = 32
_N_SERIES = 24
_SQRT_HALF = math.sqrt(0.5)


def _asymptotic_coefficients(order, nterms):
    mu = 4.0 * order * order
    a = [1.0]
    for k in range(1, nterms):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_A0 = _asymptotic_coefficients(0, _N_ASYMPTOTIC)
_A1 = _asymptotic_coefficients(1, _N_ASYMPTOTIC)

# harmonic numbers H_m and psi(m+1) + psi(m+2) for the log-free series
_HARMONIC = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, _N_SERIES + 1))))
_PSI_SUM = 2.0 * (-EULER_GAMMA) + _HARMONIC[:_N_SERIES] + _HARMONIC[1:_N_SERIES + 1]
_FACT = np.array([math.factorial(m) for m in range(_N_SERIES + 2)], dtype=float)


def _pq(coeffs, x):
    # H_nu(x) = sqrt(2/(pi x)) (P + iQ) exp(i(x - pi/4 - nu pi/2)), Horner in 1/x^2
    y = -1.0 / (x * x)
    even, odd = coeffs[0::2], coeffs[1::2]
    p = np.full(x.shape, even[-1])
    for c in even[-2::-1]:
        p = p * y + c
    q = np.full(x.shape, odd[-1])
    for c in odd[-2::-1]:
        q = q * y + c
    return p, q / x


def _hankel_asymptotic_pair(x):
    """H0(x) and H1(x) from the asymptotic expansion, x >= ASYMPTOTIC_CROSSOVER."""
    h0 = np.empty(x.shape, dtype=complex)
    h1 = np.empty(x.shape, dtype=complex)
    # terms needed for 1e-17: 20 at x = 25, 13 at x = 50
    for sel, nterms in ((x < 50.0, 20), (x >= 50.0, 14)):
        if not np.any(sel):
            continue
        xs = x[sel]
        amp = np.sqrt(2.0 / (np.pi * xs))
        c, sn = np.cos(xs), np.sin(xs)
        # exp(i(x - pi/4)) and exp(i(x - 3 pi/4)) = -i exp(i(x - pi/4))
        e_re = (c + sn) * _SQRT_HALF
        e_im = (sn - c) * _SQRT_HALF
        p0, q0 = _pq(_A0[:nterms], xs)
        p1, q1 = _pq(_A1[:nterms], xs)
        re0 = p0 * e_re - q0 * e_im
        im0 = p0 * e_im + q0 * e_re
        re1 = p1 * e_re - q1 * e_im
        im1 = p1 * e_im + q1 * e_re
        h0[sel] = amp * (re0 + 1j * im0)
        h1[sel] = amp * (im1 - 1j * re1)
    return h0, h1


def bessel_jy(x):
    """Return ``(J0, Y0, J1, Y1)`` at positive ``x`` (no validation)."""
    x = np.asarray(x, dtype=float)
    big = x >= ASYMPTOTIC_CROSSOVER
    if not np.any(big):
        return _sp.j0(x), _sp.y0(x), _sp.j1(x), _sp.y1(x)
    out = [np.empty(x.shape) for _ in range(4)]
    small = ~big
    if np.any(small):
        xs = x[small]
        for arr, f in zip(out, (_sp.j0, _sp.y0, _sp.j1, _sp.y1)):
            arr[small] = f(xs)
    h0, h1 = _hankel_asymptotic_pair(x[big])
    out[0][big], out[1][big] = h0.real, h0.imag
    out[2][big], out[3][big] = h1.real, h1.imag
    return tuple(out)


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("NaN argument")
    if np.any(x <= 0.0):
        raise ValueError("Hankel functions need a strictly positive argument")
    return x


def bessel_j0(x):
    """J0(x) for x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("NaN argument")
    if np.any(x < 0.0):
        raise ValueError("negative argument")
    out = np.ones(x.shape)
    pos = x > 0
    out[pos] = bessel_jy(x[pos])[0]
    return out[()] if out.ndim == 0 else out


def hankel1_0(x):
    """H_0^(1)(x) = J0(x) + i Y0(x) for x > 0."""
    x = _check_positive(x)
    j0, y0, _, _ = bessel_jy(x)
    return j0 + 1j * y0


def hankel1_1(x):
    """H_1^(1)(x) = J1(x) + i Y1(x) for x > 0."""
    x = _check_positive(x)
    _, _, j1, y1 = bessel_jy(x)
    return j1 + 1j * y1


def digamma_one():
    """psi(1), i.e. minus the Euler-Mascheroni constant."""
    return -EULER_GAMMA


def _y0_hat_series(x):
    q = -0.25 * x * x
    term = np.ones_like(x)
    s_j = np.ones_like(x)
    s_h = np.zeros_like(x)
    for m in range(1, _N_SERIES):
        term = term * q / (m * m)
        s_j = s_j + term
        s_h = s_h + _HARMONIC[m] * term
    return (2.0 / np.pi) * (EULER_GAMMA * s_j - s_h)


def _y1_hat_series(x):
    half = 0.5 * x
    q = -half * half
    term = half.copy()
    s = _PSI_SUM[0] * term
    for m in range(1, _N_SERIES):
        term = term * q / (m * (m + 1))
        s = s + _PSI_SUM[m] * term
    return -s / np.pi


def y0_hat(x, j0=None, y0=None):
    """Y0(x) - (2/pi) J0(x) log(x/2); finite at x = 0 where it equals 2*gamma/pi.

    ``j0``/``y0`` may be passed in when already available.
    """
    x = np.asarray(x, dtype=float)
    if j0 is None or y0 is None:
        j0, y0, _, _ = bessel_jy(np.where(x > 0, x, 1.0))
    small = x < SERIES_CROSSOVER
    with np.errstate(divide="ignore", invalid="ignore"):
        out = y0 - (2.0 / np.pi) * j0 * np.log(0.5 * x)
    if np.any(small):
        out = np.where(small, _y0_hat_series(np.where(small, x, 0.0)), out)
    return out


def y1_hat(x, j1=None, y1=None):
    """Y1(x) - (2/pi) J1(x) log(x/2) + 2/(pi x); vanishes at x = 0."""
    x = np.asarray(x, dtype=float)
    if j1 is None or y1 is None:
        _, _, j1, y1 = bessel_jy(np.where(x > 0, x, 1.0))
    small = x < SERIES_CROSSOVER
    with np.errstate(divide="ignore", invalid="ignore"):
        out = y1 - (2.0 / np.pi) * j1 * np.log(0.5 * x) + 2.0 / (np.pi * x)
    if np.any(small):
        out = np.where(small, _y1_hat_series(np.where(small, x, 0.0)), out)
    return out
