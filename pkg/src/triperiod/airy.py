"""Airy function ``Ai`` on ``|x| <= 100`` without special-function libraries.

Three regimes:

* ``-8 <= x <= 4``: Maclaurin series ``Ai = c1 f(x) - c2 g(x)``;
* ``x < -8``: the oscillatory asymptotic expansion, truncated at its
  smallest term (relative error below ``1e-12`` once ``zeta >= 15``);
* ``x > 4``: the steepest-descent form
  ``Ai(x) = e^{-zeta} / pi * int_0^inf exp(-sqrt(x) u^2) cos(u^3 / 3) du``
  with Gauss-Legendre quadrature, which keeps full relative accuracy in
  the exponentially small tail.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gamma

from triperiod.errors import RangeError

X_MAX = 100.0
_C1 = 3.0 ** (-2.0 / 3.0) / gamma(2.0 / 3.0)  # Ai(0)
_C2 = 3.0 ** (-1.0 / 3.0) / gamma(1.0 / 3.0)  # -Ai'(0)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)
AI_PEAK_X = -1.018792971647471  # first maximum of Ai


@lru_cache(maxsize=1)
def _u_coeffs(n: int = 40) -> np.ndarray:
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
    return u


def _maclaurin(x: np.ndarray) -> np.ndarray:
    x3 = x**3
    f = np.ones_like(x)
    g = x.copy()
    tf = np.ones_like(x)
    tg = x.copy()
    for k in range(1, 80):
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        if np.all(np.abs(tf) + np.abs(tg) < 1e-18 * (np.abs(f) + np.abs(g))):
            break
    return _C1 * f - _C2 * g


def _negative_asymptotic(x: np.ndarray) -> np.ndarray:
    r = -x
    zeta = 2.0 / 3.0 * r**1.5
    u = _u_coeffs()
    P = np.zeros_like(r)
    Q = np.zeros_like(r)
    for i, z in enumerate(zeta):
        term_prev = math.inf
        p = q = 0.0
        for k in range(len(u)):
            term = u[k] / z**k
            if term > term_prev:
                break  # optimal truncation
            term_prev = term
            sgn = (-1) ** (k // 2)
            if k % 2 == 0:
                p += sgn * term
            else:
                q += sgn * term
        P[i], Q[i] = p, q
    theta = zeta + math.pi / 4.0
    return (np.sin(theta) * P - np.cos(theta) * Q) / (math.sqrt(math.pi) * r**0.25)


def _positive_integral(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    for i, xv in enumerate(x):
        s = math.sqrt(xv)
        # the Gaussian factor is below 1e-18 beyond u_max
        u_max = math.sqrt(42.0 / s)
        u = 0.5 * u_max * (_GL_X + 1.0)
        integral = 0.5 * u_max * np.sum(_GL_W * np.exp(-s * u * u) * np.cos(u**3 / 3.0))
        out[i] = math.exp(-2.0 / 3.0 * xv * s) / math.pi * integral
    return out


def airy(x):
    """Classical Airy function ``Ai(x)`` for real ``|x| <= 100``.

    Parameters
    ----------
    x : float or array_like

    Raises
    ------
    RangeError
        If any ``|x| > 100``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(np.abs(xa) > X_MAX):
        raise RangeError("airy is implemented for |x| <= 100")
    flat = xa.ravel()
    out = np.empty_like(flat)
    mid = (flat >= -8.0) & (flat <= 4.0)
    neg = flat < -8.0
    pos = flat > 4.0
    if mid.any():
        out[mid] = _maclaurin(flat[mid])
    if neg.any():
        out[neg] = _negative_asymptotic(flat[neg])
    if pos.any():
        out[pos] = _positive_integral(flat[pos])
    out = out.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def airy_integral(x: float, tol: float = 1e-11) -> float:
    """``(1/pi) int_0^inf cos(s^3/3 + x s) ds`` by contour rotation.

    Independent check of :func:`airy`: along ``s = r e^{i pi/6}`` the
    integrand decays like ``exp(-r^3/3)``, so a plain finite quadrature in
    ``r`` converges.
    """
    from scipy.integrate import quad

    w = complex(math.cos(math.pi / 6.0), math.sin(math.pi / 6.0))

    def integrand(r):
        s = r * w
        return (np.exp(1j * (s**3 / 3.0 + x * s)) * w).real

    val, _ = quad(integrand, 0.0, 12.0, epsabs=tol, limit=400)
    # Ai(x) = (1/2pi) int_R e^{i(s^3/3 + xs)} ds = (1/pi) Re int_0^inf ...
    return val / math.pi


def _bisect(pred, lo: float, hi: float) -> float:
    """Boundary between ``pred(lo)`` true and ``pred(hi)`` false."""
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


AI_FIRST_ZERO = -2.338107410459767


def airy_half_width(level: float = 0.5) -> float:
    """Largest ``b`` with ``|Ai(x)| >= level * Ai(0)`` on ``[-b, b]``."""
    target = level * _C1

    def above(x):
        return abs(airy(x)) >= target

    right = _bisect(above, 0.0, 4.0)
    left = _bisect(above, AI_PEAK_X, AI_FIRST_ZERO)
    return min(right, -left)


def airy_half_max_interval() -> tuple[float, float]:
    """Interval where ``Ai(x)^2`` exceeds half its global maximum.

    Contiguous around the first maximum ``x = -1.0188``.
    """
    half = 0.5 * airy(AI_PEAK_X) ** 2

    def above(x):
        return airy(x) ** 2 >= half

    return _bisect(above, AI_PEAK_X, AI_FIRST_ZERO), _bisect(above, AI_PEAK_X, 4.0)
