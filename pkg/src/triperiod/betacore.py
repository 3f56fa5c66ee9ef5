"""Beta integrals ``int |h(s-c)|^{sigma+lambda} |h(s+c)|^{sigma'+lambda} phi(s) ds``.

Three flavours share one quadrature helper:

* :func:`std_beta` -- ``h(s) = s``, ``c = 1``;
* :func:`scaled_beta` -- ``h(s) = s``, ``c = a`` small;
* :func:`general_beta` -- odd ``h`` with ``h' > 0`` near 0.

The phase ``t ln|h(s-c) h(s+c)|`` has a single nondegenerate stationary
point at ``s = 0`` (``h`` odd), which gives the main term

    (pi / (i sgn t))^{1/2} |t|^{-1/2} phi(0) |h(c)|^{sigma + sigma' + 1 + 2 lambda}

for ``h(s) = s``-like normalisation (see :func:`general_beta_main` for
the general Jacobian factor).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from triperiod.errors import DomainError
from triperiod.oscquad import QuadResult, SingularitySpec, integrate_line

WORK_EPS = 0.5  # admissible |c| for h = sin
WORK_D = 0.5  # admissible support [-d, d]


@dataclass(frozen=True)
class Amplitude:
    """Smooth amplitude with compact support ``[lo, hi]``.

    ``func`` must be vectorized; values outside the support are ignored.
    """

    func: Callable
    support: tuple[float, float]
    name: str = field(default="", compare=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        out = np.zeros(x.shape, dtype=complex)
        inside = (x > lo) & (x < hi)
        if inside.any():
            out[inside] = self.func(x[inside])
        return out[()] if out.ndim == 0 else out

    def scaled(self, a: float) -> "Amplitude":
        """``y -> phi(a y)``."""
        lo, hi = self.support
        f = self.func
        return Amplitude(lambda y: f(a * np.asarray(y)), (lo / a, hi / a), self.name)

    def cnorm(self, order: int, n: int = 4001) -> float:
        """Sampled ``max_{j <= order} sup |phi^(j)|`` by finite differences."""
        lo, hi = self.support
        x = np.linspace(lo, hi, n)
        v = self(x)
        best = float(np.max(np.abs(v)))
        for _ in range(order):
            v = np.gradient(v, x)
            best = max(best, float(np.max(np.abs(v))))
        return best

    def variation(self, n: int = 4001) -> float:
        """Total variation ``int |phi'|`` on the support."""
        lo, hi = self.support
        v = self(np.linspace(lo, hi, n))
        return float(np.sum(np.abs(np.diff(v))))


def bump(radius: float = 0.9, center: float = 0.0, height: complex = 1.0) -> Amplitude:
    """``height * exp(1 - 1 / (1 - ((x - center)/radius)^2))``, equal to ``height`` at the center."""

    def f(x):
        u = (np.asarray(x, dtype=float) - center) / radius
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(np.abs(u) < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - u * u, 1e-300)), 0.0)
        return height * out

    return Amplitude(f, (center - radius, center + radius), f"bump({radius},{center})")


def _check_exponents(sigma: complex, sigma_p: complex):
    sigma, sigma_p = complex(sigma), complex(sigma_p)
    if sigma.real <= -1.0 or sigma_p.real <= -1.0:
        raise DomainError("need Re sigma, Re sigma' > -1")
    if not math.isclose(sigma.real + sigma_p.real, -1.0, abs_tol=1e-12):
        raise DomainError("need Re sigma + Re sigma' = -1")
    return sigma, sigma_p


def _imaginary_t(lam) -> float:
    z = complex(lam)
    if z.real != 0.0:
        raise DomainError("lambda must be purely imaginary")
    return z.imag


def _segments(lo: float, hi: float, s: float) -> list[float]:
    """Breakpoints ``0, +-s/2, +-s, +-s 2^k`` clipped to ``[lo, hi]``."""
    pts = {0.0, 0.5 * s, -0.5 * s, s, -s}
    r = s
    while r < max(abs(lo), abs(hi)):
        pts.update((r, -r))
        r *= 2.0
    inner = sorted(p for p in pts if lo < p < hi)
    return [lo] + inner + [hi]


def _two_point_integral(g: Callable, e_minus: complex, e_plus: complex, s: float, t: float,
                        support: tuple[float, float], tol: float) -> QuadResult:
    """Integrate ``g(x, x - s, x + s)`` with power singularities at ``-s`` and ``+s``.

    The support is cut at a geometric ladder around the singular points so
    that each segment gets a panel-width cap matched to its local
    frequency ``2 |t| |y| / |y^2 - s^2|``. Segments touching a singular
    point are integrated in the offset from that point, which ``g``
    receives exactly rather than as a rounded difference.
    """
    lo, hi = support
    edges = _segments(lo, hi, s)
    n_seg = len(edges) - 1
    total = QuadResult(0.0, 0.0, 0, True)
    for u, v in zip(edges[:-1], edges[1:]):
        probe = np.array([u, v, 0.5 * (u + v)])
        far = np.abs(np.abs(probe) - s) > 0.25 * s
        y = probe[far] if far.any() else np.array([0.5 * s])
        fr = float(np.max(2.0 * abs(t) * np.abs(y) / np.abs(y * y - s * s))) + 1.0
        if u == s or v == s:
            fr = max(fr, 2.0 * abs(t) / (1.5 * s))
            r = integrate_line(lambda d: g(s + d, d, 2.0 * s + d), (u - s, v - s),
                               SingularitySpec([0.0], [e_plus]), tol=tol / n_seg, freq=fr)
        elif u == -s or v == -s:
            fr = max(fr, 2.0 * abs(t) / (1.5 * s))
            r = integrate_line(lambda d: g(d - s, d - 2.0 * s, d), (u + s, v + s),
                               SingularitySpec([0.0], [e_minus]), tol=tol / n_seg, freq=fr)
        else:
            r = integrate_line(lambda x: g(x, x - s, x + s), (u, v), None, tol=tol / n_seg, freq=fr)
        total = total + r
    return total


def std_beta(lam, sigma: complex, sigma_p: complex, phi: Amplitude, tol: float = 1e-10) -> QuadResult:
    """``int |y-1|^{sigma+lambda} |y+1|^{sigma'+lambda} phi(y) dy`` by quadrature."""
    sigma, sigma_p = _check_exponents(sigma, sigma_p)
    t = _imaginary_t(lam)
    lam = 1j * t
    e1, e2 = sigma + lam, sigma_p + lam

    def g(y, dm, dp):
        return np.exp(e1 * np.log(np.abs(dm)) + e2 * np.log(np.abs(dp))) * phi(y)

    return _two_point_integral(g, e2, e1, 1.0, t, phi.support, tol)


def alpha_constant(t: float) -> complex:
    """``(pi / i)^{1/2}`` for ``t > 0`` and its conjugate for ``t < 0``."""
    return cmath.sqrt(math.pi / (1j if t >= 0 else -1j))


def std_beta_main(lam, sigma: complex, sigma_p: complex, phi: Amplitude | complex) -> complex:
    """Stationary-phase main term ``(pi/i)^{1/2} phi(0) |lambda|^{-1/2}``."""
    _check_exponents(sigma, sigma_p)
    t = _imaginary_t(lam)
    if t == 0:
        raise DomainError("the main term needs lambda != 0")
    phi0 = complex(phi(0.0)) if callable(phi) else complex(phi)
    return alpha_constant(t) * phi0 * abs(t) ** -0.5


def scaled_beta(lam, sigma: complex, sigma_p: complex, a: float, psi: Amplitude, tol: float = 1e-10,
                form: str = "direct") -> QuadResult:
    """``int |x-a|^{sigma+lambda} |x+a|^{sigma'+lambda} psi(x) dx``.

    Parameters
    ----------
    form : {"direct", "scaled"}
        ``"direct"`` integrates in ``x``; ``"scaled"`` uses the identity
        ``H_a(psi) = a^{sigma+sigma'+1+2 lambda} std_beta(psi(a .))``.
    """
    sigma, sigma_p = _check_exponents(sigma, sigma_p)
    if not a > 0:
        raise DomainError("a must be positive")
    t = _imaginary_t(lam)
    lam = 1j * t
    if form == "scaled":
        factor = np.exp((sigma + sigma_p + 1.0 + 2.0 * lam) * math.log(a))
        return std_beta(lam, sigma, sigma_p, psi.scaled(a), tol / abs(factor)).scaled(factor)
    if form != "direct":
        raise DomainError(f"unknown form {form!r}")
    e1, e2 = sigma + lam, sigma_p + lam

    def g(x, dm, dp):
        return np.exp(e1 * np.log(np.abs(dm)) + e2 * np.log(np.abs(dp))) * psi(x)

    return _two_point_integral(g, e2, e1, a, t, psi.support, tol)


def scaled_beta_main(lam, sigma: complex, sigma_p: complex, a: float, psi0: complex) -> complex:
    """``a^{sigma+sigma'+1+2 lambda} (pi/i)^{1/2} psi(0) |lambda|^{-1/2}``."""
    t = _imaginary_t(lam)
    factor = np.exp((complex(sigma) + complex(sigma_p) + 1.0 + 2.0j * t) * math.log(a))
    return complex(factor * std_beta_main(lam, sigma, sigma_p, psi0))


def _check_h(h: Callable, span: float):
    s = np.linspace(-span, span, 2049)
    hs = np.asarray(h(s), dtype=float)
    if not np.allclose(hs, -np.asarray(h(-s), dtype=float), atol=1e-12, rtol=1e-10):
        raise DomainError("h must be odd")
    if np.any(np.diff(hs) <= 0):
        raise DomainError("h' must be positive on the working interval")


def beta_change_of_vars(h: Callable, c: float, span: float = WORK_EPS + WORK_D):
    """Normal form ``h(s-c) h(s+c) = x^2 - a^2``.

    Returns
    -------
    a : float
        ``h(c)``.
    x_map : callable
        ``s -> sgn(s) sqrt(h(s-c) h(s+c) + h(c)^2)``, smooth across 0.
    """
    _check_h(h, span)
    a = float(h(c))

    def x_map(s):
        s = np.asarray(s, dtype=float)
        val = np.asarray(h(s - c), dtype=float) * np.asarray(h(s + c), dtype=float) + a * a
        out = np.sign(s) * np.sqrt(np.maximum(val, 0.0))
        return out[()] if out.ndim == 0 else out

    return a, x_map


def general_beta(h: Callable, lam, sigma: complex, sigma_p: complex, c: float, phi: Amplitude,
                 tol: float = 1e-10) -> QuadResult:
    """``int |h(s-c)|^{sigma+lambda} |h(s+c)|^{sigma'+lambda} phi(s) ds``."""
    sigma, sigma_p = _check_exponents(sigma, sigma_p)
    t = _imaginary_t(lam)
    if c == 0 or abs(c) >= WORK_EPS:
        raise DomainError(f"need 0 < |c| < {WORK_EPS}")
    lo, hi = phi.support
    if lo < -WORK_D - 1e-12 or hi > WORK_D + 1e-12:
        raise DomainError(f"phi must be supported in [-{WORK_D}, {WORK_D}]")
    _check_h(h, WORK_EPS + WORK_D)
    lam = 1j * t
    e1, e2 = sigma + lam, sigma_p + lam
    c = abs(c)

    def g(s, dm, dp):
        return np.exp(e1 * np.log(np.abs(h(dm))) + e2 * np.log(np.abs(h(dp)))) * phi(s)

    return _two_point_integral(g, e2, e1, c, t, phi.support, tol)


def _inverse(x_map: Callable, lo: float, hi: float) -> Callable:
    """Vectorized inverse of an increasing ``x_map`` on ``[lo, hi]`` by bisection."""

    def s_of_x(x):
        x = np.asarray(x, dtype=float)
        a = np.full(x.shape, lo)
        b = np.full(x.shape, hi)
        for _ in range(64):
            m = 0.5 * (a + b)
            below = x_map(m) < x
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        return 0.5 * (a + b)

    return s_of_x


def pullback_amplitude(h: Callable, sigma: complex, sigma_p: complex, c: float, phi: Amplitude, step: float = 1e-5):
    """Amplitude ``psi`` on the ``x`` side of the normal form.

    ``psi(x) = phi(s(x)) |g1|^sigma |g2|^sigma' |ds/dx|`` with
    ``h(s-c) = (x-a) g1`` and ``h(s+c) = (x+a) g2``. The removable
    singularities of ``g1`` at ``x = a`` and ``g2`` at ``x = -a`` are filled
    by ``h'(s -+ c) ds/dx``.
    """
    sigma, sigma_p = complex(sigma), complex(sigma_p)
    a, x_map = beta_change_of_vars(h, c)
    lo, hi = phi.support
    x_lo, x_hi = float(x_map(lo)), float(x_map(hi))
    s_of_x = _inverse(x_map, lo - 1e-9, hi + 1e-9)

    def dh(u):
        return (np.asarray(h(u + step)) - np.asarray(h(u - step))) / (2.0 * step)

    def func(x):
        x = np.asarray(x, dtype=float)
        s = s_of_x(x)
        dxds = (x_map(s + step) - x_map(s - step)) / (2.0 * step)
        dsdx = 1.0 / dxds
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = np.where(np.abs(x - a) > 1e-7, np.asarray(h(s - c)) / (x - a), dh(s - c) * dsdx)
            g2 = np.where(np.abs(x + a) > 1e-7, np.asarray(h(s + c)) / (x + a), dh(s + c) * dsdx)
        amp = np.exp(sigma * np.log(np.abs(g1)) + sigma_p * np.log(np.abs(g2)))
        return phi(s) * amp * np.abs(dsdx)

    return a, Amplitude(func, (x_lo, x_hi), f"pullback({phi.name})")


def general_beta_pullback(h: Callable, lam, sigma: complex, sigma_p: complex, c: float, phi: Amplitude,
                          tol: float = 1e-10) -> QuadResult:
    """``general_beta`` evaluated on the normal-form side as ``H_a(psi)``."""
    a, psi = pullback_amplitude(h, sigma, sigma_p, abs(c), phi)
    return scaled_beta(lam, sigma, sigma_p, a, psi, tol)


def general_beta_main(h: Callable, lam, sigma: complex, sigma_p: complex, c: float, phi: Amplitude) -> complex:
    """Stationary-phase main term of :func:`general_beta`, via the pullback."""
    a, psi = pullback_amplitude(h, sigma, sigma_p, abs(c), phi)
    return scaled_beta_main(lam, sigma, sigma_p, a, complex(psi(0.0)))
