"""Stationary-phase and Airy approximations of the reduced kernel and of ``F``.

Conventions (see :mod:`triperiod.trilinear` for ``l``, ``b`` and ``F``):

* ``a(t) = e^{i pi/4} 2^{1 + it/2}`` and, for ``lambda = it``,
  ``k(c) = |sin c|^{(-tau-tau'-1)/2} (m_lambda(c) + m_{-lambda}(c))`` with
  ``m_lambda(c) = |sin(c/2)|^{-lambda/2} |cos(c/2)|^{lambda/2}``;
* ``l(c) = (2 pi)^{-1/2} a(t) t^{-1/2} k(c) + O(t^{-3/2})``;
* ``G_n(phi) = int_{S^1} k(c) e^{inc} phi(c) dc`` so that
  ``F_n(phi) = (2 pi)^{-1/2} a(t) t^{-1/2} G_n(phi) + O(t^{-3/2})``.

The phase of ``m_lambda(c) e^{inc}`` has derivative ``n - t / (2 sin c)``;
with ``delta = 2n/t`` there are two critical points per half period when
``delta > 1``, one degenerate point ``c0 = pi/2`` at ``delta = 1`` and none
when ``delta < 1``. Near ``delta = 1`` the cubic expansion at ``c0`` gives

    G_n(phi) ~ 4 pi (4/t)^{1/3} Ai((t - 2n) / (2t)^{1/3}) (-1)^{n/2} phi(c0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from triperiod import calibration
from triperiod.airy import airy, airy_half_width
from triperiod.errors import DomainError
from triperiod.oscquad import QuadResult, SingularitySpec, integrate_circle
from triperiod.repn import CircleFunction, RepParams, SpectralParam, as_spectral, require_principal

PI = math.pi
EPSILON = 0.1
C0 = 0.5 * PI


class Regime(enum.Enum):
    NO_CRITICAL_POINT = "no_critical_point"
    NONDEGENERATE = "nondegenerate"
    AIRY_WINDOW = "airy_window"


@dataclass(frozen=True)
class Approximation:
    """Main term, remainder budget and (when ``n`` is known) the regime."""

    main_term: complex
    remainder_budget: float
    regime: Regime | None = None

    def __post_init__(self):
        if not math.isfinite(self.remainder_budget) or self.remainder_budget < 0:
            raise DomainError("remainder budget must be finite and nonnegative")


def _principal_t(p: RepParams, lam) -> float:
    t = require_principal(as_spectral(lam))
    if abs(t) < p.S_cutoff:
        raise DomainError(f"|t| = {abs(t)} is below the cutoff S = {p.S_cutoff}")
    return t


def a_lambda(t: float) -> complex:
    """``e^{i pi/4} 2^{1 + it/2}`` on the principal branch."""
    return complex(np.exp(1j * PI / 4.0 + (1.0 + 0.5j * t) * math.log(2.0)))


def kernel_amplitude(p: RepParams, t: float, c):
    """``k(c) = A(c) (m_lambda(c) + m_{-lambda}(c))`` for ``lambda = it``."""
    c = np.asarray(c, dtype=float)
    sigma0 = (-p.tau - p.tau_prime - 1.0) / 2.0
    ls = np.log(np.abs(np.sin(c)))
    lh = np.log(np.abs(np.sin(0.5 * c)))
    lc = np.log(np.abs(np.cos(0.5 * c)))
    lam = 1j * t
    out = np.exp(sigma0 * ls) * (np.exp(-0.5 * lam * lh + 0.5 * lam * lc) + np.exp(0.5 * lam * lh - 0.5 * lam * lc))
    return out[()] if out.ndim == 0 else out


def kernel_main_term(p: RepParams, t: float, c):
    """``(2 pi)^{-1/2} a(t) |t|^{-1/2} k(c)``."""
    return a_lambda(t) * abs(t) ** -0.5 / math.sqrt(2.0 * PI) * kernel_amplitude(p, t, c)


def kernel_budget_shape(t: float, c: float) -> float:
    """``t^{-3/2} |sin c|^{-1/2} |ln|sin(c/2) cos(c/2)||``."""
    s = abs(math.sin(0.5 * c) * math.cos(0.5 * c))
    return abs(t) ** -1.5 * abs(math.sin(c)) ** -0.5 * abs(math.log(s))


def l_kernel_approx(p: RepParams, lam: SpectralParam | float, c: float, C: float | None = None) -> Approximation:
    """Stationary-phase approximation of the reduced kernel at ``c``.

    Parameters
    ----------
    C : float, optional
        Budget constant; defaults to the frozen calibrated value.
    """
    t = _principal_t(p, lam)
    if math.fmod(abs(c), PI) == 0.0:
        raise DomainError("the kernel is singular at c = 0 mod pi")
    C = calibration.KERNEL_C if C is None else C
    return Approximation(complex(kernel_main_term(p, t, c)), C * kernel_budget_shape(t, c))


def g_functional(p: RepParams, lam: SpectralParam | float, n: int, phi: CircleFunction, tol: float = 1e-10) -> QuadResult:
    """``G_n(phi) = int_{S^1} k(c) e^{inc} phi(c) dc`` by quadrature."""
    t = _principal_t(p, lam)
    if n % 2:
        raise DomainError("n must be even")
    if not math.isclose(phi.period, PI):
        raise DomainError("phi must have period pi")
    sigma0 = (-p.tau - p.tau_prime - 1.0) / 2.0
    sing = SingularitySpec([0.0], [(sigma0 - 0.5j * t, sigma0 + 0.5j * t)])

    def f(c):
        return kernel_amplitude(p, t, c) * np.exp(1j * n * c) * phi.eval(c)

    freq = abs(n) + abs(t) + 1.0
    # integrand has period pi; the circle covers two periods
    return integrate_circle(f, sing, tol=tol / 2.0, period=PI, freq=freq).scaled(2.0)


def airy_argument(t: float, n: int) -> float:
    """Scaled distance ``(t - 2n) / (2t)^{1/3}`` from the degenerate point."""
    return (t - 2.0 * n) / (2.0 * t) ** (1.0 / 3.0)


def g_main_term(t: float, n: int, phi_c0: complex = 1.0) -> complex:
    """Airy main term ``4 pi (4/t)^{1/3} Ai(x) (-1)^{n/2} phi(c0)`` of ``G_n``."""
    if t <= 0:
        raise DomainError("t must be positive")
    if n < 0 or n % 2:
        raise DomainError("n must be even and nonnegative")
    x = airy_argument(t, n)
    if abs(x) > 100.0:
        return 0.0j
    sign = -1.0 if (n // 2) % 2 else 1.0
    return complex(4.0 * PI * (4.0 / t) ** (1.0 / 3.0) * airy(x) * sign * phi_c0)


def f_main_term(t: float, n: int, phi_c0: complex = 1.0) -> complex:
    """Airy main term of ``F_n(phi)``: ``(2 pi)^{-1/2} a(t) t^{-1/2} G^0``.

    Its modulus is ``4 sqrt(2 pi) 4^{1/3} t^{-5/6} |Ai(x) phi(c0)|``.
    """
    return a_lambda(t) * t**-0.5 / math.sqrt(2.0 * PI) * g_main_term(t, n, phi_c0)


def f_bridge(p: RepParams, lam: SpectralParam | float, n: int, phi: CircleFunction, C: float | None = None, tol: float = 1e-10) -> Approximation:
    """``F_n(phi)`` from ``G_n(phi)``: main term ``(2 pi)^{-1/2} a(t) t^{-1/2} G``.

    The budget is ``C' ||phi||_inf t^{-3/2}``.
    """
    t = _principal_t(p, lam)
    C = calibration.BRIDGE_C if C is None else C
    G = g_functional(p, t, n, phi, tol).value
    main = a_lambda(t) * abs(t) ** -0.5 / math.sqrt(2.0 * PI) * G
    return Approximation(complex(main), C * phi.cnorm(0) * abs(t) ** -1.5, classify_regime(abs(t), n))


def g_airy_approx(p: RepParams, lam: SpectralParam | float, n: int, phi: CircleFunction, C: float | None = None) -> Approximation:
    """Airy main term of ``G_n(phi)`` with budget ``C ||phi||_{C^2} t^{-2/3}``.

    Meaningful for ``phi`` supported near ``c0 = pi/2`` and ``n`` in the
    Airy window.
    """
    t = _principal_t(p, lam)
    C = calibration.AIRY_C if C is None else C
    main = g_main_term(abs(t), n, complex(phi.eval(C0)))
    return Approximation(main, C * phi.cnorm(2) * abs(t) ** (-2.0 / 3.0), classify_regime(abs(t), n))


def phase(t: float, n: int, c):
    """Phase ``n c + (t/2)(ln|cos(c/2)| - ln|sin(c/2)|)`` of ``m_lambda e^{inc}``."""
    c = np.asarray(c, dtype=float)
    return n * c + 0.5 * t * (np.log(np.abs(np.cos(0.5 * c))) - np.log(np.abs(np.sin(0.5 * c))))


@dataclass(frozen=True)
class CriticalPoints:
    points: tuple
    degenerate: bool = False
    boundary_case: bool = False  # n = 0: the equation has no admissible solution


def phase_critical_points(t: float, n: int) -> CriticalPoints:
    """Critical points of :func:`phase` in ``(0, pi)``: ``sin c = t / (2n)``."""
    if t <= 0 or n < 0:
        raise DomainError("need t > 0 and n >= 0")
    if n == 0:
        return CriticalPoints((), boundary_case=True)
    delta = 2.0 * n / t
    if delta == 1.0:
        return CriticalPoints((C0,), degenerate=True)
    if delta < 1.0:
        return CriticalPoints(())
    c = math.asin(1.0 / delta)
    return CriticalPoints((c, PI - c))


def classify_regime(t: float, n: int, eps: float = EPSILON) -> Regime:
    """Regime from ``delta = 2n/t``: Airy window when ``|delta - 1| < eps``."""
    delta = 2.0 * n / t
    if delta <= 1.0 - eps:
        return Regime.NO_CRITICAL_POINT
    if delta >= 1.0 + eps:
        return Regime.NONDEGENERATE
    return Regime.AIRY_WINDOW


def remainder_budget_II(p: RepParams, t: float, n: int, C: float | None = None) -> float:
    """``C((1+n)^{-1} t^{-1} + t^{-3})`` for ``t <= 4n``, else ``C t^{-3}``."""
    t = abs(t)
    if t < p.S_cutoff:
        raise DomainError(f"t = {t} is below the cutoff S = {p.S_cutoff}")
    C = calibration.TILDE_C if C is None else C
    if t <= 4 * abs(n):
        return C * (1.0 / ((1.0 + abs(n)) * t) + t**-3.0)
    return C * t**-3.0


def window_half_width() -> float:
    """``b'``: largest ``b`` with ``|Ai| >= Ai(0)/2`` on ``[-b, b]``."""
    return airy_half_width(0.5)


def window_in_t(T: float) -> float:
    """Half-width in ``t`` of the Airy window around ``t = T``: ``b' (2T)^{1/3}``."""
    return window_half_width() * (2.0 * T) ** (1.0 / 3.0)
