"""Reduced kernel, rank-one functional and Hermitian forms.

Normalizations used throughout:

* ``l(c) = (1/2pi) int_{S^1} K(y + c, y, 0) dy``;
* ``b(u) = int_{S^1} l(c) u(c) dc`` and ``F_n(phi) = b(e^{inc} phi)``;
* ``H(w) = |b(u_w)|^2`` for the reduced profile ``u_w`` of ``w``.

Two independent routes are available for ``b``: nested adaptive quadrature
(``method="quad"``, costly, intended for small ``t``) and the exact
Fourier series of :mod:`triperiod.kseries` (``method="series"``), which
needs ``u`` as an exponential polynomial.
"""

from __future__ import annotations

import math

import numpy as np

from triperiod import kseries
from triperiod.errors import DomainError
from triperiod.oscquad import QuadResult, SingularitySpec, integrate_circle, integrate_line
from triperiod.repn import (
    CircleFunction,
    RepParams,
    SpectralParam,
    TestVector,
    as_spectral,
    kernel_exponents,
    require_principal,
)

PI = math.pi


def _power(x, w):
    return np.exp(w * np.log(x))


def _l_from_split(exps, a: float, b: float, tol: float, freq: float, rtol: float = 0.0) -> QuadResult:
    """``l`` at ``c`` with ``a = c`` and ``b = pi - c`` passed separately.

    The inner integral ``(1/pi) int_0^pi |sin(y+c)|^beta |sin y|^gamma dy``
    splits at its two singular points into integrals of the form
    ``int_0^L |sin(L - y)|^e1 |sin y|^e2 dy`` with ``L in {a, b}``; each is
    halved so that every call has a single singularity at the origin,
    where the distance is exact in floating point.
    """
    alpha, beta, gamma = exps
    total = QuadResult(0.0, 0.0, 0, True)
    for L in (b, a):
        for e_far, e_near in ((beta, gamma), (gamma, beta)):
            def f(y, L=L, e_far=e_far, e_near=e_near):
                return np.exp(e_far * np.log(np.sin(L - y)) + e_near * np.log(np.sin(y)))

            total = total + integrate_line(f, (0.0, 0.5 * L), SingularitySpec([0.0], [e_near]), tol=tol / 4.0, rtol=rtol, freq=freq)
    sin_c = math.sin(a) if a <= b else math.sin(b)
    return total.scaled(_power(sin_c, alpha) / PI)


def _reduce_angle(c: float) -> tuple[float, float]:
    """Return ``(a, b)`` with ``a = c mod pi`` and ``b = pi - a``."""
    r = math.fmod(float(c), PI)
    if r < 0:
        r += PI
    if r == 0.0 or r >= PI:
        raise DomainError("l is singular at c = 0 mod pi")
    return r, PI - r


def l_kernel(p: RepParams, lam: SpectralParam | float, c: float, tol: float = 1e-10, form: str = "direct") -> QuadResult:
    """Reduced kernel ``l(c)`` by adaptive quadrature.

    Parameters
    ----------
    form : {"direct", "factored"}
        ``"direct"`` integrates in local coordinates at each singular
        point; ``"factored"`` integrates the symmetric form
        ``|sin c|^alpha (1/pi) int |sin(s + c/2)|^beta |sin(s - c/2)|^gamma ds``
        over one period with the generic circle rule, giving an
        independent cross-check.
    """
    lam = as_spectral(lam)
    t = require_principal(lam)
    a, b = _reduce_angle(c)
    exps = kernel_exponents(p, lam)
    freq = abs(t) + 1.0
    if form == "direct":
        return _l_from_split(exps, a, b, tol, freq)
    if form != "factored":
        raise DomainError(f"unknown form {form!r}")
    alpha, beta, gamma = exps
    half = 0.5 * a

    def f(s):
        return np.exp(beta * np.log(np.abs(np.sin(s + half))) + gamma * np.log(np.abs(np.sin(s - half))))

    res = integrate_circle(f, SingularitySpec([-half, half], [beta, gamma]), tol=tol, period=PI, freq=freq)
    return res.scaled(_power(math.sin(a), alpha) / PI)


def _check_u(u: CircleFunction):
    if not math.isclose(u.period, PI):
        raise DomainError("u must be invariant under c -> c + pi")


def b_functional_quad(p: RepParams, lam: SpectralParam | float, u: CircleFunction, tol: float = 1e-7) -> QuadResult:
    """``b(u)`` as a nested quadrature; practical for ``|t| <= 16`` or so.

    The outer integral over ``c`` runs over ``(0, pi/2]`` and, reflected,
    over ``[pi/2, pi)``; inner values of ``l`` are memoized on the outer
    nodes and computed with tolerance ``tol / 10``.
    """
    _check_u(u)
    lam = as_spectral(lam)
    t = require_principal(lam)
    exps = kernel_exponents(p, lam)
    freq = abs(t) + 1.0
    inner_tol = tol / 10.0
    cache: dict[tuple[float, int], complex] = {}
    inner_err = [0.0]
    inner_ok = [True]

    def l_at(d, side):
        key = (float(d), side)
        if key not in cache:
            a, b = (d, PI - d) if side == 0 else (PI - d, d)
            r = _l_from_split(exps, a, b, 0.0, freq, rtol=inner_tol)
            inner_err[0] = max(inner_err[0], r.err_estimate * math.sqrt(d))
            inner_ok[0] = inner_ok[0] and r.converged
            cache[key] = r.value
        return cache[key]

    def outer(side):
        def g(d):
            d = np.asarray(d, dtype=float)
            c = d if side == 0 else PI - d
            lv = np.array([l_at(x, side) for x in d.ravel()]).reshape(d.shape)
            return lv * u.eval(c)
        return g

    # near c = 0 (and c = pi) l(c) ~ A |c|^alpha + B |c|^{alpha - lambda}
    alpha = exps[0]
    sing = SingularitySpec([0.0], [(alpha, alpha - lam.lam)])
    out_freq = abs(t) + max(abs(k) for k in (u.fourier or {0: 0})) + 1.0 if u.fourier else abs(t) + 16.0
    total = QuadResult(0.0, 0.0, 0, True)
    for side in (0, 1):
        total = total + integrate_line(outer(side), (0.0, 0.5 * PI), sing, tol=tol / 4.0, freq=out_freq)
    # the integrand has period pi, the circle has length 2 pi
    res = total.scaled(2.0)
    # int_0^{pi/2} c^{-1/2} dc < 2.6, two halves, doubled for the full circle
    err = res.err_estimate + 10.4 * inner_err[0] * max(1.0, u.cnorm(0))
    return QuadResult(res.value, err, res.n_evals + sum(1 for _ in cache), res.converged and inner_ok[0])


def b_functional_series(p: RepParams, lam: SpectralParam | float, u: CircleFunction) -> complex:
    _check_u(u)
    t = require_principal(as_spectral(lam))
    coeffs = u.fourier
    if coeffs is None:
        raise DomainError("series route needs u as an exponential polynomial")
    return kseries.f_trig(p, t, coeffs)


def b_functional(p: RepParams, lam: SpectralParam | float, u: CircleFunction, tol: float = 1e-7, method: str = "auto") -> complex:
    """Rank-one functional ``b(u) = int_{S^1} l(c) u(c) dc``.

    Parameters
    ----------
    method : {"auto", "series", "quad"}
        ``"auto"`` uses the series whenever ``u`` carries exact Fourier
        coefficients and falls back to nested quadrature otherwise.
    """
    if method == "auto":
        method = "series" if u.fourier is not None else "quad"
    if method == "series":
        return b_functional_series(p, lam, u)
    if method == "quad":
        return b_functional_quad(p, lam, u, tol).value
    raise DomainError(f"unknown method {method!r}")


def f_functional(p: RepParams, lam: SpectralParam | float, n: int, phi: CircleFunction, tol: float = 1e-7, method: str = "auto") -> complex:
    """``F_n(phi) = int_{S^1} l(c) e^{inc} phi(c) dc``."""
    if n % 2:
        raise DomainError("n must be even")
    if not math.isclose(phi.period, PI):
        raise DomainError("phi must have period pi")
    return b_functional(p, lam, phi.times_exp(n), tol, method)


def h_form(p: RepParams, lam: SpectralParam | float, w: TestVector, tol: float = 1e-7, method: str = "auto") -> float:
    """Hermitian form ``H(w) = |b(u_w)|^2`` on a diagonally K-invariant vector."""
    return float(abs(b_functional(p, lam, w.u, tol, method)) ** 2)


def b_functional_2d(p: RepParams, lam: SpectralParam | float, u: CircleFunction, tol: float = 1e-6) -> QuadResult:
    """``(1/2pi) int int K(x, y, 0) u(x - y) dx dy`` with ``y`` outermost.

    Independent of the reduced kernel; practical only for small ``|t|``.
    The inner ``x`` integral is split at its singular points ``x = 0`` and
    ``x = y`` and written in local coordinates there.
    """
    _check_u(u)
    lam = as_spectral(lam)
    t = require_principal(lam)
    e_xy, e_xz, e_yz = kernel_exponents(p, lam)
    freq = abs(t) + 8.0
    inner_tol = tol / 10.0
    inner_err = [0.0]

    def inner(y0: float, y_comp: float) -> complex:
        # y0 in (0, pi) with y_comp = pi - y0; x runs over (0, pi) in pieces
        # [0, y0] and [y0, pi], each halved at its midpoint
        acc = 0.0 + 0.0j
        err = 0.0
        pieces = [
            (lambda d: d, 0.5 * y0, e_xz, "x"),
            (lambda e: y0 - e, 0.5 * y0, e_xy, "xy"),
            (lambda e: y0 + e, 0.5 * y_comp, e_xy, "xy"),
            (lambda d: PI - d, 0.5 * y_comp, e_xz, "x"),
        ]
        for xmap, length, e_near, kind in pieces:
            def f(v, xmap=xmap, kind=kind):
                x = xmap(v)
                if kind == "x":
                    dx = v
                    dxy = np.abs(np.sin(x - y0))
                else:
                    dx = np.abs(np.sin(x))
                    dxy = v
                s_x = np.sin(dx) if kind == "x" else dx
                s_xy = np.sin(dxy) if kind == "xy" else dxy
                return (
                    np.exp(e_xz * np.log(s_x) + e_xy * np.log(s_xy))
                    * u.eval(x - y0)
                )
            r = integrate_line(f, (0.0, length), SingularitySpec([0.0], [e_near]), tol=1e-3 * inner_tol, rtol=inner_tol, freq=freq)
            acc += r.value
            err += r.err_estimate
        # the x-integrand has period pi; the full circle doubles it
        scale = 2.0 * abs(_power(math.sin(y0), e_yz))
        inner_err[0] = max(inner_err[0], err * scale * math.sqrt(min(y0, y_comp)))
        return 2.0 * acc * _power(math.sin(y0), e_yz)

    def outer(side):
        def g(d):
            d = np.asarray(d, dtype=float)
            vals = [inner(x, PI - x) if side == 0 else inner(PI - x, x) for x in d.ravel()]
            return np.array(vals).reshape(d.shape)
        return g

    # coalescing singular points give g(y) ~ A |y|^{e_yz} + B |y|^{e_yz - tau}
    sing = SingularitySpec([0.0], [(e_yz, e_yz - p.tau)])
    total = QuadResult(0.0, 0.0, 0, True)
    for side in (0, 1):
        total = total + integrate_line(outer(side), (0.0, 0.5 * PI), sing, tol=tol / 4.0, freq=freq)
    # y also has period pi; (1/2pi) * 2 = 1/pi
    res = total.scaled(1.0 / PI)
    return QuadResult(res.value, res.err_estimate + 10.4 * inner_err[0] / PI, res.n_evals, res.converged)


def l_values(p: RepParams, lam, cs, tol: float = 1e-10) -> np.ndarray:
    """Vector of ``l(c)`` values (convenience for sweeps)."""
    return np.array([l_kernel(p, lam, c, tol).value for c in np.atleast_1d(cs)])

