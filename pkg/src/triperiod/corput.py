"""Integration by parts, van der Corput bounds and the model integral.

``I_F(phi) = int F phi omega`` with ``omega = w(y) dy``. Given a vector
field ``xi = v(y) d/dy`` with ``xi omega = 0`` (``v w`` constant) and a
function ``H`` with ``H xi(F) = lambda F``, repeated integration by parts
gives ``I_F(phi) = -lambda^{-1} I_F(xi(H phi))`` and hence

    |I_F(phi)| <= |lambda|^{-n} C^n sum_i N_{n,i} R_F(xi^i phi),

where ``R_F(g) = int |F g| |omega|``, ``C`` bounds ``|xi^j H|`` for
``j <= n`` and ``N_{n,i}`` counts (with multiplicity) the monomials of
``D^n phi = xi(H xi(H ... phi))`` that carry ``xi^i phi``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.fft import dct

from triperiod.betacore import Amplitude
from triperiod.errors import ContractError, DomainError
from triperiod.oscquad import QuadResult, SingularitySpec, integrate_line

C1 = 3.0
C2 = 8.0
N_SAMPLES = 2048
CHEB_DEG = 256
CHEB_MAX_DEG = 4096


def _as_pieces(interval) -> list[tuple[float, float]]:
    arr = np.asarray(interval, dtype=float)
    pieces = [tuple(arr)] if arr.ndim == 1 else [tuple(r) for r in arr]
    for lo, hi in pieces:
        if not lo < hi:
            raise DomainError("each interval needs lo < hi")
    return pieces


def _cheb_fixed(f: Callable, lo: float, hi: float, deg: int) -> Chebyshev:
    """Interpolant at the ``deg + 1`` Chebyshev points of the first kind (DCT-II)."""
    m = deg + 1
    x = np.cos(np.pi * (np.arange(m) + 0.5) / m)
    vals = np.asarray(f(0.5 * (hi - lo) * x + 0.5 * (hi + lo)), dtype=complex)
    # the DCT runs over increasing k, i.e. decreasing x
    coef = dct(vals.real, type=2) / m + 1j * dct(vals.imag, type=2) / m
    coef[0] *= 0.5
    return Chebyshev(coef, domain=[lo, hi])


def _cheb(g: Callable, lo: float, hi: float, deg: int | None = None) -> Chebyshev:
    """Chebyshev interpolant of ``g``; the degree doubles until the tail is negligible."""
    if deg is not None:
        return _cheb_fixed(g, lo, hi, deg)
    d = 32
    while True:
        c = _cheb_fixed(g, lo, hi, d)
        coef = np.abs(c.coef)
        if np.max(coef[-max(d // 8, 4):]) <= 1e-14 * max(np.max(coef), 1e-300) or d >= CHEB_MAX_DEG:
            return c
        d *= 2


def xi_iterates(g: Callable, v: Callable, lo: float, hi: float, n: int, deg: int | None = None) -> list[Chebyshev]:
    """Chebyshev interpolants of ``g, xi g, ..., xi^n g`` on ``[lo, hi]``.

    The degree is chosen adaptively for ``g`` and then kept (plus a margin
    for the factor ``v``), so rounding noise in a derivative cannot drive
    the degree up.
    """
    out = [_cheb(g, lo, hi, deg)]
    d_fixed = out[0].degree() + 16
    for _ in range(n):
        d = out[-1].deriv()
        out.append(_cheb(lambda y, d=d: v(y) * d(y), lo, hi, d_fixed))
    return out


@lru_cache(maxsize=None)
def ibp_multiplicities(n: int) -> tuple[int, ...]:
    """``N_{n,i}``: summed coefficients of ``xi^i phi`` in ``D^n phi``.

    Terms are tracked as ``(powers of xi^j H for j = 0..n, i)`` and
    ``D = xi(H .)`` is expanded by the product rule.
    """
    terms: Counter = Counter({((0,) * (n + 1), 0): 1})
    for _ in range(n):
        new: Counter = Counter()
        for (powers, i), coef in terms.items():
            # multiply by H, then apply xi
            p = list(powers)
            p[0] += 1
            for j, e in enumerate(p):
                if e and j + 1 <= n:
                    q = p.copy()
                    q[j] -= 1
                    q[j + 1] += 1
                    new[(tuple(q), i)] += coef * e
            new[(tuple(p), i + 1)] += coef
        terms = new
    counts = [0] * (n + 1)
    for (_, i), coef in terms.items():
        counts[i] += coef
    return tuple(counts)


@dataclass(frozen=True)
class IbpReport:
    bound: float
    C: float
    abs_integrals: tuple
    multiplicities: tuple


def _check_ibp_contract(F, v, H, w, lam, pieces, dF=None):
    for lo, hi in pieces:
        y = np.linspace(lo, hi, 257)[1:-1]
        if dF is None:
            cF = _cheb(F, lo, hi)
            xF = v(y) * cF.deriv()(y)
        else:
            xF = v(y) * dF(y)
        Fy = np.asarray(F(y), dtype=complex)
        lhs = np.asarray(H(y), dtype=complex) * xF
        scale = np.maximum(np.abs(lam * Fy), 1e-300)
        if np.max(np.abs(lhs - lam * Fy) / scale) > 1e-6:
            raise ContractError("H xi(F) = lambda F fails on samples")
        vw = np.asarray(v(y), dtype=complex) * np.asarray(w(y), dtype=complex)
        if np.max(np.abs(vw - vw[0])) > 1e-9 * max(abs(vw[0]), 1.0):
            raise ContractError("xi omega = 0 fails: v(y) w(y) is not constant")


def _integrate(f, lo, hi, tol, freq):
    return integrate_line(f, (lo, hi), None, tol=tol, freq=freq)


def ibp_bound(F: Callable, xi: Callable, H: Callable, n: int, phi: Callable, omega_weight: Callable,
              interval, lam: complex, *, dF: Callable | None = None, tol: float = 1e-9) -> IbpReport:
    """Integration-by-parts bound for ``|I_F(phi)|``.

    Parameters
    ----------
    F : callable
        Kernel ``F(y)`` (the large parameter ``lam`` is baked in).
    xi : callable
        Coefficient ``v`` of the vector field ``v(y) d/dy``.
    H : callable
        Function with ``H xi(F) = lam F``.
    phi : callable
        Amplitude; must vanish at the ends of every piece of ``interval``.
    omega_weight : callable
        ``w`` in ``omega = w(y) dy``.
    interval : (lo, hi) or sequence of them
    dF : callable, optional
        Exact ``F'`` for the contract check (else Chebyshev).
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    pieces = _as_pieces(interval)
    _check_ibp_contract(F, xi, H, omega_weight, lam, pieces, dF)
    C = 0.0
    abs_int = [0.0] * (n + 1)
    for lo, hi in pieces:
        y = np.linspace(lo, hi, N_SAMPLES)
        for h_j in xi_iterates(H, xi, lo, hi, n):
            C = max(C, float(np.max(np.abs(h_j(y)))))
        for i, p_i in enumerate(xi_iterates(phi, xi, lo, hi, n)):
            def g(y, p_i=p_i):
                return np.abs(F(y) * p_i(y) * omega_weight(y))
            abs_int[i] += _integrate(g, lo, hi, tol, 0.0).value.real
    N = ibp_multiplicities(n)
    bound = abs(lam) ** (-n) * C**n * sum(Ni * Ri for Ni, Ri in zip(N, abs_int))
    return IbpReport(float(bound), C, tuple(abs_int), N)


def i_f(F: Callable, phi: Callable, omega_weight: Callable, interval, tol: float = 1e-10, freq: float = 0.0) -> QuadResult:
    """``I_F(phi) = int F phi w dy`` over ``interval`` by quadrature."""
    total = QuadResult(0.0, 0.0, 0, True)
    for lo, hi in _as_pieces(interval):
        total = total + integrate_line(lambda y: F(y) * phi(y) * omega_weight(y), (lo, hi), None, tol=tol, freq=freq)
    return total


def ibp_identity(F: Callable, xi: Callable, H: Callable, phi: Callable, omega_weight: Callable, interval,
                 lam: complex, tol: float = 1e-10, freq: float = 0.0) -> tuple[QuadResult, QuadResult]:
    """Both sides of ``I_F(phi) = -lambda^{-1} I_F(xi(H phi))``."""
    pieces = _as_pieces(interval)
    lhs = i_f(F, phi, omega_weight, pieces, tol, freq)
    rhs = QuadResult(0.0, 0.0, 0, True)
    for lo, hi in pieces:
        d = _cheb(lambda y: H(y) * phi(y), lo, hi).deriv()
        rhs = rhs + i_f(F, lambda y, d=d: xi(y) * d(y), omega_weight, (lo, hi), tol, freq)
    return lhs, rhs.scaled(-1.0 / lam)


# --- van der Corput ---------------------------------------------------------


def variance(phi: Callable, lo: float, hi: float, n: int = 8193, grid: np.ndarray | None = None) -> float:
    """``M(phi) = |phi(hi)| + int_lo^hi |phi'|`` by sampled total variation."""
    x = np.linspace(lo, hi, n) if grid is None else grid
    v = np.asarray(phi(x), dtype=complex)
    return float(abs(v[-1]) + np.sum(np.abs(np.diff(v))))


def _derivative_samples(f: Callable, lo: float, hi: float, k: int, fk: Callable | None, n: int):
    x = np.linspace(lo, hi, n)
    if fk is not None:
        return x, np.asarray(fk(x), dtype=float)
    return x, _cheb(f, lo, hi).deriv(k)(x).real


def vdc_bound(f: Callable, phi: Callable, interval: Sequence[float], k: int, *,
              fk: Callable | None = None, f1: Callable | None = None, grid: np.ndarray | None = None) -> float:
    """``c_k m_k(f)^{-1/k} M(phi)`` for ``|int_a^b e^{if} phi|``.

    Parameters
    ----------
    f : callable
        Real phase.
    k : {1, 2}
    fk : callable, optional
        Exact ``f^(k)``; otherwise Chebyshev differentiation of ``f``.
    f1 : callable, optional
        Exact ``f'`` for the monotonicity check when ``k = 1``.
    grid : array, optional
        Sample grid for the variance ``M(phi)``.

    Raises
    ------
    DomainError
        If ``f^(k)`` vanishes (or changes sign) on the samples.
    ContractError
        If ``k = 1`` and ``f'`` is not monotone.
    """
    if k not in (1, 2):
        raise DomainError("only k = 1 and k = 2 are supported")
    lo, hi = (float(v) for v in interval)
    x, dk = _derivative_samples(f, lo, hi, k, fk, N_SAMPLES)
    if np.any(dk == 0) or (np.min(dk) < 0 < np.max(dk)):
        raise DomainError(f"m_{k}(f) = 0 on [{lo}, {hi}]")
    m_k = float(np.min(np.abs(dk)))
    if k == 1:
        d1 = dk if f1 is None else np.asarray(f1(x), dtype=float)
        steps = np.diff(d1)
        tol = 1e-9 * max(np.max(np.abs(d1)), 1e-300)
        if not (np.all(steps >= -tol) or np.all(steps <= tol)):
            raise ContractError("k = 1 needs f' monotone on the interval")
    c_k = C1 if k == 1 else C2
    return c_k * m_k ** (-1.0 / k) * variance(phi, lo, hi, grid=grid)


def oscillatory_integral(f: Callable, phi: Callable, interval: Sequence[float], freq: float, tol: float = 1e-11) -> QuadResult:
    """``int e^{i f} phi`` over a regular interval."""
    return integrate_line(lambda x: np.exp(1j * f(x)) * phi(x), interval, None, tol=tol, freq=freq)


# --- model integral -------------------------------------------------------


def _check_phase_g(g: Callable, g1: Callable | None, g2: Callable | None):
    x = np.linspace(-1.0, 1.0, N_SAMPLES)
    c = Chebyshev.interpolate(lambda y: np.asarray(g(y), dtype=float), 64, domain=[-1.0, 1.0])
    d1 = np.asarray(g1(x)) if g1 is not None else c.deriv()(x)
    d2 = np.asarray(g2(x)) if g2 is not None else c.deriv(2)(x)
    if not (np.all(d1 > 0.99) and np.all(d1 < 1.01)):
        raise DomainError("need 0.99 < g' < 1.01 on [-1, 1]")
    if np.any(np.abs(d2) > 0.5):
        raise DomainError("need |g''| <= 1/2 on [-1, 1]")
    return c


def _check_u(u: Amplitude):
    lo, hi = u.support
    if lo < -1.0 or hi > 1.0:
        raise DomainError("u must be supported in [-1, 1]")


def model_integral(s: float, t: float, u: Amplitude, g: Callable, tol: float = 1e-11, *,
                   g1: Callable | None = None, g2: Callable | None = None) -> QuadResult:
    """``int_{-1}^1 u(x) |x|^{-1/2 - it} e^{i s g(x)} dx`` by quadrature."""
    if s < 1 or t < 1:
        raise DomainError("need s >= 1 and t >= 1")
    _check_u(u)
    _check_phase_g(g, g1, g2)
    e = -0.5 - 1j * t

    def f(x):
        return u(x) * np.exp(e * np.log(np.abs(x)) + 1j * s * g(x))

    lo, hi = u.support
    freq = 1.02 * s + 1.0
    total = QuadResult(0.0, 0.0, 0, True)
    for a, b in ((lo, 0.0), (0.0, hi)):
        if a < b:
            total = total + integrate_line(f, (a, b), SingularitySpec([0.0], [e]), tol=tol / 2.0, freq=freq)
    return total


@dataclass(frozen=True)
class ModelBound:
    """Assembled bound ``B s^{-1/2}`` with ``B = B1 + B2 + B3 + B4``."""

    bound: float
    B: float
    parts: tuple  # (B1, B2, B3, B4), each already multiplied by s^{1/2}
    fallbacks: int  # pieces where van der Corput did not apply


def _monotone_runs(x: np.ndarray, d: np.ndarray) -> list[tuple[float, float]]:
    """Split ``[x0, x-1]`` where the samples ``d`` change monotonicity."""
    s = np.sign(np.diff(d))
    cuts = [0]
    for i in range(1, len(s)):
        if s[i] != 0 and s[i - 1] != 0 and s[i] != s[i - 1]:
            cuts.append(i)
    cuts.append(len(x) - 1)
    return [(x[a], x[b]) for a, b in zip(cuts[:-1], cuts[1:]) if x[b] > x[a]]


def model_integral_bound(s: float, t: float, u: Amplitude, g: Callable, *, g1: Callable | None = None,
                         g2: Callable | None = None) -> ModelBound:
    """Four-interval van der Corput bound for :func:`model_integral`.

    On each half-line, with ``a = t/s``, ``f_a = g(x) - a ln|x|`` and
    ``phi = u |x|^{-1/2}``: ``J1 = (2a, 1)`` (k = 1), ``J2 = (a/2, 2a)``
    (k = 2), ``J3 = (1/(2s), a/2)`` (k = 1) and ``J4 = (0, 1/(2s))``
    (absolute value). A piece where the van der Corput hypotheses fail on
    the samples falls back to the absolute-value bound.
    """
    a = t / s
    if not (1.0 / s <= a <= 1.0):
        raise DomainError("need 1/s <= t/s <= 1")
    _check_u(u)
    gc = _check_phase_g(g, g1, g2)
    dg1 = g1 if g1 is not None else gc.deriv()
    dg2 = g2 if g2 is not None else gc.deriv(2)
    parts = [0.0, 0.0, 0.0, 0.0]
    fallbacks = 0
    for side in (1.0, -1.0):
        # on the negative half-line substitute x -> -x
        def gs(x, side=side):
            return side * g(side * np.asarray(x))

        def gs1(x, side=side):
            return np.asarray(dg1(side * np.asarray(x)))

        def gs2(x, side=side):
            return side * np.asarray(dg2(side * np.asarray(x)))

        def phi(x, side=side):
            x = np.asarray(x, dtype=float)
            return u(side * x) * np.abs(x) ** -0.5

        def fa(x, gs=gs):
            return s * (gs(x) - a * np.log(np.abs(x)))

        def fa1(x, gs1=gs1):
            return s * (gs1(x) - a / np.asarray(x))

        def fa2(x, gs2=gs2):
            return s * (gs2(x) + a / np.asarray(x) ** 2)

        J = [(2.0 * a, 1.0), (0.5 * a, min(2.0 * a, 1.0)), (0.5 / s, 0.5 * a), (0.0, 0.5 / s)]
        for j, (lo, hi) in enumerate(J):
            if not lo < hi:
                continue
            if j == 3:
                sup_u = float(np.max(np.abs(u(side * np.linspace(0.0, hi, 257)))))
                parts[3] += 2.0 * math.sqrt(hi) * sup_u
                continue
            grid = np.geomspace(lo, hi, 8193)
            x = np.linspace(lo, hi, N_SAMPLES)
            runs = _monotone_runs(x, fa1(x)) if j != 1 else [(lo, hi)]
            for rlo, rhi in runs:
                sub = grid[(grid >= rlo) & (grid <= rhi)]
                sub = np.unique(np.concatenate(([rlo], sub, [rhi])))
                try:
                    if j == 1:
                        b = vdc_bound(fa, phi, (rlo, rhi), 2, fk=fa2, grid=sub)
                    else:
                        b = vdc_bound(fa, phi, (rlo, rhi), 1, fk=fa1, f1=fa1, grid=sub)
                except (DomainError, ContractError):
                    fallbacks += 1
                    vals = np.abs(phi(sub))
                    b = float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(sub))) * 1.01
                parts[j] += b
    total = sum(parts)
    return ModelBound(total, total * math.sqrt(s), tuple(p * math.sqrt(s) for p in parts), fallbacks)
