"""Fourier-series evaluation of the two-parameter functional.

With ``|sin x|^nu = sum_m c_m(nu) e^{2imx}`` the reduced kernel factorizes
and, for the exponents ``(alpha, beta, gamma)`` of the trilinear kernel,

    F_n(1) = int_0^{2 pi} l(c) e^{inc} dc
           = 2 pi sum_{j in Z} c_j(beta) c_j(gamma) c_{j + n/2}(alpha).

The coefficients are ratios of Gamma functions, evaluated in log space.
Terms decay like ``|j|^{-3/2}`` without sign alternation, so the two tails
beyond ``|j| = K`` are summed in closed form from the asymptotic expansion
of the Gamma ratios together with an Euler-Maclaurin evaluation of the
Hurwitz zeta function.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli, loggamma

from triperiod.repn import RepParams, kernel_exponents

N_ASYMP = 40
N_EULER = 14


def log_sin(z):
    """A logarithm of ``sin z`` that stays finite for large ``|Im z|``.

    The branch is not the principal one; only ``exp(log_sin(z))`` is
    meaningful.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    up = z.imag >= 0
    zu, zd = z[up], z[~up]
    out[up] = -1j * zu + np.log(-1.0 / 2j) + np.log1p(-np.exp(2j * zu))
    out[~up] = 1j * zd - np.log(2j) + np.log1p(-np.exp(-2j * zd))
    return out[()] if out.ndim == 0 else out


def log_sin_power_prefactor(nu: complex) -> complex:
    """Log of ``-Gamma(nu + 1) sin(pi nu / 2) / (pi 2^nu)``."""
    return complex(loggamma(nu + 1.0) + log_sin(np.pi * nu / 2.0) - math.log(math.pi) - nu * math.log(2.0) + 1j * math.pi)


def log_fourier_abs_sin(nu: complex, m):
    """Log of the ``e^{2imx}`` Fourier coefficient of ``|sin x|^nu``.

    ``c_m(nu) = (1/pi) int_0^pi |sin x|^nu e^{-2imx} dx``, even in ``m``.
    """
    m = np.abs(np.asarray(m, dtype=float))
    return log_sin_power_prefactor(nu) + loggamma(m - nu / 2.0) - loggamma(m + 1.0 + nu / 2.0)


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> np.ndarray:
    return bernoulli(n)


@lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(n: int) -> tuple:
    b = _bernoulli_numbers(n)
    return tuple(float(math.comb(n, k) * b[k]) for k in range(n + 1))


def bernoulli_poly(n: int, x):
    """Bernoulli polynomial ``B_n(x)`` for complex ``x`` (Horner form)."""
    coeffs = _bernoulli_poly_coeffs(n)
    if np.ndim(x) == 0:
        x = complex(x)
        acc = 0j
        for c in coeffs:
            acc = acc * x + c
        return acc
    x = np.asarray(x, dtype=complex)
    acc = np.zeros_like(x)
    for c in coeffs:
        acc = acc * x + c
    return acc


def gamma_ratio_expansion(A: complex, B: complex, order: int = N_ASYMP):
    """Coefficients of ``ln Gamma(z+A) - ln Gamma(z+B)`` for large ``z``.

    Returns ``(A - B, e)`` with the expansion
    ``(A - B) ln z + sum_{k>=1} e[k-1] z^{-k}``.
    """
    e = np.empty(order, dtype=complex)
    for k in range(1, order + 1):
        e[k - 1] = (-1) ** (k + 1) * (bernoulli_poly(k + 1, A) - bernoulli_poly(k + 1, B)) / (k * (k + 1))
    return A - B, e


def exp_series(e: np.ndarray) -> np.ndarray:
    """Coefficients ``d`` of ``exp(sum_k e_k w^k) = sum_m d_m w^m``."""
    order = len(e)
    d = np.zeros(order + 1, dtype=complex)
    d[0] = 1.0
    k = np.arange(1, order + 1)
    for m in range(1, order + 1):
        d[m] = np.sum(k[:m] * e[:m] * d[m - 1::-1][:m]) / m
    return d


def hurwitz_zeta(s, w: complex, order: int = N_EULER):
    """``sum_{j>=0} (w + j)^{-s}`` by Euler-Maclaurin, for large ``Re w``.

    Requires ``Re s > 1`` and ``|w|`` large compared with ``|s| / (2 pi)``.
    ``s`` may be an array.
    """
    b = _bernoulli_numbers(2 * order)
    s = np.asarray(s, dtype=complex)
    lw = np.log(w)
    total = np.exp((1.0 - s) * lw) / (s - 1.0) + 0.5 * np.exp(-s * lw)
    poch = s.copy()  # (s)_{2k-1}
    for k in range(1, order + 1):
        total = total + b[2 * k] / math.factorial(2 * k) * poch * np.exp((-s - 2 * k + 1) * lw)
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
    return complex(total) if total.ndim == 0 else total


def _tail(exps, h: int, K: int) -> complex:
    """``sum_{j >= K}`` of ``c_j(beta) c_j(gamma) c_{j+h}(alpha)`` (``K > |h|``)."""
    alpha, beta, gamma = exps
    pairs = [(-beta / 2.0, 1.0 + beta / 2.0), (-gamma / 2.0, 1.0 + gamma / 2.0), (h - alpha / 2.0, h + 1.0 + alpha / 2.0)]
    power = 0.0 + 0.0j
    e_tot = np.zeros(N_ASYMP, dtype=complex)
    for a, b in pairs:
        pw, e = gamma_ratio_expansion(a, b)
        power += pw
        e_tot += e
    d = exp_series(e_tot)
    logpre = sum(log_sin_power_prefactor(nu) for nu in (alpha, beta, gamma))
    w = float(K)
    acc = np.sum(d * hurwitz_zeta(np.arange(len(d)) - power, w))
    return complex(np.exp(logpre) * acc)


def default_cutoff(t: float, n: int, p: RepParams | None = None) -> int:
    """Series cutoff ``K`` beyond which the tail expansion is accurate.

    ``K`` must dominate the shifts of the Gamma ratios and the first-order
    coefficient of their joint expansion, which grows like ``|t| |n| / 8``.
    """
    alpha = kernel_exponents(p or RepParams(0.0, 0.0), t)[0]
    first = abs((1.0 + alpha) * (abs(n) / 2.0))
    return int(max(12 * (abs(n) / 2.0 + abs(t) / 4.0 + 12.0), first / 2.0)) + 16


def f_plain(p: RepParams, t: float, n: int, K: int | None = None) -> complex:
    """``F_n(1) = int_{S^1} l(c) e^{inc} dc`` for even ``n`` by the series."""
    if n % 2:
        raise ValueError("n must be even")
    exps = kernel_exponents(p, t)
    alpha, beta, gamma = exps[0], exps[1], exps[2]
    h = n // 2
    K = K or default_cutoff(t, n, p)
    j = np.arange(-K + 1, K)
    logs = log_fourier_abs_sin(beta, j) + log_fourier_abs_sin(gamma, j) + log_fourier_abs_sin(alpha, j + h)
    # sum small terms first for a reproducible, well-conditioned reduction
    terms = np.exp(logs)
    core = np.sum(terms[np.argsort(np.abs(terms))])
    upper = _tail((alpha, beta, gamma), h, K)
    lower = _tail((alpha, beta, gamma), -h, K)
    return complex(2.0 * math.pi * (core + upper + lower))


def f_plain_direct(p: RepParams, t: float, n: int, K: int) -> complex:
    """Truncated series without tail corrections (for diagnostics)."""
    alpha, beta, gamma = kernel_exponents(p, t)
    j = np.arange(-K, K + 1)
    logs = log_fourier_abs_sin(beta, j) + log_fourier_abs_sin(gamma, j) + log_fourier_abs_sin(alpha, j + n // 2)
    return complex(2.0 * math.pi * np.exp(logs).sum())


def f_trig(p: RepParams, t: float, coeffs: dict[int, complex]) -> complex:
    """``int l(c) u(c) dc`` for ``u = sum_k coeffs[k] e^{ikc}`` with even ``k``."""
    total = 0.0 + 0.0j
    for k, v in coeffs.items():
        if k % 2:
            raise ValueError("only even frequencies are compatible with the kernel")
        total += v * f_plain(p, t, k)
    return total
