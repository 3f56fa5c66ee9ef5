"""Representation parameters, test vectors and the trilinear kernel.

Vectors of the principal series are modelled as smooth functions on the
circle ``S^1 = R / 2 pi Z`` that are invariant under ``c -> c + pi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

from triperiod.errors import DomainError, SingularityError

TWO_PI = 2.0 * math.pi


def cpow(a, w):
    """``a ** w`` for ``a > 0`` and complex ``w`` on the principal branch."""
    return np.exp(w * np.log(a))


@dataclass(frozen=True)
class RepParams:
    """Parameters ``tau``, ``tau_prime`` of the two fixed principal series.

    Both must be purely imaginary. A plain real number ``x`` is accepted
    and read as ``x * 1j``.
    """

    tau: complex
    tau_prime: complex

    def __post_init__(self):
        tau = _as_imaginary(self.tau, "tau")
        tau_prime = _as_imaginary(self.tau_prime, "tau_prime")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "tau_prime", tau_prime)

    @property
    def S_cutoff(self) -> float:
        """Technical spectral cutoff ``2(|tau| + |tau'|) + 1``."""
        return 2.0 * (abs(self.tau) + abs(self.tau_prime)) + 1.0

    def swapped(self) -> "RepParams":
        return RepParams(self.tau_prime, self.tau)


def _as_imaginary(value, name: str) -> complex:
    if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
        return complex(0.0, float(value))
    z = complex(value)
    if z.real != 0.0:
        raise DomainError(f"{name} must be purely imaginary, got {z}")
    return z


@dataclass(frozen=True)
class SpectralParam:
    """Spectral parameter ``lambda``: ``i t`` (principal) or ``s`` in (0, 1)."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("principal", "complementary"):
            raise DomainError(f"unknown spectral parameter kind {self.kind!r}")
        value = float(self.value)
        if not math.isfinite(value):
            raise DomainError("spectral parameter must be finite")
        if self.kind == "complementary" and not 0.0 < value < 1.0:
            raise DomainError(f"complementary parameter must lie in (0, 1), got {value}")
        object.__setattr__(self, "value", value)

    @classmethod
    def principal(cls, t: float) -> "SpectralParam":
        return cls("principal", t)

    @classmethod
    def complementary(cls, s: float) -> "SpectralParam":
        return cls("complementary", s)

    @property
    def lam(self) -> complex:
        if self.kind == "principal":
            return complex(0.0, self.value)
        return complex(self.value, 0.0)

    @property
    def is_principal(self) -> bool:
        return self.kind == "principal"

    @property
    def t(self) -> float:
        """Real ``t`` with ``lambda = i t``; rejects the complementary series."""
        return require_principal(self)


def require_principal(lam: "SpectralParam | float") -> float:
    """Return ``t`` for a principal parameter, raising otherwise.

    A bare float is read as ``t``.
    """
    if isinstance(lam, SpectralParam):
        if not lam.is_principal:
            raise DomainError("operation defined only for the principal series (lambda = i t)")
        return lam.value
    return float(lam)


def as_spectral(lam) -> SpectralParam:
    if isinstance(lam, SpectralParam):
        return lam
    return SpectralParam.principal(float(lam))


def kernel_exponents(p: RepParams, lam: SpectralParam | float):
    """Exponents of ``|sin(x-y)|``, ``|sin(x-z)|``, ``|sin(y-z)|`` in the kernel."""
    lam_c = as_spectral(lam).lam
    tau, taup = p.tau, p.tau_prime
    e_xy = (-tau - taup + lam_c - 1.0) / 2.0
    e_xz = (-tau + taup - lam_c - 1.0) / 2.0
    e_yz = (tau - taup - lam_c - 1.0) / 2.0
    return e_xy, e_xz, e_yz


def eval_kernel(p: RepParams, lam: SpectralParam | float, x, y, z):
    """Trilinear kernel ``K(x, y, z)`` in the circle model.

    Vectorized over broadcastable ``x``, ``y``, ``z``. Raises
    :class:`SingularityError` on the singular set where two angles differ
    by a multiple of ``pi``.
    """
    lam = as_spectral(lam)
    require_principal(lam)
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    s_xy = np.abs(np.sin(x - y))
    s_xz = np.abs(np.sin(x - z))
    s_yz = np.abs(np.sin(y - z))
    if np.any(s_xy == 0.0) or np.any(s_xz == 0.0) or np.any(s_yz == 0.0):
        raise SingularityError("kernel evaluated on its singular set")
    e_xy, e_xz, e_yz = kernel_exponents(p, lam)
    out = np.exp(e_xy * np.log(s_xy) + e_xz * np.log(s_xz) + e_yz * np.log(s_yz))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class CircleFunction:
    """Smooth periodic function on the circle with derivative access.

    Build with :meth:`from_coeffs` for exponential polynomials
    ``sum_k a_k e^{ikc}`` (exact derivatives and Fourier data) or with
    :meth:`from_callable` for a general vectorized callable, in which case
    derivatives come from spectral differentiation of a dense sample.

    Attributes
    ----------
    period : float
        ``pi`` or ``2 pi``.
    even : bool
        Reflection parity flag: ``f(-c) == f(c)``.
    n_max : int
        Highest derivative order supported.
    """

    func: Callable | None = None
    period: float = TWO_PI
    even: bool = False
    coeffs: Mapping[int, complex] | None = None
    n_max: int = 3
    n_grid: int = field(default=512, repr=False)

    def __post_init__(self):
        if not (math.isclose(self.period, math.pi) or math.isclose(self.period, TWO_PI)):
            raise DomainError("period must be pi or 2 pi")
        if self.func is None and self.coeffs is None:
            raise DomainError("CircleFunction needs a callable or coefficients")
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", {int(k): complex(v) for k, v in self.coeffs.items() if v != 0})

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, complex], n_max: int = 8) -> "CircleFunction":
        """Exponential polynomial ``sum_k coeffs[k] e^{ikc}``."""
        coeffs = {int(k): complex(v) for k, v in coeffs.items() if v != 0}
        period = math.pi if all(k % 2 == 0 for k in coeffs) else TWO_PI
        even = all(np.isclose(v, coeffs.get(-k, 0.0)) for k, v in coeffs.items())
        return cls(func=None, period=period, even=even, coeffs=coeffs, n_max=n_max)

    @classmethod
    def from_callable(cls, func: Callable, period: float = math.pi, even: bool = False, n_max: int = 3) -> "CircleFunction":
        return cls(func=func, period=period, even=even, coeffs=None, n_max=n_max)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "CircleFunction":
        return cls.from_coeffs({0: value})

    @property
    def fourier(self) -> dict[int, complex] | None:
        """Exact coefficients when built from an exponential polynomial."""
        return dict(self.coeffs) if self.coeffs is not None else None

    @cached_property
    def _spectral(self) -> tuple[np.ndarray, np.ndarray]:
        # frequencies (integer multiples of 1 in e^{ikc}) and coefficients
        if self.coeffs is not None:
            ks = np.array(sorted(self.coeffs), dtype=float)
            return ks, np.array([self.coeffs[int(k)] for k in ks], dtype=complex)
        m = self.n_grid
        c = np.arange(m) * (self.period / m)
        vals = np.asarray(self.func(c), dtype=complex)
        a = np.fft.fft(vals) / m
        idx = np.fft.fftfreq(m, d=1.0 / m)
        ks = idx * (TWO_PI / self.period)
        keep = np.abs(a) > 1e-15 * max(np.abs(a).max(), 1e-300)
        keep &= np.abs(idx) < m // 2
        return ks[keep], a[keep]

    def __call__(self, c):
        return self.eval(c)

    def eval(self, c):
        c = np.asarray(c, dtype=float)
        if self.func is not None:
            out = np.asarray(self.func(c), dtype=complex)
            return np.broadcast_to(out, c.shape).copy() if out.shape != c.shape else out
        return self.deriv(0, c)

    def deriv(self, order: int, c):
        """``order``-th derivative at ``c``; order 0 is the function itself."""
        if order < 0 or order > self.n_max:
            raise DomainError(f"derivative order must lie in [0, {self.n_max}]")
        if order == 0 and self.func is not None:
            return self.eval(c)
        ks, a = self._spectral
        c = np.asarray(c, dtype=float)
        phase = np.exp(1j * np.multiply.outer(c, ks))
        return phase @ (a * (1j * ks) ** order)

    def cnorm(self, order: int, n_samples: int = 2048) -> float:
        """Sampled ``C^order`` norm: max over ``j <= order`` of sup ``|f^(j)|``.

        For exponential polynomials the coefficient bound
        ``sum |a_k| |k|^j`` is used, which dominates every sample.
        """
        if self.coeffs is not None:
            ks, a = self._spectral
            return float(max(np.sum(np.abs(a) * np.abs(ks) ** j) for j in range(order + 1)))
        c = np.linspace(0.0, self.period, n_samples, endpoint=False)
        return float(max(np.max(np.abs(self.deriv(j, c))) for j in range(order + 1)))

    def times_exp(self, n: int) -> "CircleFunction":
        """Multiply by ``e^{inc}``."""
        if self.coeffs is not None:
            return CircleFunction.from_coeffs({k + n: v for k, v in self.coeffs.items()}, n_max=self.n_max)
        f = self.func
        period = self.period if n % 2 == 0 else TWO_PI
        return CircleFunction.from_callable(lambda c: np.exp(1j * n * np.asarray(c)) * f(c), period=period, n_max=self.n_max)


class Kind(enum.Enum):
    PLAIN = "plain"
    TILDE = "tilde"


@dataclass(frozen=True)
class TestVector:
    """Diagonally K-invariant test vector ``w_n`` or ``w_n + w_{n+2}``."""

    __test__ = False  # not a pytest class

    n: int
    kind: Kind = Kind.PLAIN

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise DomainError("n must be an integer")
        if self.n < 0 or self.n % 2:
            raise DomainError(f"n must be even and nonnegative, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def profile(self) -> CircleFunction:
        """Reduced profile ``phi`` with ``u(c) = e^{inc} phi(c)``."""
        return profile_of(self)

    @property
    def u(self) -> CircleFunction:
        return self.profile.times_exp(self.n)


def make_test_vector(n: int, kind: Kind | str = Kind.PLAIN) -> TestVector:
    return TestVector(n, Kind(kind))


def profile_of(w: TestVector) -> CircleFunction:
    if w.kind is Kind.PLAIN:
        return CircleFunction.from_coeffs({0: 1.0})
    return CircleFunction.from_coeffs({0: 1.0, 2: 1.0})
