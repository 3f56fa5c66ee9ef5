import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import bernoulli, zeta

from triperiod.kseries import (
    bernoulli_poly,
    exp_series,
    f_plain,
    f_plain_direct,
    f_trig,
    hurwitz_zeta,
    log_fourier_abs_sin,
    log_sin,
)
from triperiod.trilinear import b_functional_quad
from triperiod import CircleFunction


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
def test_bernoulli_poly_values(n):
    assert complex(bernoulli_poly(n, 0.0)).real == pytest.approx(bernoulli(n)[n] if n != 1 else -0.5, abs=1e-12)
    # B_n(1 - x) = (-1)^n B_n(x)
    x = 0.3 + 0.2j
    assert bernoulli_poly(n, 1 - x) == pytest.approx((-1) ** n * bernoulli_poly(n, x), abs=1e-10)


@pytest.mark.parametrize("s, w", [(2.5, 40.0), (1.5, 80.5), (3.0, 33.0)])
def test_hurwitz_real(s, w):
    assert hurwitz_zeta(s, w) == pytest.approx(zeta(s, w), rel=1e-12)


@pytest.mark.parametrize("s, w", [(1.5 + 2j, 60.0 + 5j), (2.0 - 1j, 45.0)])
def test_hurwitz_complex(s, w):
    assert complex(hurwitz_zeta(s, w)) == pytest.approx(complex(mpmath.zeta(s, w)), rel=1e-11)


def test_exp_series():
    # exp(w) = sum w^m / m!
    # e[k-1] multiplies w^k, so exp(w) is e = (1, 0, 0, ...)
    d = exp_series(np.array([1.0, 0.0, 0.0, 0.0, 0.0]))
    assert np.allclose(d, [1 / math.factorial(m) for m in range(6)])


@given(st.floats(-2.0, 2.0), st.floats(-60.0, 60.0))
def test_log_sin(x, y):
    z = complex(x, y)
    if abs(math.sin(x)) < 1e-3 and abs(y) < 1e-3:
        return
    v = np.exp(log_sin(z))
    ref = complex(mpmath.sin(z))
    assert abs(v - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("nu, m", [(-0.5, 0), (-0.5, 3), (-0.5 + 4j, -2), (0.7, 1)])
def test_sin_power_fourier_coefficients(nu, m):
    # (1/pi) int_0^pi |sin x|^nu e^{-2imx} dx by mpmath
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda x: mpmath.power(abs(mpmath.sin(x)), nu) * mpmath.exp(-2j * m * x), [0, mpmath.pi / 2, mpmath.pi]) / mpmath.pi
    assert complex(np.exp(log_fourier_abs_sin(nu, m))) == pytest.approx(complex(ref), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("t, n", [(20.0, 8), (150.0, 76), (400.0, 300)])
def test_tail_correction_matches_longer_sum(p, t, n):
    v = f_plain(p, t, n)
    K = 40000
    slow = f_plain_direct(p, t, n, K)
    # plain truncation misses a tail of size about K^{-1/2}
    assert abs(v - slow) < 0.5 * K**-0.5
    assert abs(v - f_plain(p, t, n, K=2 * K)) < 1e-10


def test_trig_linear(p):
    a = f_trig(p, 30.0, {10: 1.0, 12: 2.0})
    assert a == pytest.approx(f_plain(p, 30.0, 10) + 2 * f_plain(p, 30.0, 12), rel=1e-13)


def test_series_against_quadrature_of_u(p):
    q = b_functional_quad(p, 5.0, CircleFunction.from_coeffs({4: 1.0}))
    assert abs(q.value - f_plain(p, 5.0, 4)) <= q.err_estimate + 1e-10
