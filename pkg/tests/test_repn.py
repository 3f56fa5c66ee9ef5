import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from triperiod import CircleFunction, RepParams, SpectralParam, eval_kernel, make_test_vector
from triperiod.errors import DomainError, SingularityError
from triperiod.repn import Kind, cpow, kernel_exponents

angles = st.floats(-3.0, 3.0, allow_nan=False)
ts = st.floats(-80.0, 80.0, allow_nan=False)


def test_rep_params_reads_reals_as_imaginary():
    p = RepParams(0.3, 0.7)
    assert p.tau == 0.3j and p.tau_prime == 0.7j
    assert p.S_cutoff == pytest.approx(3.0)


def test_rep_params_rejects_real_part():
    with pytest.raises(DomainError):
        RepParams(0.1 + 0.3j, 0.7j)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.2, 1.5])
def test_complementary_range(s):
    with pytest.raises(DomainError):
        SpectralParam.complementary(s)


def test_principal_lam():
    lam = SpectralParam.principal(12.5)
    assert lam.lam == 12.5j and lam.t == 12.5
    with pytest.raises(DomainError):
        SpectralParam.complementary(0.4).t


def test_kernel_all_exponents_minus_half():
    p = RepParams(0.0, 0.0)
    assert eval_kernel(p, 0.0, math.pi / 2, 0.0, math.pi / 4) == pytest.approx(math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("t", [0.0, 7.0, 50.0])
def test_kernel_equilateral_modulus(t):
    v = eval_kernel(RepParams(0.0, 0.0), t, 0.0, math.pi / 3, 2 * math.pi / 3)
    assert abs(v) == pytest.approx(0.75**-0.75, rel=1e-13)


def test_kernel_singular_set():
    with pytest.raises(SingularityError):
        eval_kernel(RepParams(0.3j, 0.7j), 5.0, 0.2, 0.2, 1.0)


def test_kernel_rejects_complementary():
    with pytest.raises(DomainError):
        eval_kernel(RepParams(0.3j, 0.7j), SpectralParam.complementary(0.5), 0.1, 0.5, 1.0)


@given(x=angles, y=angles, z=angles, t=ts)
def test_kernel_modulus_depends_only_on_sines(x, y, z, t):
    prod = abs(math.sin(x - y) * math.sin(x - z) * math.sin(y - z))
    if prod < 1e-6:
        return
    v = eval_kernel(RepParams(0.3j, 0.7j), t, x, y, z)
    assert abs(v) == pytest.approx(prod**-0.5, rel=1e-10)


@given(x=angles, y=angles, z=angles, t=ts)
def test_kernel_swap_identity(x, y, z, t):
    if min(abs(math.sin(x - y)), abs(math.sin(x - z)), abs(math.sin(y - z))) < 1e-6:
        return
    p = RepParams(0.3j, 0.7j)
    a = eval_kernel(p.swapped(), t, x, y, z)
    b = eval_kernel(p, t, y, x, z)
    assert a == pytest.approx(b, rel=1e-10)


def test_kernel_exponent_sum():
    # the three exponents always sum to (-tau - tau' - lam - 3) / 2
    e = kernel_exponents(RepParams(0.3j, 0.7j), 9.0)
    assert sum(e) == pytest.approx((-0.3j - 0.7j - 9j - 3) / 2)


def test_cpow_principal_branch():
    assert cpow(2.0, 1j) == pytest.approx(complex(math.cos(math.log(2)), math.sin(math.log(2))))


@pytest.mark.parametrize("n", [0, 2, 10, 100])
def test_profiles_at_quarter_turn(n):
    assert make_test_vector(n, "plain").profile(math.pi / 2) == pytest.approx(1.0)
    assert abs(make_test_vector(n, "tilde").profile(math.pi / 2)) < 1e-15


@pytest.mark.parametrize("n", [3, -2, 1.5])
def test_test_vector_parity(n):
    with pytest.raises(DomainError):
        make_test_vector(n, Kind.PLAIN)


def test_tilde_u_is_sum_of_plain():
    w = make_test_vector(6, "tilde")
    assert w.u.fourier == {6: 1.0, 8: 1.0}


def test_circle_function_derivatives_exact():
    f = CircleFunction.from_coeffs({2: 1.0, -2: 1.0})  # 2 cos 2c
    c = np.linspace(0, 3, 7)
    assert np.allclose(f(c), 2 * np.cos(2 * c))
    assert np.allclose(f.deriv(1, c), -4 * np.sin(2 * c))
    assert np.allclose(f.deriv(2, c), -8 * np.cos(2 * c))
    assert f.cnorm(2) == pytest.approx(8.0)
    assert f.period == pytest.approx(math.pi) and f.even


def test_circle_function_sampled_derivative():
    f = CircleFunction.from_callable(lambda c: np.exp(np.cos(2 * np.asarray(c))), period=math.pi)
    c = np.linspace(0, 3, 5)
    assert np.allclose(f.deriv(1, c).real, -2 * np.sin(2 * c) * np.exp(np.cos(2 * c)), atol=1e-9)


def test_circle_function_period_checked():
    with pytest.raises(DomainError):
        CircleFunction.from_callable(np.cos, period=1.0)


@given(st.integers(-6, 6), st.floats(-3, 3))
def test_times_exp(n, c):
    f = CircleFunction.from_coeffs({0: 1.0, 2: 0.5})
    g = f.times_exp(n)
    assert complex(g(c)) == pytest.approx(complex(f(c)) * np.exp(1j * n * c))
