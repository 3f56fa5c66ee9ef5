import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from triperiod import CircleFunction, RepParams, make_test_vector
from triperiod.errors import DomainError
from triperiod.trilinear import (
    b_functional,
    b_functional_2d,
    b_functional_quad,
    f_functional,
    h_form,
    l_kernel,
    l_values,
)

# independent mpmath quadrature (30 digits) of the factored kernel integral
L_ORACLE = {
    (10.0, 1.0): 0.20209532731800975 + 0.5075012776345315j,
    (25.0, 0.4): -0.20837095801711542 - 0.1124601235471926j,
    (3.0, 2.0): -0.22380211590595772 + 0.7870278723197336j,
}


@pytest.mark.parametrize("t, c", sorted(L_ORACLE))
def test_kernel_against_frozen_oracle(p, t, c):
    r = l_kernel(p, t, c, 1e-12)
    assert abs(r.value - L_ORACLE[t, c]) < 1e-12


def test_reduction_forms_agree_on_random_points(p):
    rng = np.random.default_rng(5)
    for _ in range(20):
        t, c = rng.uniform(-60, 60), rng.uniform(-3, 3)
        a = l_kernel(p, t, c, 1e-10)
        b = l_kernel(p, t, c, 1e-10, "factored")
        assert abs(a.value - b.value) <= a.err_estimate + b.err_estimate + 1e-12


@given(t=st.floats(-80, 80), c=st.floats(0.05, 3.09))
def test_swap_parity(p, t, c):
    a = l_kernel(p, t, -c, 1e-11)
    b = l_kernel(p.swapped(), t, c, 1e-11)
    assert abs(a.value - b.value) <= a.err_estimate + b.err_estimate + 1e-12


@given(t=st.floats(-50, 50), c=st.floats(0.05, 3.0))
def test_kernel_is_pi_periodic(p, t, c):
    a = l_kernel(p, t, c, 1e-11)
    b = l_kernel(p, t, c + math.pi, 1e-11)
    assert abs(a.value - b.value) <= a.err_estimate + b.err_estimate + 1e-12


def test_l_values_vectorizes(p):
    cs = [0.3, 1.0, 2.5]
    vals = l_values(p, 12.0, cs)
    assert np.allclose(vals, [l_kernel(p, 12.0, c).value for c in cs], atol=1e-9)


def test_unknown_form(p):
    with pytest.raises(DomainError):
        l_kernel(p, 5.0, 1.0, form="bogus")


def test_series_against_quadrature(p):
    u = CircleFunction.from_coeffs({0: 1.0})
    q = b_functional_quad(p, 3.0, u)
    s = b_functional(p, 3.0, u, method="series")
    assert abs(q.value - s) <= q.err_estimate + 1e-10


@pytest.mark.slow
def test_rank_one_against_two_variable_definition(p):
    u = CircleFunction.from_coeffs({2: 1.0})
    r = b_functional_2d(p, 3.0, u, 1e-6)
    s = b_functional(p, 3.0, u, method="series")
    assert abs(r.value - s) <= r.err_estimate + 1e-9
    assert h_form(p, 3.0, make_test_vector(2)) == pytest.approx(abs(r.value) ** 2, rel=1e-6)


@pytest.mark.parametrize("t, n", [(5.0, 4), (40.0, 20), (120.0, 64)])
def test_rank_one_identity(p, t, n):
    w = make_test_vector(n, "tilde")
    b = b_functional(p, t, w.u)
    assert h_form(p, t, w) == pytest.approx(abs(b) ** 2, rel=1e-12)


def test_zero_profile(p):
    assert f_functional(p, 30.0, 10, CircleFunction.from_coeffs({})) == 0


@pytest.mark.parametrize("t, n", [(30.0, 10), (200.0, 100), (77.0, 40)])
def test_tilde_decomposition(p, t, n):
    one = CircleFunction.constant()
    lhs = f_functional(p, t, n, CircleFunction.from_coeffs({0: 1.0, 2: 1.0}))
    rhs = f_functional(p, t, n, one) + f_functional(p, t, n + 2, one)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_oscillatory_regime_is_small(p):
    # t = 400, n = 150: no critical point, far below C t^{-1}
    F = f_functional(p, 400.0, 150, CircleFunction.constant())
    assert abs(F) * 400.0 < 1e-9


@given(
    a=st.lists(st.floats(0.0, 10.0), min_size=1, max_size=30),
    data=st.data(),
)
def test_geometric_comparison_positivity(a, data):
    # nonnegative step functions on cells of random measure
    b = data.draw(st.lists(st.floats(0.0, 10.0), min_size=len(a), max_size=len(a)))
    mu = data.draw(st.lists(st.floats(0.0, 5.0), min_size=len(a), max_size=len(a)))
    u, v, m = map(np.asarray, (a, b, mu))
    assert np.sum(m * u**2) <= np.sum(m * (u + v) ** 2)


@pytest.mark.parametrize("coeffs", [{0: 1.0}, {0: 1.0, 2: 0.5j, -4: 0.3}, {2: 1.0, -2: -0.4 + 0.2j}])
@pytest.mark.parametrize("t", [3.0, 11.0, 25.0])
def test_b_modulus_even_in_lambda(p, coeffs, t):
    u = CircleFunction.from_coeffs(coeffs)
    a, b = b_functional(p, t, u, 1e-10), b_functional(p, -t, u, 1e-10)
    assert abs(a) == pytest.approx(abs(b), rel=1e-8, abs=1e-12)
