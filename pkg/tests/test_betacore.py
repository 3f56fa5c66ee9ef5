import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triperiod.betacore import (
    alpha_constant,
    beta_change_of_vars,
    bump,
    general_beta,
    general_beta_main,
    general_beta_pullback,
    pullback_amplitude,
    scaled_beta,
    scaled_beta_main,
    std_beta,
    std_beta_main,
)
from triperiod.errors import DomainError

SIG, SIGP = -0.5 + 0.2j, -0.5 - 0.1j

# independent mpmath quadrature (25 digits)
STD_ORACLE = 0.29047931167437324 - 0.2690850211541781j  # t = 20, bump(0.9), (SIG, SIGP)
GEN_ORACLE = 0.029028347156303758 + 0.32227415525605835j  # h = sin, t = 30, c = 0.3, bump(0.5), (-1/2, -1/2)


def test_std_beta_oracle():
    r = std_beta(20j, SIG, SIGP, bump(0.9), 1e-12)
    assert abs(r.value - STD_ORACLE) < 1e-12


def test_general_beta_oracle():
    r = general_beta(np.sin, 30j, -0.5, -0.5, 0.3, bump(0.5), 1e-12)
    assert abs(r.value - GEN_ORACLE) < 1e-12


@pytest.mark.parametrize(
    "sigma, sigma_p",
    [(-1.0, 0.0), (-0.3, -0.3), (-0.5 + 0j, -0.4)],
)
def test_exponent_checks(sigma, sigma_p):
    with pytest.raises(DomainError):
        std_beta(10j, sigma, sigma_p, bump())


def test_lambda_must_be_imaginary():
    with pytest.raises(DomainError):
        std_beta(0.5 + 10j, -0.5, -0.5, bump())


@pytest.mark.parametrize("c", [0.0, 0.5, -0.7])
def test_general_offset_range(c):
    with pytest.raises(DomainError):
        general_beta(np.sin, 10j, -0.5, -0.5, c, bump(0.4))


def test_general_support_range():
    with pytest.raises(DomainError):
        general_beta(np.sin, 10j, -0.5, -0.5, 0.2, bump(0.6))


def test_alpha_constant():
    assert alpha_constant(5.0) == pytest.approx(math.sqrt(math.pi) * np.exp(-1j * math.pi / 4))
    assert alpha_constant(-5.0) == pytest.approx(np.conj(alpha_constant(5.0)))


@pytest.mark.parametrize("a", [0.3, 0.05, 0.01])
@pytest.mark.parametrize("t", [40.0, -90.0])
def test_scaled_identity(a, t):
    psi = bump(0.5, 0.05)
    d = scaled_beta(1j * t, SIG, SIGP, a, psi, 1e-11)
    s = scaled_beta(1j * t, SIG, SIGP, a, psi, 1e-11, form="scaled")
    assert abs(d.value - s.value) <= d.err_estimate + s.err_estimate + 1e-11


def test_scaled_main_term_is_scaled_std():
    a, t = 0.2, 60.0
    factor = np.exp((SIG + SIGP + 1 + 2j * t) * math.log(a))
    assert scaled_beta_main(1j * t, SIG, SIGP, a, 0.7) == pytest.approx(factor * std_beta_main(1j * t, SIG, SIGP, 0.7))


@settings(max_examples=10)
@given(c=st.floats(0.02, 0.45), t=st.floats(5.0, 80.0))
def test_identity_h_reduces_to_scaled(c, t):
    phi = bump(0.5)
    g = general_beta(lambda s: s, 1j * t, SIG, SIGP, c, phi, 1e-11)
    s = scaled_beta(1j * t, SIG, SIGP, c, phi, 1e-11)
    assert abs(g.value - s.value) <= g.err_estimate + s.err_estimate + 1e-11


@given(c=st.floats(0.01, 0.49), s=st.floats(-1.0, 1.0))
def test_x_map_identity(c, s):
    a, x_map = beta_change_of_vars(lambda u: u, c)
    assert a == c
    assert x_map(s) == pytest.approx(s, abs=1e-12)


@pytest.mark.parametrize("c", [0.05, 0.3, 0.45])
def test_x_map_smooth_across_zero(c):
    _, x_map = beta_change_of_vars(np.sin, c)
    h = 0.02
    s = np.linspace(-0.3, 0.3, 61)
    d4 = (x_map(s - 2 * h) - 4 * x_map(s - h) + 6 * x_map(s) - 4 * x_map(s + h) + x_map(s + 2 * h)) / h**4
    away = np.abs(s) > 0.2
    # same order of magnitude at 0 as away from it: no kink
    assert np.max(np.abs(d4)) <= 10 * max(np.max(np.abs(d4[away])), 1.0)


def test_x_map_rejects_bad_h():
    with pytest.raises(DomainError):
        beta_change_of_vars(np.cos, 0.2)


@pytest.mark.parametrize("c", [0.1, 0.3])
def test_pullback_value_matches(c):
    phi = bump(0.5)
    g = general_beta(np.sin, 50j, SIG, SIGP, c, phi, 1e-10)
    pb = general_beta_pullback(np.sin, 50j, SIG, SIGP, c, phi, 1e-10)
    assert abs(g.value - pb.value) < 1e-7


@pytest.mark.parametrize("c", [0.1, 0.3])
def test_main_term_invariant_under_pullback(c):
    phi = bump(0.5)
    a, psi = pullback_amplitude(np.sin, SIG, SIGP, c, phi)
    t = 70.0
    assert a == pytest.approx(math.sin(c))
    via_std = np.exp((SIG + SIGP + 1 + 2j * t) * math.log(a)) * std_beta_main(1j * t, SIG, SIGP, psi.scaled(a))
    assert general_beta_main(np.sin, 1j * t, SIG, SIGP, c, phi) == pytest.approx(via_std, rel=1e-12)


def test_std_remainder_shrinks():
    phi = bump(0.9)
    errs = [abs(std_beta(1j * t, SIG, SIGP, phi, 1e-12).value - std_beta_main(1j * t, SIG, SIGP, phi)) for t in (100.0, 400.0)]
    # t^{-3/2}: a factor 4 in t gives a factor 8
    assert 5 < errs[0] / errs[1] < 12


def test_bump_shape():
    b = bump(0.5, 0.1, 2.0)
    assert b(0.1) == pytest.approx(2.0)
    assert b(0.6) == 0 and b(-0.4) == 0
    assert b.scaled(2.0).support == pytest.approx((-0.2, 0.3))
