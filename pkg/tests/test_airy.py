import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import airy as scipy_airy

from triperiod.airy import AI_FIRST_ZERO, AI_PEAK_X, airy, airy_half_max_interval, airy_half_width, airy_integral
from triperiod.errors import RangeError


@pytest.mark.parametrize("x", [-60.0, -8.5, -8.0, -3.3, -1.0, 0.0, 0.7, 3.99, 4.0, 4.01, 9.0, 30.0])
def test_against_scipy(x):
    ref = scipy_airy(x)[0]
    assert airy(x) == pytest.approx(ref, rel=1e-9, abs=1e-13)


@given(st.floats(-40.0, 12.0))
def test_against_scipy_property(x):
    assert abs(airy(x) - scipy_airy(x)[0]) <= 1e-9 * max(1.0, abs(x)) ** -0.25


@pytest.mark.parametrize("x", [-5.0, -1.0, 0.0, 2.0])
def test_against_contour_integral(x):
    assert airy(x) == pytest.approx(airy_integral(x), abs=1e-10)


def test_vectorized_shape():
    x = np.linspace(-10, 10, 12).reshape(3, 4)
    assert airy(x).shape == (3, 4)


@pytest.mark.parametrize("x", [100.5, -101.0, np.nan])
def test_range(x):
    with pytest.raises(RangeError):
        airy(x)


def test_landmarks():
    assert abs(airy(AI_FIRST_ZERO)) < 1e-13
    h = 1e-5
    assert abs(airy(AI_PEAK_X + h) - airy(AI_PEAK_X - h)) < 1e-12


def test_half_width_level():
    b = airy_half_width()
    # |Ai| >= Ai(0)/2 on [-b, b] with equality at one end
    assert b == pytest.approx(0.759464503584661, abs=1e-10)
    assert min(abs(airy(b)), abs(airy(-b))) == pytest.approx(0.5 * airy(0.0), rel=1e-9)


def test_half_max_interval():
    lo, hi = airy_half_max_interval()
    half = 0.5 * airy(AI_PEAK_X) ** 2
    assert airy(lo) ** 2 == pytest.approx(half, rel=1e-9)
    assert airy(hi) ** 2 == pytest.approx(half, rel=1e-9)
    assert hi - lo == pytest.approx(1.6298, abs=1e-4)
