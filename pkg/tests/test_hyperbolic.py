import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahgraph.errors import DomainError
from ahgraph.hyperbolic import (HyperbolicSpace, ambient_metric, ball_volume, ball_volume_h3,
                                lapse, lapse_from_rho, omega, sphere_area)
from ahgraph.levels import isoperimetric_check


@pytest.mark.parametrize("n, expected", [(2, 2 * math.pi), (3, 4 * math.pi),
                                         (4, 2 * math.pi**2), (5, 8 * math.pi**2 / 3)])
def test_unit_sphere_area(n, expected):
    assert omega(n) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("r", [0.1, 0.7, 1.5, 3.0, 5.0])
def test_ball_volume_closed_forms(r):
    assert ball_volume(3, r) == pytest.approx(ball_volume_h3(r), rel=1e-12)
    # sinh^3 = (cosh^3 - 3 cosh) / 3 + 2/3 antiderivative
    closed4 = 2 * math.pi**2 * ((math.cosh(r) ** 3 / 3 - math.cosh(r)) + 2.0 / 3.0)
    assert ball_volume(4, r) == pytest.approx(closed4, rel=1e-10)


def test_zero_radius_and_bad_input():
    assert ball_volume(3, 0.0) == 0.0
    with pytest.raises(DomainError):
        ball_volume(3, -1.0)
    with pytest.raises(DomainError):
        sphere_area(2, 1.0)


def test_lapse_and_metric():
    r = 1.3
    assert lapse(r) == pytest.approx(math.cosh(r))
    assert lapse_from_rho(math.sinh(r)) == pytest.approx(math.cosh(r))
    assert ambient_metric(r) == pytest.approx((1.0, math.sinh(r) ** 2, math.cosh(r) ** 2))


def test_space_wrapper_matches_functions():
    h = HyperbolicSpace(4)
    assert h.omega == omega(4)
    assert h.sphere_area(1.1) == sphere_area(4, 1.1)
    assert h.ball_volume(1.1) == ball_volume(4, 1.1)


@given(st.integers(3, 6), st.floats(0.01, 6.0))
def test_isoperimetric_slack_nonnegative(n, r):
    assert isoperimetric_check(n, r) >= 0.0


@given(st.integers(3, 6), st.floats(0.05, 5.0))
def test_derivative_of_volume_is_area(n, r):
    h = 1e-3
    d = (ball_volume(n, r - 2 * h) - 8 * ball_volume(n, r - h)
         + 8 * ball_volume(n, r + h) - ball_volume(n, r + 2 * h)) / (12 * h)
    assert d == pytest.approx(sphere_area(n, r), rel=1e-6)
