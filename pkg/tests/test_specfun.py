"""
Tests for the special functions in briesz.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from briesz.exceptions import DomainError
from briesz.models import SpecFunConfig
from briesz.specfun import SpecialFunctions, bessel_j, bessel_ratio, bessel_zeros, gamma


def test_gamma_values():
    """Test Gamma at integers and at one half."""
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert isinstance(gamma(2.5), float)


def test_gamma_against_mpmath():
    """Test Gamma on (0, 50] against an extended precision oracle."""
    xs = np.concatenate([np.linspace(0.01, 1.0, 25), np.linspace(1.0, 50.0, 50)])
    values = gamma(xs)
    mpmath.mp.dps = 30
    for x, value in zip(xs, values):
        assert value == pytest.approx(float(mpmath.gamma(mpmath.mpf(float(x)))), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=40.0))
def test_gamma_recurrence(x):
    """Test Gamma(x + 1) = x Gamma(x)."""
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


def test_gamma_domain():
    """Test that nonpositive arguments are rejected."""
    with pytest.raises(DomainError):
        gamma(0.0)
    with pytest.raises(DomainError):
        gamma(np.array([1.0, -2.0]))


def test_bessel_j_values():
    """Test Bessel J at closed-form points."""
    assert bessel_j(0.0, 0.0) == pytest.approx(1.0, rel=1e-14)
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2.0 / math.pi, abs=1e-12)
    assert bessel_j(1.0, 1.0) == pytest.approx(0.44005058574493355, abs=1e-12)
    assert bessel_j(2.0, 0.0) == 0.0


@pytest.mark.parametrize("order", [0.0, 0.5, 1.0, 1.5, 2.5, 5.0, 10.0])
def test_bessel_j_against_scipy(order):
    """Test Bessel J against scipy.special.jv on both branches."""
    xs = np.concatenate([[0.0], np.geomspace(0.01, 1000.0, 400)])
    expected = special.jv(order, xs)
    np.testing.assert_allclose(bessel_j(order, xs), expected, rtol=0, atol=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1.0, max_value=10.0), st.floats(min_value=0.1, max_value=100.0))
def test_bessel_recurrence(order, x):
    """Test J_(nu-1) + J_(nu+1) = (2 nu / x) J_nu."""
    lhs = bessel_j(order - 1.0, x) + bessel_j(order + 1.0, x)
    rhs = 2.0 * order / x * bessel_j(order, x)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-9)


def test_bessel_bounded():
    """Test |J_nu(x)| <= 1."""
    xs = np.geomspace(1e-3, 1e3, 500)
    for order in [0.0, 0.3, 1.0, 2.7, 8.0]:
        assert np.all(np.abs(bessel_j(order, xs)) <= 1.0)


@pytest.mark.parametrize("order", [0.0, 0.5, 1.5, 3.0])
def test_series_and_asymptotic_branches_overlap(order):
    """Test that both branches agree around the crossover."""
    series = SpecialFunctions(SpecFunConfig(crossover_x=1e9))
    asymptotic = SpecialFunctions(SpecFunConfig(crossover_x=1e-9))
    xs = np.linspace(18.0, 22.0, 41)
    np.testing.assert_allclose(series.bessel_j(order, xs), asymptotic.bessel_j(order, xs), rtol=0, atol=1e-8)


def test_bessel_ratio_continuity_at_crossover():
    """Test the ratio has no jump at the switch point."""
    functions = SpecialFunctions()
    x0 = functions.config.crossover_x
    below = functions.bessel_ratio(1.5, np.nextafter(x0, 0.0))
    at = functions.bessel_ratio(1.5, x0)
    assert abs(at - below) <= 1e-9 * max(abs(at), 1e-3)


def test_bessel_ratio_values():
    """Test the radial profile at the origin and at a zero."""
    assert bessel_ratio(0.0, 0.0) == pytest.approx(1.0, rel=1e-14)
    assert bessel_ratio(1.0, 0.0) == pytest.approx(0.5, rel=1e-14)
    assert bessel_ratio(0.5, math.pi) == pytest.approx(0.0, abs=1e-12)
    xs = np.linspace(0.1, 50.0, 100)
    np.testing.assert_allclose(bessel_ratio(2.5, xs), special.jv(2.5, xs) / xs**2.5, rtol=1e-8, atol=1e-14)


def test_bessel_domain():
    """Test that negative orders and arguments are rejected."""
    with pytest.raises(DomainError):
        bessel_j(-0.5, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)
    with pytest.raises(DomainError):
        bessel_ratio(1.0, np.array([0.0, -0.1]))


def test_bessel_zeros():
    """Test zeros against scipy.special.jn_zeros."""
    np.testing.assert_allclose(bessel_zeros(0.0, 10.0), special.jn_zeros(0, 3), rtol=1e-10)
    np.testing.assert_allclose(bessel_zeros(1.0, 20.0), special.jn_zeros(1, 6), rtol=1e-10)
    assert bessel_zeros(1.0, -1.0).size == 0


if __name__ == "__main__":
    pytest.main([__file__])
