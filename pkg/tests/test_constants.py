import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hankel_spectra.constants import (
    AsymptoticConstants, asymptotic_constants, c_dgamma, c_plus_minus, closed_form_c1, phi_check,
    phi_check_closed, phi_check_convolution, phi_d, power_integral,
)
from hankel_spectra.errors import DomainError, NumericError
from hankel_spectra.params import Kind, SymbolSpec


def test_phi_d():
    for d in (1, 2, 5):
        assert phi_d(0.0, d) == 1.0
    with mpmath.workdps(30):
        ref = float(mpmath.sech(1) ** 2)
    assert phi_d(2.0, 2) == pytest.approx(ref, rel=1e-15)
    assert ref == pytest.approx(0.419974, abs=1e-6)
    assert phi_d(1e4, 3) == 0.0
    with pytest.raises(DomainError):
        phi_d(0.0, 0)


@given(st.floats(-200, 200), st.integers(1, 6))
def test_phi_even(x, d):
    assert phi_d(x, d) == phi_d(-x, d)


def test_phi_check_examples():
    assert phi_check(0.0, 1) == pytest.approx(2 * math.pi, rel=1e-12)
    assert phi_check(0.0, 2) == pytest.approx(4.0, rel=1e-12)
    for x in (0.05, 0.1, 0.2):
        assert phi_check(x, 1) == pytest.approx(2 * math.pi / math.cosh(2 * math.pi**2 * x), rel=1e-9)
    with pytest.raises(NumericError):
        phi_check(3.0, 1)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_closed_form_agrees_with_quadrature(d):
    for x in (0.0, 0.03, 0.1, 0.25):
        assert phi_check(x, d) == pytest.approx(phi_check_closed(x, d), rel=1e-9)
    xs = np.linspace(-2, 2, 101)
    assert np.all(phi_check_closed(xs, d) > 0)


@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_c1_closed_form(gamma):
    c = c_dgamma(1, gamma)
    assert c.C_dgamma == pytest.approx(closed_form_c1(gamma), rel=1e-8)
    # independent mpmath evaluation of the Beta-function form
    with mpmath.workdps(30):
        g = mpmath.mpf(gamma)
        ref = 2 ** -g * mpmath.pi ** (1 - 2 * g) * mpmath.beta(1 / (2 * g), mpmath.mpf(1) / 2) ** g
    assert closed_form_c1(gamma) == pytest.approx(float(ref), rel=1e-13)


def test_c11_half():
    assert c_dgamma(1, 1.0).C_dgamma == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_inversion_identity(d):
    total, err = power_integral(d, 1.0)
    assert abs(total - 1.0) <= 1e-8
    assert c_dgamma(d, 1.0).C_dgamma == pytest.approx(1.0 / (2**d * math.factorial(d - 1)), rel=1e-8)


def test_c_decreasing_in_d():
    vals = [c_dgamma(d, 1.0).C_dgamma for d in range(1, 6)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_semigroup():
    for x in (0.0, 0.05, 0.1, 0.2, 0.3):
        assert phi_check_convolution(x, 1, 1) == pytest.approx(phi_check_closed(x, 2), rel=1e-6)
        assert phi_check_convolution(x, 1, 2) == pytest.approx(phi_check_closed(x, 3), rel=1e-6)


def test_plus_minus_examples():
    C = c_dgamma(2, 1.0).C_dgamma
    one = c_dgamma(2, 1.0, b1=1.0, bm1=0.0)
    assert (one.C_plus, one.C_minus) == (C, 0.0)
    two = c_dgamma(2, 1.0, b1=1.0, bm1=1.0)
    assert two.C_plus == pytest.approx(2 * C) and two.C_minus == 0.0
    neg = c_dgamma(2, 1.0, b1=-1.0, bm1=0.0)
    assert (neg.C_plus, neg.C_minus) == (0.0, C)
    with pytest.raises(DomainError):
        c_plus_minus(AsymptoticConstants(1, 1.0))


@given(st.floats(-5, 5), st.floats(-5, 5), st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.1, 10))
def test_plus_minus_homogeneous(b1, bm1, gamma, c):
    base = AsymptoticConstants(1, gamma, b1, bm1, 0.3)
    scaled = AsymptoticConstants(1, gamma, c * b1, c * bm1, 0.3)
    for u, v in zip(c_plus_minus(base), c_plus_minus(scaled)):
        assert v == pytest.approx(c * u, rel=1e-12, abs=1e-300)
        assert u >= 0


def test_domain_and_roundtrip():
    with pytest.raises(DomainError):
        c_dgamma(1, 0.0)
    with pytest.raises(DomainError):
        c_dgamma(0, 1.0)
    c = asymptotic_constants(SymbolSpec(2, 0.5, 1.0, -2.0, Kind.GENERAL))
    assert AsymptoticConstants.from_dict(c.to_dict()) == c
    assert c.C_plus > 0 and c.C_minus > 0 and c.quad_error >= 0
