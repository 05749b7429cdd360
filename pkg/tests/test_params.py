import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_spectra.errors import DomainError, NumericError
from hankel_spectra.params import (
    CONSTANTS_QUAD, CutoffFn, DifferenceOrder, Kind, ModelWeight, QuadratureConfig, SymbolSpec,
    base_profile, eval_cutoff, eval_model_seq, eval_model_weight, eval_target_seq,
    iterated_difference, laplace_In, max_difference_order, model_sequence, target_sequence,
)


def test_spec_validation():
    with pytest.raises(DomainError):
        SymbolSpec(d=0)
    with pytest.raises(DomainError):
        SymbolSpec(gamma=0.0)
    with pytest.raises(DomainError):
        SymbolSpec(b1=2.0, kind=Kind.PURE_POWER)
    s = SymbolSpec(2, 1.0, 1.0, -1.0, "general")
    assert s.kind is Kind.GENERAL
    assert SymbolSpec.from_dict(s.to_dict()) == s
    assert s.swapped() == SymbolSpec(2, 1.0, -1.0, 1.0, Kind.GENERAL)


def test_target_examples():
    assert eval_target_seq(SymbolSpec(1, 1.0), 2) == pytest.approx(1 / (2 * math.log(2)), rel=1e-15)
    assert eval_target_seq(SymbolSpec(2, 1.0, 1.0, 1.0, Kind.GENERAL), 3) == 0.0
    # independent 30-digit evaluation
    with mpmath.workdps(30):
        ref = float(mpmath.mpf(10) ** -2 * mpmath.log(10) ** mpmath.mpf(-0.5))
    assert eval_target_seq(SymbolSpec(2, 0.5), 10) == pytest.approx(ref, rel=1e-14)


def test_target_errors():
    with pytest.raises(DomainError):
        eval_target_seq(SymbolSpec(1, 1.0), 1)
    with pytest.raises(DomainError):
        eval_target_seq(SymbolSpec(1, 1.0, kind=Kind.MODEL), 5)
    with pytest.raises(NumericError):
        eval_target_seq(SymbolSpec(1, 1.0, 1e308, 1e308, Kind.GENERAL), 2)


def test_parity_decomposition():
    spec = SymbolSpec(2, 0.7, 0.3, -1.2, Kind.GENERAL)
    j = np.arange(2, 10001)
    p = j ** -2.0 * np.log(j) ** -0.7
    a = target_sequence(spec, 10001)[2:]
    assert np.allclose(a, 0.3 * p + (-1.0) ** j * -1.2 * p, rtol=1e-13, atol=0)


def test_extension_modes():
    spec = SymbolSpec(1, 1.0, 1.0, 0.5, Kind.GENERAL)
    prof = target_sequence(spec, 5)
    const = target_sequence(spec, 5, extension="constant")
    p2 = base_profile(spec, 3)[2]
    assert prof[1] == pytest.approx((1.0 - 0.5) * p2)
    assert const[0] == const[1] == const[2]
    # profile extension keeps swap == parity conjugation exactly
    sw = target_sequence(spec.swapped(), 5)
    assert np.allclose(sw, prof * (-1.0) ** np.arange(5), rtol=1e-15)


def test_difference_order():
    assert max_difference_order(0.3) == 0
    assert max_difference_order(0.5) == 1
    assert max_difference_order(2.7) == 3
    with pytest.raises(DomainError):
        DifferenceOrder.for_gamma(2, 0.9)


def test_iterated_difference_examples():
    assert iterated_difference(lambda j: 7.0, 1, 3) == 0
    assert iterated_difference(lambda j: j, 1, 4) == 1
    assert iterated_difference(lambda j: j, 2, 4) == 0
    assert iterated_difference(lambda j: j * j, 2, 5) == 2
    assert iterated_difference(lambda j: j * j, 0, 5) == 25


@given(st.lists(st.floats(-10, 10), min_size=12, max_size=12),
       st.lists(st.floats(-10, 10), min_size=12, max_size=12),
       st.floats(-3, 3), st.integers(0, 3), st.integers(0, 8))
def test_difference_linearity(u, v, c, m, j):
    f, g = (lambda k: u[k]), (lambda k: v[k])
    lhs = iterated_difference(lambda k: c * u[k] + v[k], m, j)
    rhs = c * iterated_difference(f, m, j) + iterated_difference(g, m, j)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_cutoff():
    chi = CutoffFn()
    assert eval_cutoff(chi, 0.25) == 1.0
    assert eval_cutoff(chi, 0.9) == 0.0
    assert eval_cutoff(chi, 0.625) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        eval_cutoff(chi, 0.0)
    t = np.linspace(0.5, 0.75, 1000)
    vals = chi(t)
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.all(np.diff(vals) <= 0)


def test_model_weight():
    w1 = ModelWeight(SymbolSpec(1, 1.0))
    assert eval_model_weight(w1, math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    assert eval_model_weight(ModelWeight(SymbolSpec(3, 2.0)), 0.8) == 0.0
    w2 = ModelWeight(SymbolSpec(2, 1.0))
    assert eval_model_weight(w2, 0.25) == pytest.approx(0.25 / math.log(4), rel=1e-14)
    with pytest.raises(DomainError):
        eval_model_weight(w1, -1.0)


def _mp_model(d, gamma, j):
    # 30-digit oracle for (L w)(j)
    with mpmath.workdps(30):
        def w(t):
            chi = 1 if t <= 0.5 else 1 / (1 + mpmath.exp(1 / (0.75 - t) - 1 / (t - 0.5)))
            return t ** (d - 1) * abs(mpmath.log(t)) ** (-gamma) * chi / math.factorial(d - 1)
        f = lambda t: w(t) * mpmath.exp(-t * j)
        pts = [0] + [mpmath.mpf(2) ** -k for k in range(40, 0, -1)] + [0.75]
        return float(mpmath.quad(f, pts))


@pytest.mark.parametrize("d,gamma,j", [(1, 1.0, 3), (2, 0.5, 20), (3, 2.0, 7)])
def test_model_seq_oracle(d, gamma, j):
    spec = SymbolSpec(d, gamma, kind=Kind.MODEL)
    assert eval_model_seq(spec, j, QuadratureConfig(tol=1e-300, rel_tol=1e-12)) == \
        pytest.approx(_mp_model(d, gamma, j), rel=1e-9)


def test_model_seq_properties():
    spec = SymbolSpec(1, 1.0, kind=Kind.MODEL)
    a = model_sequence(spec, 200)
    assert np.all(a > 0)
    flip = model_sequence(SymbolSpec(1, 1.0, 0.0, 1.0, Kind.MODEL), 20)
    assert np.all(np.sign(flip[1:]) == (-1.0) ** np.arange(1, 20))
    r = [eval_model_seq(spec, j) * j * math.log(j) for j in (10**4, 10**6)]
    assert all(abs(x - 1) < 2.0 / math.log(j) for x, j in zip(r, (10**4, 10**6)))


def test_model_seq_self_consistency():
    spec = SymbolSpec(2, 1.0, kind=Kind.MODEL)
    for j in (1, 10, 1000):
        a = eval_model_seq(spec, j, QuadratureConfig(tol=1e-10))
        b = eval_model_seq(spec, j, QuadratureConfig(tol=5e-11))
        assert abs(a - b) <= 1e-10


def test_model_seq_budget_failure():
    spec = SymbolSpec(1, 1.0, kind=Kind.MODEL)
    with pytest.raises(NumericError) as err:
        eval_model_seq(spec, 5, QuadratureConfig(tol=1e-300, rel_tol=1e-16, limit=10))
    assert err.value.error_estimate is not None


def test_laplace_asymptotics():
    quad = QuadratureConfig(tol=1e-300, rel_tol=1e-12)
    ts = [1e2, 1e3, 1e4, 1e5, 1e6]
    for n in (0, 1, 2):
        r = np.array([laplace_In(n, t, 1.0, 0.5, quad) * t ** (1 + n) * math.log(t) / math.factorial(n)
                      for t in ts])
        dev = np.abs(r - 1)
        c = np.max(dev * np.log(ts))
        assert np.all(dev <= c / np.log(ts) + 1e-15)
        assert np.all(np.diff(dev) < 0)
    assert laplace_In(0, 1e6, 1.0, 0.5) * 1e6 * math.log(1e6) == pytest.approx(1.0, abs=0.15)


def test_laplace_domain():
    with pytest.raises(DomainError):
        laplace_In(0, 0.5, 1.0, 0.5)
    with pytest.raises(DomainError):
        laplace_In(0, 10.0, 1.0, 1.5)
    with pytest.raises(DomainError):
        laplace_In(-1, 10.0, 1.0, 0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.floats(2.0, 1e5), st.floats(0.3, 3.0))
def test_laplace_matches_scipy(n, t, gamma):
    from scipy import integrate
    f = lambda x: x**n * abs(math.log(x)) ** -gamma * math.exp(-x * t)
    pts = [0.5 * 2.0**-k for k in range(60, 0, -1)] + [0.5]
    ref = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-13)[0] for a, b in zip([0.0] + pts, pts))
    assert laplace_In(n, t, gamma, 0.5, QuadratureConfig(tol=1e-300, rel_tol=1e-11)) == \
        pytest.approx(ref, rel=1e-9)
