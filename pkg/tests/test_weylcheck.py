import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_spectra.constants import c_dgamma, phi_check_closed
from hankel_spectra.errors import ConfigurationError, DomainError
from hankel_spectra.weylcheck import (
    PsdoOperator, PsdoSpec, build_psdo_matrix, grid_diagnostics, japanese_bracket_spec,
    loglog_slope, model_psdo_spec, predict_for, psdo_spectrum, weyl_predict, weyl_verify,
)

ONE = lambda x: np.ones_like(np.asarray(x, dtype=float))
ZERO = lambda x: np.zeros_like(np.asarray(x, dtype=float))


def test_identity_and_zero():
    spec = PsdoSpec(ONE, ONE, 1.0, 64)
    assert np.allclose(build_psdo_matrix(spec, check_grid=False), np.eye(64), atol=1e-15)
    spec0 = PsdoSpec(ONE, ZERO, 1.0, 64)
    assert np.all(build_psdo_matrix(spec0) == 0)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        PsdoSpec(ONE, ONE, 1.0, 100)
    with pytest.raises(ConfigurationError):
        build_psdo_matrix(PsdoSpec(ONE, ONE, 1.0, 64))
    diag = grid_diagnostics(japanese_bracket_spec(M=1024))
    assert diag["beta_resolved"] and not diag["alpha_resolved"]


def test_gaussian_positive_and_symmetric():
    spec = japanese_bracket_spec(M=512)
    P = build_psdo_matrix(spec)
    assert np.array_equal(P, P.T)
    ev = np.linalg.eigvalsh(P)
    assert ev.min() > -1e-14 * ev.max()


def test_matrix_matches_operator():
    spec = japanese_bracket_spec(M=256)
    P = build_psdo_matrix(spec)
    x = np.random.default_rng(0).standard_normal(256)
    assert np.allclose(PsdoOperator(spec).apply(x), P @ x, atol=1e-13)


def test_predict_examples():
    gauss = lambda x: np.exp(-x**2)
    zero = weyl_predict((0.0, 0.0), 1.0, gauss)
    assert zero.C_plus == zero.C_minus == 0.0
    assert zero.beta_integral == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
    box = weyl_predict((1.0, 0.0), 1.0, ONE, support=(0.0, 2 * math.pi))
    assert box.C_plus == pytest.approx(1.0, rel=1e-12) and box.C_minus == 0.0
    with pytest.raises(DomainError):
        weyl_predict((1.0, 0.0), 1.0, lambda x: (1.0 + abs(x)) ** -0.5)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_model_prediction_matches_constants(d):
    for gamma in (0.5, 1.0, 2.0):
        pred = predict_for(model_psdo_spec(d, gamma))
        assert pred.C_plus == pytest.approx(c_dgamma(d, gamma).C_dgamma, rel=1e-9)
        assert pred.C_minus == 0.0


def test_negated_swaps():
    spec = japanese_bracket_spec(M=256)
    a = psdo_spectrum(spec, 20, solver="dense")
    b = psdo_spectrum(spec.negated(), 20, solver="dense")
    assert np.allclose(a.pos, b.neg, rtol=1e-12) and a.neg == b.pos == ()


@settings(max_examples=8, deadline=None)
@given(st.floats(0.2, 5.0))
def test_beta_scaling_covariance(c):
    spec = japanese_bracket_spec(M=256)
    a = psdo_spectrum(spec, 20, solver="dense")
    b = psdo_spectrum(spec.scaled_beta(c), 20, solver="dense")
    assert np.allclose(b.pos, c**2 * np.array(a.pos), rtol=1e-11)
    pa, pb = predict_for(spec), predict_for(spec.scaled_beta(c))
    assert pb.C_plus == pytest.approx(c**2 * pa.C_plus, rel=1e-10)


def test_grid_refinement():
    spec = japanese_bracket_spec(M=1024)
    a = psdo_spectrum(spec, 20, solver="lanczos")
    b = psdo_spectrum(spec.refined(), 20, solver="lanczos")
    assert np.max(np.abs(np.array(a.pos[:20]) / np.array(b.pos[:20]) - 1)) < 1e-6


def test_loglog_slope():
    n = np.arange(1, 50)
    assert loglog_slope(n, 3.0 * n**-1.5) == pytest.approx(-1.5, rel=1e-12)
    assert math.isnan(loglog_slope([1], [1.0]))


def test_weyl_gaussian():
    spec = japanese_bracket_spec()
    pred = predict_for(spec)
    assert pred.C_plus == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-12)
    fit = weyl_verify(spec, pred, (10, 60))
    assert abs(fit.slope_plus + 1) <= 0.05
    assert 0.7 <= fit.mean_ratio_plus <= 1.3
    assert fit.mode_minus in ("empty", "slope-only")


@pytest.mark.parametrize("d", [1, 2])
def test_weyl_model_symbols(d):
    spec = model_psdo_spec(d, 1.0)
    fit = weyl_verify(spec, predict_for(spec), (10, 60))
    window = np.array(fit.ratio_plus[9:60])
    assert np.all((window >= 0.7) & (window <= 1.3))


def test_beta_is_sqrt_phi_check():
    spec = model_psdo_spec(2, 1.0)
    x = np.linspace(-2, 2, 9)
    assert np.allclose(spec.beta(x) ** 2, phi_check_closed(x, 2), rtol=1e-13)
