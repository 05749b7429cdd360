"""Pseudo-differential operators beta(X) alpha(D) beta(X) on a periodic grid.

Grid: x_k = -L + k h, h = 2L/M, k = 0..M-1.  With the unitary DFT F and
frequencies xi = fftfreq(M, h), alpha(D) = F* diag(alpha(2 pi xi)) F is a
circulant, so the symbol acts exactly on the discrete frequency basis and the
only discretization error is the truncation of x to [-L, L).

The Weyl law being checked: if alpha(eta) ~ a_± |eta|^-gamma as eta -> ±inf,
then lambda_n^± ~ C^± n^-gamma with

    C^± = [ (1/2pi) ((a_+)_±^(1/gamma) + (a_-)_±^(1/gamma)) int |beta|^(2/gamma) ]^gamma.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .constants import _signed_scale, log_phi_check
from .errors import ConfigurationError, DomainError, NumericError
from .params import CONSTANTS_QUAD, QuadratureConfig, smooth_cutoff
from .speceng import SpectrumResult, dense_eig, lanczos_extremal

DENSE_PSDO_LIMIT = 4096


@dataclass(frozen=True)
class PsdoSpec:
    """Symbols plus grid.  ``alpha`` is a function of eta (the variable of D)."""

    alpha: Callable
    beta: Callable
    L: float
    M: int
    gamma: float = 1.0
    a_plus: float = 0.0
    a_minus: float = 0.0
    beta_support: tuple | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.M < 2 or self.M & (self.M - 1):
            raise ConfigurationError(f"M must be a power of two, got {self.M}")
        if not self.L > 0:
            raise ConfigurationError("L must be > 0")
        if not self.gamma > 0:
            raise DomainError("gamma must be > 0")

    @property
    def h(self):
        return 2.0 * self.L / self.M

    def x_grid(self):
        return -self.L + self.h * np.arange(self.M)

    def eta_grid(self):
        return 2.0 * np.pi * np.fft.fftfreq(self.M, self.h)

    def sample(self):
        a = np.asarray(self.alpha(self.eta_grid()), dtype=float)
        b = np.asarray(self.beta(self.x_grid()), dtype=float)
        return a * np.ones(self.M), b * np.ones(self.M)

    def negated(self):
        alpha = self.alpha
        return PsdoSpec(lambda e: -alpha(e), self.beta, self.L, self.M, self.gamma,
                        -self.a_plus, -self.a_minus, self.beta_support, self.name + "-neg")

    def scaled_beta(self, c):
        beta = self.beta
        return PsdoSpec(self.alpha, lambda x: c * beta(x), self.L, self.M, self.gamma,
                        self.a_plus, self.a_minus, self.beta_support, self.name)

    def refined(self, factor=2):
        """Same spacing, ``factor`` times the domain."""
        return PsdoSpec(self.alpha, self.beta, factor * self.L, factor * self.M, self.gamma,
                        self.a_plus, self.a_minus, self.beta_support, self.name)


def grid_diagnostics(spec: PsdoSpec, rtol=1e-12):
    a, b = spec.sample()
    bmax = float(np.max(np.abs(b)))
    amax = float(np.max(np.abs(a)))
    edge_b = float(max(abs(spec.beta(-spec.L)), abs(spec.beta(spec.L))))
    # alpha at the Nyquist frequency, relative
    edge_a = float(np.abs(a[spec.M // 2])) / amax if amax else 0.0
    return {
        "beta_edge_rel": edge_b / bmax if bmax else 0.0,
        "alpha_nyquist_rel": edge_a,
        "beta_resolved": bmax == 0.0 or edge_b < rtol * bmax,
        "alpha_resolved": edge_a < rtol,
    }


def _circulant_column(alpha_vals):
    c = np.fft.ifft(alpha_vals)
    if np.max(np.abs(c.imag)) <= 1e-14 * max(np.max(np.abs(c.real)), 1e-300):
        return c.real
    return c


def build_psdo_matrix(spec: PsdoSpec, check_grid: bool = True, sym_rtol: float = 1e-12):
    """Dense M x M matrix D_beta F* D_alpha F D_beta (real if alpha is even on the grid).

    Only beta's decay is enforced; symbols decaying like |eta|^-gamma never fall
    below 1e-12 on a finite grid, so alpha's Nyquist value is reported by
    ``grid_diagnostics`` instead of being required.
    """
    if spec.M > DENSE_PSDO_LIMIT:
        from .errors import CapacityError
        raise CapacityError(f"dense psdo matrix of size {spec.M} exceeds {DENSE_PSDO_LIMIT}")
    if check_grid:
        diag = grid_diagnostics(spec)
        if not diag["beta_resolved"]:
            raise ConfigurationError(
                f"beta not resolved on [-L, L]: |beta(±L)|/max = {diag['beta_edge_rel']:.3e}")
    a, b = spec.sample()
    c = _circulant_column(a)
    k = np.arange(spec.M)
    C = c[(k[:, None] - k[None, :]) % spec.M]
    P = b[:, None] * C * b[None, :]
    scale = float(np.max(np.abs(P))) if P.size else 0.0
    asym = float(np.max(np.abs(P - P.conj().T)))
    if scale and asym > sym_rtol * scale:
        raise NumericError(f"discretized operator asymmetric: {asym / scale:.2e}")
    return 0.5 * (P + P.conj().T)


class PsdoOperator:
    """FFT application of beta alpha(D) beta for Lanczos."""

    def __init__(self, spec: PsdoSpec):
        self.spec = spec
        self.alpha_vals, self.beta_vals = spec.sample()
        self.size = spec.M
        self.N = spec.M - 1
        even = np.allclose(self.alpha_vals, self.alpha_vals[(-np.arange(spec.M)) % spec.M],
                           rtol=0, atol=1e-14 * np.max(np.abs(self.alpha_vals)))
        self.dtype = np.dtype(float) if even else np.dtype(complex)

    def apply(self, x):
        y = np.fft.ifft(self.alpha_vals * np.fft.fft(self.beta_vals * x))
        y = self.beta_vals * y
        return y.real if self.dtype == np.dtype(float) else y


@dataclass(frozen=True)
class WeylPrediction:
    C_plus: float
    C_minus: float
    gamma: float
    beta_integral: float = math.nan

    def to_dict(self):
        return asdict(self)


def weyl_predict(alpha_limits, gamma: float, beta: Callable, quad: QuadratureConfig = CONSTANTS_QUAD,
                 support=None) -> WeylPrediction:
    """C^± from the limits (a_plus, a_minus) of alpha and int |beta|^(2/gamma)."""
    if not gamma > 0:
        raise DomainError("gamma must be > 0")
    a_plus, a_minus = alpha_limits
    lo, hi = support if support is not None else (-np.inf, np.inf)
    f = lambda x: abs(beta(x)) ** (2.0 / gamma)
    with np.errstate(all="ignore"), warnings.catch_warnings():
        # divergence is reported below as a DomainError
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, lo, hi, epsabs=quad.tol, epsrel=max(quad.rel_tol, 1e-12),
                                  limit=400)
    if not math.isfinite(val) or err > 1e-6 * max(abs(val), 1e-300):
        raise DomainError(f"int |beta|^(2/gamma) not finite or unresolved ({val:.3e} ± {err:.1e})")
    sp, sm = _signed_scale(a_plus, a_minus, gamma)
    # _signed_scale returns ((.)^(1/g) + (.)^(1/g))^g; rescale by the beta factor
    cp = sp * (val / (2.0 * math.pi)) ** gamma
    cm = sm * (val / (2.0 * math.pi)) ** gamma
    return WeylPrediction(cp, cm, float(gamma), float(val))


def predict_for(spec: PsdoSpec, quad: QuadratureConfig = CONSTANTS_QUAD) -> WeylPrediction:
    return weyl_predict((spec.a_plus, spec.a_minus), spec.gamma, spec.beta, quad, spec.beta_support)


def loglog_slope(n, lam):
    n, lam = np.asarray(n, float), np.asarray(lam, float)
    if n.size < 2:
        return math.nan
    return float(np.polyfit(np.log(n), np.log(lam), 1)[0])


@dataclass(frozen=True)
class WeylFit:
    window: tuple
    lambda_plus: tuple
    lambda_minus: tuple
    ratio_plus: tuple | None
    ratio_minus: tuple | None
    slope_plus: float
    slope_minus: float
    mean_ratio_plus: float
    mean_ratio_minus: float
    prediction: WeylPrediction
    solver: str
    mode_plus: str = "ratio"
    mode_minus: str = "ratio"

    def to_dict(self):
        out = asdict(self)
        return out


def psdo_spectrum(spec: PsdoSpec, k: int, solver: str = "auto", seed: int = 0) -> SpectrumResult:
    op = PsdoOperator(spec)
    if solver == "auto":
        solver = "dense" if spec.M <= 2048 or (spec.M <= DENSE_PSDO_LIMIT and op.dtype == float) \
            else "lanczos"
    if solver == "dense":
        return dense_eig(build_psdo_matrix(spec), dense_limit=DENSE_PSDO_LIMIT, residuals=False, k=k)
    if grid_diagnostics(spec)["beta_resolved"] is False:
        raise ConfigurationError("beta not resolved on [-L, L]")
    return lanczos_extremal(op, k, tol=1e-10, max_iter=min(spec.M, 4 * k + 200), seed=seed)


def _side(lam, C, gamma, n_lo, n_hi):
    lam = np.asarray(lam, float)
    n = np.arange(1, lam.size + 1, dtype=float)
    sel = (n >= n_lo) & (n <= n_hi)
    slope = loglog_slope(n[sel], lam[sel]) if np.count_nonzero(sel) >= 2 else math.nan
    if C > 0:
        ratio = n**gamma * lam / C
        mean = float(np.mean(ratio[sel])) if np.any(sel) else math.nan
        return tuple(ratio.tolist()), slope, mean, "ratio"
    if lam.size:
        return None, slope, math.nan, "slope-only"
    return None, slope, math.nan, "empty"


def weyl_verify(spec: PsdoSpec, prediction: WeylPrediction, n_window=(10, 60),
                solver: str = "auto", seed: int = 0) -> WeylFit:
    """Eigenvalues of the discretized operator against the predicted constants."""
    n_lo, n_hi = n_window
    if not 1 <= n_lo < n_hi:
        raise DomainError("window must satisfy 1 <= n_lo < n_hi")
    res = psdo_spectrum(spec, n_hi, solver, seed)
    g = prediction.gamma
    rp, sp, mp, modep = _side(res.pos, prediction.C_plus, g, n_lo, n_hi)
    rm, sm, mm, modem = _side(res.neg, prediction.C_minus, g, n_lo, n_hi)
    return WeylFit((n_lo, n_hi), tuple(res.pos), tuple(res.neg), rp, rm, sp, sm, mp, mm,
                   prediction, res.solver, modep, modem)


def japanese_bracket_spec(L=12.0, M=4096, power=1.0):
    """alpha(eta) = <eta>^-power, beta(x) = exp(-x^2)."""
    return PsdoSpec(lambda e: (1.0 + np.asarray(e) ** 2) ** (-power / 2.0),
                    lambda x: np.exp(-np.asarray(x) ** 2), L, M, power, 1.0, 1.0,
                    name="gaussian")


def model_alpha(d: int, gamma: float, b: float = 1.0):
    """Model symbol as a function of eta = 2 pi xi.

    With x = eta / 2pi the symbol is 2^-d e^{-(d-1)x} b w(e^x)
    = b |x|^-gamma chi0(e^x) / (2^d (d-1)!), supported on x < log(3/4).
    """
    pref = b / (2**d * math.factorial(d - 1))

    def alpha(eta):
        x = np.asarray(eta, dtype=float) / (2.0 * math.pi)
        out = np.zeros_like(x)
        live = x < math.log(0.75)
        xl = x[live]
        out[live] = pref * np.abs(xl) ** (-gamma) * smooth_cutoff(np.exp(xl))
        return out
    return alpha


def model_psdo_spec(d: int, gamma: float, b: float = 1.0, L: float = 4.0, M: int = 4096):
    """Model operator symbols: alpha as above, beta = sqrt(phi_check_d).

    As eta -> -inf, alpha ~ b (2 pi)^gamma / (2^d (d-1)!) |eta|^-gamma; it
    vanishes for eta > 2 pi log(3/4), so a_plus = 0.
    """
    a_minus = b * (2.0 * math.pi) ** gamma / (2**d * math.factorial(d - 1))
    beta = lambda x: np.exp(0.5 * log_phi_check(x, d))
    return PsdoSpec(model_alpha(d, gamma, b), beta, L, M, gamma, 0.0, a_minus,
                    name=f"model-d{d}")
