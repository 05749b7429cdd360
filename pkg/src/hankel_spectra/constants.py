"""The kernel phi_d, its inverse Fourier transform, and the asymptotic constants.

Fourier convention: f_hat(x) = int f(y) exp(-2 pi i x y) dy, so

    phi_d(y)       = cosh(y/2)^-d
    phi_check_d(x) = 2 int_0^inf phi_d(y) cos(2 pi x y) dy
                   = 2^d |Gamma(d/2 + 2 pi i x)|^2 / (d-1)!

and C_{d,gamma} = (2^d (d-1)!)^-1 (int phi_check_d^(1/gamma))^gamma.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special
from scipy.optimize import brentq

from .errors import DomainError, NumericError
from .params import CONSTANTS_QUAD, QuadratureConfig

# relative size below which integrand tails are dropped
TAIL_RTOL = 1e-18


def _check_d(d):
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DomainError(f"d must be an integer >= 1, got {d!r}")


def _logcosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)


def phi_d(x, d: int):
    """cosh(x/2)^-d, computed in log space (underflows cleanly to 0)."""
    _check_d(d)
    out = np.exp(-d * _logcosh(np.asarray(x, dtype=float) / 2.0))
    return float(out) if np.ndim(out) == 0 else out


def log_phi_check(x, d: int):
    """log phi_check_d(x) from the Gamma-function closed form."""
    _check_d(d)
    z = d / 2.0 + 2j * np.pi * np.asarray(x, dtype=float)
    return d * math.log(2.0) + 2.0 * special.loggamma(z).real - math.lgamma(d)


def phi_check_closed(x, d: int):
    out = np.exp(log_phi_check(x, d))
    return float(out) if np.ndim(out) == 0 else out


def _phi_cutoff(d):
    # phi_d(Y) < TAIL_RTOL
    return 2.0 * math.acosh(TAIL_RTOL ** (-1.0 / d))


def phi_check(x: float, d: int, quad: QuadratureConfig = CONSTANTS_QUAD,
              method: str = "quad") -> float:
    """phi_check_d(x) by cosine-weighted quadrature (or ``method="closed"``).

    The quadrature value must exceed its own error estimate tenfold; far in
    the tail (phi_check_d ~ exp(-2 pi^2 |x|)) it cannot, and a NumericError
    points to the closed form.
    """
    _check_d(d)
    if method == "closed":
        return phi_check_closed(float(x), d)
    if method != "quad":
        raise DomainError(f"unknown method {method!r}")
    Y = _phi_cutoff(d)
    omega = 2.0 * math.pi * abs(float(x))
    f = lambda y: phi_d(y, d)
    if omega == 0.0:
        val, err = integrate.quad(f, 0.0, Y, epsabs=quad.tol / 2, epsrel=max(quad.rel_tol, 1e-14),
                                  limit=200)
    else:
        val, err = integrate.quad(f, 0.0, Y, weight="cos", wvar=omega,
                                  epsabs=quad.tol / 2, epsrel=max(quad.rel_tol, 1e-14), limit=200)
    val, err = 2.0 * val, 2.0 * err
    if not (val > 10.0 * err and val > 0.0):
        raise NumericError(f"phi_check quadrature unresolved at x={x} (value {val:.3e})",
                           error_estimate=err)
    return float(val)


def _outer_cutoff(d, gamma):
    """X with phi_check_d(X)^(1/gamma) < TAIL_RTOL * peak, by bisection in log space."""
    target = log_phi_check(0.0, d) / gamma + math.log(TAIL_RTOL)
    g = lambda x: log_phi_check(x, d) / gamma - target
    hi = 1.0
    while g(hi) > 0:
        hi *= 2.0
    return float(brentq(g, 0.0, hi, xtol=1e-12))


def power_integral(d: int, p: float, quad: QuadratureConfig = CONSTANTS_QUAD):
    """(int_R phi_check_d(x)^p dx, error estimate); integrand in log space.

    The tail beyond the cutoff X is estimated from the local exponential decay
    rate, which is validated against the asymptotic rate 2 pi^2 p.
    """
    _check_d(d)
    if p <= 0:
        raise DomainError("power must be > 0")
    X = _outer_cutoff(d, 1.0 / p)
    f = lambda x: math.exp(p * float(log_phi_check(x, d)))
    val, err = integrate.quad(f, 0.0, X, epsabs=0.0, epsrel=max(quad.rel_tol, 1e-13), limit=400,
                              points=[X / 8, X / 4, X / 2])
    # exponential tail: f(x) ~ f(X) exp(-rate (x - X))
    rate = p * float(log_phi_check(0.9 * X, d) - log_phi_check(X, d)) / (0.1 * X)
    expected = 2.0 * math.pi**2 * p
    if not 0.5 * expected < rate < 2.0 * expected:
        raise NumericError(f"tail decay rate {rate:.3g} inconsistent with {expected:.3g}")
    tail = f(X) / rate
    total = 2.0 * (val + tail)
    return total, 2.0 * (err + tail)


def closed_form_c1(gamma: float) -> float:
    """d = 1: 2^-gamma pi^(1-2 gamma) B(1/(2 gamma), 1/2)^gamma."""
    if not gamma > 0:
        raise DomainError("gamma must be > 0")
    logb = special.betaln(1.0 / (2.0 * gamma), 0.5)
    return math.exp(-gamma * math.log(2.0) + (1.0 - 2.0 * gamma) * math.log(math.pi) + gamma * logb)


def _pos(x):
    return max(x, 0.0)


def _signed_scale(b1, bm1, gamma):
    """(((b1)_+^(1/g) + (bm1)_+^(1/g))^g, ((b1)_-^(1/g) + (bm1)_-^(1/g))^g)."""
    def comb(u, v):
        s = u ** (1.0 / gamma) + v ** (1.0 / gamma)
        return s**gamma if s > 0 else 0.0
    return comb(_pos(b1), _pos(bm1)), comb(_pos(-b1), _pos(-bm1))


@dataclass(frozen=True)
class AsymptoticConstants:
    d: int
    gamma: float
    b1: float = 1.0
    bm1: float = 0.0
    C_dgamma: float = math.nan
    C_plus: float = math.nan
    C_minus: float = math.nan
    quad_error: float = 0.0

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def c_dgamma(d: int, gamma: float, quad: QuadratureConfig = CONSTANTS_QUAD,
             b1: float = 1.0, bm1: float = 0.0) -> AsymptoticConstants:
    """C_{d,gamma} by quadrature of phi_check_d^(1/gamma); C^± filled in for (b1, bm1)."""
    _check_d(d)
    if not (math.isfinite(gamma) and gamma > 0):
        raise DomainError(f"gamma must be > 0, got {gamma!r}")
    integral, err = power_integral(d, 1.0 / gamma, quad)
    pref = 1.0 / (2**d * math.factorial(d - 1))
    C = pref * integral**gamma
    cerr = C * gamma * err / integral
    if not math.isfinite(C) or C <= 0:
        raise NumericError("C_{d,gamma} not finite/positive", error_estimate=cerr)
    if cerr > max(quad.tol, quad.rel_tol * C, 1e-12 * C):
        raise NumericError(f"C_{{d,gamma}} error estimate {cerr:.2e} above tolerance",
                           error_estimate=cerr)
    base = AsymptoticConstants(d, float(gamma), float(b1), float(bm1), C, quad_error=cerr)
    cp, cm = c_plus_minus(base)
    return AsymptoticConstants(d, float(gamma), float(b1), float(bm1), C, cp, cm, cerr)


def c_plus_minus(consts: AsymptoticConstants):
    """C^± = ((b1)_±^(1/gamma) + (bm1)_±^(1/gamma))^gamma C_{d,gamma}."""
    if not math.isfinite(consts.C_dgamma):
        raise DomainError("C_dgamma not computed")
    sp, sm = _signed_scale(consts.b1, consts.bm1, consts.gamma)
    return sp * consts.C_dgamma, sm * consts.C_dgamma


def asymptotic_constants(spec, quad: QuadratureConfig = CONSTANTS_QUAD) -> AsymptoticConstants:
    return c_dgamma(spec.d, spec.gamma, quad, spec.b1, spec.bm1)


def phi_check_convolution(x: float, d1: int, d2: int, quad: QuadratureConfig = CONSTANTS_QUAD):
    """(phi_check_d1 * phi_check_d2)(x) by quadrature over R."""
    X = max(_outer_cutoff(d1, 1.0), _outer_cutoff(d2, 1.0)) + abs(x)
    f = lambda y: phi_check_closed(y, d1) * phi_check_closed(x - y, d2)
    val, _ = integrate.quad(f, -X, X, epsabs=0.0, epsrel=max(quad.rel_tol, 1e-12), limit=400,
                            points=[0.0, x])
    return val
