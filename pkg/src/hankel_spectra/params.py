"""Parameter sequences, the smooth cutoff, the model weight and Laplace integrals.

A parameter sequence ``a(j)`` generates the Hankel matrix ``[a(i+j)]``.  Three
families are supported:

* ``PURE_POWER``:  a(j) = j^-d (log j)^-gamma
* ``GENERAL``:     a(j) = (b1 + (-1)^j bm1) j^-d (log j)^-gamma
* ``MODEL``:       a(j) = (b1 + (-1)^j bm1) (L w)(j), the Laplace transform of
                   w(t) = t^(d-1) |log t|^-gamma chi0(t) / (d-1)!

The first two are undefined for j < 2; matrix builders use the extension
``p(0) = p(1) = p(2)`` of the profile p(j) = j^-d (log j)^-gamma, keeping the
parity factor, so that swapping (b1, bm1) is still an exact parity conjugation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from numbers import Integral

import numpy as np

from . import _backend
from ._quad_py import CUTOFF_HI, CUTOFF_LO, smooth_cutoff
from .errors import ConfigurationError, DomainError, NumericError


class Kind(str, Enum):
    PURE_POWER = "pure_power"
    GENERAL = "general"
    MODEL = "model"


@dataclass(frozen=True)
class SymbolSpec:
    """Full parameterization of a parameter sequence."""

    d: int = 1
    gamma: float = 1.0
    b1: float = 1.0
    bm1: float = 0.0
    kind: Kind = Kind.PURE_POWER

    def __post_init__(self):
        if not isinstance(self.d, Integral) or isinstance(self.d, bool) or self.d < 1:
            raise DomainError(f"dimension d must be an integer >= 1, got {self.d!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be > 0, got {self.gamma!r}")
        if not (math.isfinite(self.b1) and math.isfinite(self.bm1)):
            raise DomainError("b1 and bm1 must be finite")
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "b1", float(self.b1))
        object.__setattr__(self, "bm1", float(self.bm1))
        if self.kind is Kind.PURE_POWER and (self.b1 != 1.0 or self.bm1 != 0.0):
            raise DomainError("PURE_POWER requires b1 = 1 and bm1 = 0")

    def scaled(self, c):
        """Same family with both coefficients multiplied by ``c``."""
        kind = Kind.GENERAL if self.kind is Kind.PURE_POWER else self.kind
        return replace(self, b1=c * self.b1, bm1=c * self.bm1, kind=kind)

    def swapped(self):
        """Exchange b1 and bm1 (conjugation by the parity operator)."""
        kind = Kind.GENERAL if self.kind is Kind.PURE_POWER else self.kind
        return replace(self, b1=self.bm1, bm1=self.b1, kind=kind)

    def as_model(self):
        kind = Kind.MODEL
        return replace(self, kind=kind)

    def as_target(self):
        if self.kind is not Kind.MODEL:
            return self
        kind = Kind.PURE_POWER if (self.b1, self.bm1) == (1.0, 0.0) else Kind.GENERAL
        return replace(self, kind=kind)

    def to_dict(self):
        out = asdict(self)
        out["kind"] = self.kind.value
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy request: error <= max(tol, rel_tol * |value|)."""

    tol: float = 1e-12
    rel_tol: float = 0.0
    limit: int = 4000

    def __post_init__(self):
        if self.tol < 0 or self.rel_tol < 0:
            raise DomainError("tolerances must be non-negative")
        if self.tol == 0 and self.rel_tol == 0:
            raise DomainError("at least one of tol, rel_tol must be positive")
        if self.limit < 8:
            raise DomainError("limit must be >= 8 panels")


CONSTANTS_QUAD = QuadratureConfig(tol=1e-12)
# symbols for matrix assembly need relative accuracy: entries shrink like j^-d
ASSEMBLY_QUAD = QuadratureConfig(tol=1e-300, rel_tol=1e-12)


def max_difference_order(gamma):
    """M(gamma): 0 for gamma < 1/2, floor(gamma) + 1 otherwise."""
    if gamma <= 0:
        raise DomainError("gamma must be > 0")
    return 0 if gamma < 0.5 else math.floor(gamma) + 1


@dataclass(frozen=True)
class DifferenceOrder:
    m: int
    m_max: int

    def __post_init__(self):
        if self.m < 0 or self.m > self.m_max:
            raise DomainError(f"difference order {self.m} outside 0..{self.m_max}")

    @classmethod
    def for_gamma(cls, m, gamma):
        return cls(m, max_difference_order(gamma))


@dataclass(frozen=True)
class CutoffFn:
    """Smooth cutoff: 1 on (0, t_lo], 0 on [t_hi, inf).

    The bridge is psi(t_hi - t) / (psi(t_hi - t) + psi(t - t_lo)) with
    psi(s) = exp(-1/s), which is C-infinity and equals 1/2 at the midpoint.
    """

    t_lo: float = CUTOFF_LO
    t_hi: float = CUTOFF_HI

    def __post_init__(self):
        if not 0 < self.t_lo < self.t_hi:
            raise DomainError("cutoff needs 0 < t_lo < t_hi")

    @property
    def is_default(self):
        return (self.t_lo, self.t_hi) == (CUTOFF_LO, CUTOFF_HI)

    def __call__(self, t):
        if self.is_default:
            return smooth_cutoff(t)
        t = np.asarray(t, dtype=float)
        out = np.where(t <= self.t_lo, 1.0, 0.0)
        mid = (t > self.t_lo) & (t < self.t_hi)
        s = t[mid]
        with np.errstate(over="ignore"):
            out[mid] = 1.0 / (1.0 + np.exp(1.0 / (self.t_hi - s) - 1.0 / (s - self.t_lo)))
        return out


@dataclass(frozen=True)
class ModelWeight:
    """w(t) = t^(d-1) |log t|^-gamma chi0(t) / (d-1)!  (zero for t >= t_hi)."""

    spec: SymbolSpec
    chi: CutoffFn = field(default_factory=CutoffFn)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        live = (t > 0) & (t < self.chi.t_hi)
        tl = t[live]
        d, g = self.spec.d, self.spec.gamma
        out[live] = tl ** (d - 1) * np.abs(np.log(tl)) ** (-g) * self.chi(tl) / math.factorial(d - 1)
        return out


def _check_int(j, lo, name="j"):
    if not isinstance(j, Integral) or isinstance(j, bool):
        raise DomainError(f"{name} must be an integer, got {j!r}")
    if j < lo:
        raise DomainError(f"{name} must be >= {lo}, got {j}")
    return int(j)


def _parity_factor(spec, j):
    # overflow surfaces as a non-finite value, checked by callers
    with np.errstate(over="ignore", invalid="ignore"):
        return spec.b1 + (1.0 - 2.0 * (np.asarray(j) % 2)) * spec.bm1


def eval_target_seq(spec: SymbolSpec, j: int) -> float:
    """(b1 + (-1)^j bm1) j^-d (log j)^-gamma for j >= 2."""
    if spec.kind is Kind.MODEL:
        raise DomainError("eval_target_seq needs a PURE_POWER or GENERAL spec")
    j = _check_int(j, 2)
    value = float(_parity_factor(spec, j)) * j ** (-spec.d) * math.log(j) ** (-spec.gamma)
    if not math.isfinite(value):
        raise NumericError(f"non-finite sequence value at j={j}")
    return value


def base_profile(spec, n):
    """p(j) = j^-d (log j)^-gamma for j = 0..n-1, extended by p(2) below j = 2."""
    j = np.maximum(np.arange(n, dtype=float), 2.0)
    return np.exp(-spec.d * np.log(j) - spec.gamma * np.log(np.log(j)))


EXTENSIONS = ("profile", "constant")


def target_sequence(spec: SymbolSpec, n: int, extension: str = "profile") -> np.ndarray:
    """a(0..n-1) for PURE_POWER / GENERAL specs.

    ``extension`` fixes the values below j = 2: "profile" keeps the parity
    factor and sets p(0) = p(1) = p(2); "constant" sets a(0) = a(1) = a(2).
    """
    if spec.kind is Kind.MODEL:
        raise DomainError("target_sequence needs a PURE_POWER or GENERAL spec")
    if extension not in EXTENSIONS:
        raise ConfigurationError(f"unknown extension {extension!r}")
    a = _parity_factor(spec, np.arange(n)) * base_profile(spec, n)
    if extension == "constant" and n > 2:
        a[:2] = a[2]
    return a


def symbol_sequence(spec, n, quad=ASSEMBLY_QUAD, backend=None, extension="profile"):
    """a(0..n-1) for any spec kind."""
    if spec.kind is Kind.MODEL:
        return model_sequence(spec, n, quad=quad, backend=backend)
    return target_sequence(spec, n, extension)


def iterated_difference(seq, m: int, j: int) -> float:
    """m-th forward difference of ``seq`` at ``j``; ``seq`` is a callable."""
    m = _check_int(m, 0, "m")
    return sum((-1) ** (m - k) * math.comb(m, k) * seq(j + k) for k in range(m + 1))


def eval_cutoff(chi: CutoffFn, t: float) -> float:
    if not t > 0:
        raise DomainError(f"cutoff argument must be > 0, got {t!r}")
    return float(chi(np.array([t]))[0])


def eval_model_weight(w: ModelWeight, t: float) -> float:
    if not t > 0:
        raise DomainError(f"weight argument must be > 0, got {t!r}")
    return float(w(np.array([t]))[0])


def laplace_of_weight(spec, t, quad=ASSEMBLY_QUAD, backend=None):
    """(L w)(t) for an array of t >= 0; returns (values, error estimates)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("Laplace argument must be >= 0")
    fact = math.factorial(spec.d - 1)
    vals, errs, ok = _backend.laplace_batch(
        t, spec.d - 1, spec.gamma, CUTOFF_HI, True,
        quad.tol * fact, quad.rel_tol, quad.limit, backend=backend)
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise NumericError(
            f"model quadrature did not converge at t={t.ravel()[bad]:g}",
            error_estimate=float(errs[bad] / fact))
    return vals / fact, errs / fact


def model_sequence(spec, n, quad=ASSEMBLY_QUAD, backend=None):
    """ã(0..n-1) = (b1 + (-1)^j bm1) (L w)(j); ã(0) uses the finite (L w)(0)."""
    vals, _ = laplace_of_weight(spec, np.arange(n, dtype=float), quad, backend)
    return _parity_factor(spec, np.arange(n)) * vals


def eval_model_seq(spec: SymbolSpec, j: int, quad: QuadratureConfig = CONSTANTS_QUAD,
                   chi: CutoffFn | None = None) -> float:
    """ã(j) with absolute error <= quad.tol (or rel_tol * |ã(j)|)."""
    j = _check_int(j, 1)
    if chi is not None and not chi.is_default:
        raise ConfigurationError("model quadrature kernel supports the default cutoff only")
    scale = abs(spec.b1) + abs(spec.bm1)
    if scale == 0.0:
        return 0.0
    inner = replace(quad, tol=quad.tol / scale)
    vals, _ = laplace_of_weight(spec, np.array([float(j)]), inner)
    return float(_parity_factor(spec, j) * vals[0])


def laplace_In(n: int, t: float, gamma: float, lambda0: float,
               quad: QuadratureConfig = CONSTANTS_QUAD) -> float:
    """int_0^lambda0 lam^n |log lam|^-gamma exp(-lam t) dlam."""
    return float(laplace_In_batch(n, np.array([t]), gamma, lambda0, quad)[0])


def laplace_In_batch(n, t, gamma, lambda0, quad=CONSTANTS_QUAD, backend=None):
    n = _check_int(n, 0, "n")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise DomainError("laplace_In needs t > 1")
    if not gamma > 0:
        raise DomainError("gamma must be > 0")
    if not 0 < lambda0 < 1:
        raise DomainError("lambda0 must lie in (0, 1)")
    vals, errs, ok = _backend.laplace_batch(
        t, n, gamma, lambda0, False, quad.tol, quad.rel_tol, quad.limit, backend=backend)
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise NumericError(f"Laplace quadrature did not converge at t={t.ravel()[bad]:g}",
                           error_estimate=float(errs[bad]))
    return vals
