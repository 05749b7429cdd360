"""Experiments: asymptotic ratios, model-vs-target decay, quasinorms, S2 bound, parity split."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend
from .constants import AsymptoticConstants, asymptotic_constants
from .errors import DomainError
from .params import Kind, SymbolSpec, symbol_sequence
from .reduction import DENSE_LIMIT, build_simplex_hankel, build_weighted_hankel, simplex_weight
from .speceng import FastHankelOperator, SpectrumResult, dense_eig, lanczos_extremal, singular_values
from .weylcheck import loglog_slope

# window max of raw n^gamma lambda_n must stay below this fraction of C_{d,gamma}
ZERO_SIDE_FRACTION = 0.25


def _floats(seq):
    return tuple(float(v) for v in seq)


@dataclass(frozen=True)
class LabReport:
    spec: SymbolSpec
    N: int
    constants: AsymptoticConstants
    lambda_plus: tuple = ()
    lambda_minus: tuple = ()
    ratio_plus: tuple = ()
    ratio_minus: tuple = ()
    mode_plus: str = "ratio"
    mode_minus: str = "ratio"
    decay: tuple | None = None
    fits: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(), "N": self.N, "constants": self.constants.to_dict(),
            "lambda_plus": list(self.lambda_plus), "lambda_minus": list(self.lambda_minus),
            "ratio_plus": list(self.ratio_plus), "ratio_minus": list(self.ratio_minus),
            "mode_plus": self.mode_plus, "mode_minus": self.mode_minus,
            "decay": None if self.decay is None else list(self.decay),
            "fits": dict(self.fits), "provenance": dict(self.provenance),
            "parts": {k: v.to_dict() for k, v in self.parts.items()},
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            SymbolSpec.from_dict(data["spec"]), data["N"],
            AsymptoticConstants.from_dict(data["constants"]),
            _floats(data["lambda_plus"]), _floats(data["lambda_minus"]),
            _floats(data["ratio_plus"]), _floats(data["ratio_minus"]),
            data["mode_plus"], data["mode_minus"],
            None if data["decay"] is None else _floats(data["decay"]),
            dict(data["fits"]), dict(data["provenance"]),
            {k: cls.from_dict(v) for k, v in data.get("parts", {}).items()},
        )


@dataclass(frozen=True)
class QuasinormReport:
    p: float
    value: float
    trend: tuple

    def to_dict(self):
        return {"p": self.p, "value": self.value, "trend": list(self.trend)}

    @classmethod
    def from_dict(cls, data):
        return cls(data["p"], data["value"], _floats(data["trend"]))


def quasinorm(svals, p: float) -> QuasinormReport:
    """sup_n n^(1/p) s_n over the available n (the S_{p,inf} quasinorm)."""
    if not p > 0:
        raise DomainError("p must be > 0")
    s = np.asarray(svals, dtype=float)
    if s.size and np.any(np.diff(s) > 0):
        raise DomainError("singular values must be descending")
    trend = np.arange(1, s.size + 1) ** (1.0 / p) * s
    return QuasinormReport(float(p), float(trend.max()) if trend.size else 0.0, _floats(trend))


def dyadic_medians(values, blocks):
    """Median of values[n-1] over each [lo, hi); NaN where a block is not fully covered."""
    v = np.asarray(values, dtype=float)
    out = []
    for lo, hi in blocks:
        out.append(float(np.median(v[lo - 1: hi - 1])) if v.size >= hi - 1 else math.nan)
    return out


def strictly_decreasing(seq):
    seq = list(seq)
    return all(math.isfinite(x) for x in seq) and all(b < a for a, b in zip(seq, seq[1:]))


def _window_stats(values, n_lo, n_hi):
    v = np.asarray(values, dtype=float)
    n = np.arange(1, v.size + 1)
    sel = (n >= n_lo) & (n <= n_hi)
    return n, sel


def solve(op, k, solver="lanczos", tol=1e-10, seed=0, max_iter=None) -> SpectrumResult:
    if solver == "dense":
        return dense_eig(op.dense(), k=k)
    return lanczos_extremal(op, k, tol=tol, seed=seed, max_iter=max_iter)


def _provenance(res, solver):
    return {
        "solver": res.solver, "iterations": res.iterations, "complete": res.complete,
        "converged_pos": res.converged_pos, "converged_neg": res.converged_neg,
        "norm_est": res.norm_est, "seed": res.seed, "kernel_dim": res.kernel_dim,
        "quadrature_backend": _backend.BACKEND, "requested_solver": solver,
    }


def asymptotic_study(spec: SymbolSpec, N: int, k: int, window=(20, 200), solver: str = "lanczos",
                     seed: int = 0, tol: float = 1e-10, consts: AsymptoticConstants | None = None,
                     zero_fraction: float = ZERO_SIDE_FRACTION) -> LabReport:
    """Signed eigenvalues of Gamma_N against C^± n^-gamma."""
    n_lo, n_hi = window
    if k < n_hi:
        raise DomainError(f"k={k} must be >= window end {n_hi}")
    consts = consts or asymptotic_constants(spec)
    M = build_weighted_hankel(spec, N)
    res = solve(FastHankelOperator.from_matrix(M), k, solver, tol, seed)
    g = spec.gamma
    fits = {"window": [n_lo, n_hi]}
    out = {}
    for side, lam, C in (("plus", res.pos, consts.C_plus), ("minus", res.neg, consts.C_minus)):
        lam = np.asarray(lam, dtype=float)
        n, sel = _window_stats(lam, n_lo, n_hi)
        scaled = n**g * lam
        mode = "ratio" if C > 0 else "raw"
        seq = scaled / C if C > 0 else scaled
        fits[f"slope_{side}"] = loglog_slope(n[sel], lam[sel]) if np.count_nonzero(sel) >= 2 else math.nan
        fits[f"window_count_{side}"] = int(np.count_nonzero(sel))
        fits[f"window_min_{side}"] = float(seq[sel].min()) if np.any(sel) else math.nan
        fits[f"window_max_{side}"] = float(seq[sel].max()) if np.any(sel) else math.nan
        fits[f"window_mean_{side}"] = float(seq[sel].mean()) if np.any(sel) else math.nan
        if mode == "raw":
            # the zero side is checked against C_{d,gamma}; an empty window passes trivially
            mx = float(scaled[sel].max()) if np.any(sel) else 0.0
            fits[f"raw_max_fraction_{side}"] = mx / consts.C_dgamma
            fits[f"zero_side_ok_{side}"] = mx < zero_fraction * consts.C_dgamma
        out[side] = (tuple(lam.tolist()), tuple(seq.tolist()), mode)
    return LabReport(spec, N, consts, out["plus"][0], out["minus"][0], out["plus"][1],
                     out["minus"][1], out["plus"][2], out["minus"][2], None, fits,
                     _provenance(res, solver))


def model_compare(spec_target: SymbolSpec, spec_model: SymbolSpec, N: int, k: int,
                  solver: str = "lanczos", seed: int = 0, tol: float = 1e-10,
                  blocks=((16, 32), (32, 64), (64, 128))) -> LabReport:
    """Singular values of Gamma(a) - Gamma(a_model) (same weights), as n^gamma s_n."""
    t, m = spec_target, spec_model
    if (t.d, t.gamma, t.b1, t.bm1) != (m.d, m.gamma, m.b1, m.bm1):
        raise DomainError("target and model specs must share d, gamma, b1, bm1")
    consts = asymptotic_constants(t)
    a = symbol_sequence(t, 2 * N + 1)
    am = a if m == t else symbol_sequence(m, 2 * N + 1)
    M = build_weighted_hankel(t, N).with_symbol(a - am)
    fits = {"blocks": [list(b) for b in blocks]}
    if not np.any(a - am):
        fits.update(medians=[math.nan] * len(blocks), decreasing=False, zero_operator=True)
        return LabReport(t, N, consts, decay=(), fits=fits,
                         provenance={"solver": "none", "quadrature_backend": _backend.BACKEND})
    res = solve(FastHankelOperator.from_matrix(M), k, solver, tol, seed)
    s = singular_values(res)[:k]
    decay = np.arange(1, s.size + 1) ** t.gamma * s
    med = dyadic_medians(decay, blocks)
    fits.update(medians=med, decreasing=strictly_decreasing(med), zero_operator=False,
                singular_count=int(s.size), slope=loglog_slope(np.arange(1, s.size + 1), s)
                if s.size >= 2 else math.nan)
    return LabReport(t, N, consts, _floats(res.pos), _floats(res.neg), decay=_floats(decay),
                     fits=fits, provenance=_provenance(res, solver))


def s2_bound_check(spec: SymbolSpec, N: int, dense_limit: int = DENSE_LIMIT):
    """Frobenius norm of the simplex truncation vs the weighted l^2 bound.

    rhs^2 = sum_{|j| <= 2N} (|j|+1)^(2d) a(|j|)^2 (|j|+1)^-d
          = sum_{m <= 2N} W_d(m) (m+1)^d a(m)^2.
    """
    sim = build_simplex_hankel(spec, N, dense_limit)
    a = np.asarray(sim.symbol)
    lhs = float(np.linalg.norm(sim.matrix))
    m = np.arange(2 * N + 1)
    w = np.array([float(simplex_weight(spec.d, int(j))) for j in m])
    rhs = float(math.sqrt(np.sum(w * (m + 1.0) ** spec.d * a**2)))
    return lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-12))


def thread_cap(default=None):
    env = os.environ.get("HANKEL_SPECTRA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return default or os.cpu_count() or 1


def parity_split_study(spec: SymbolSpec, N: int, k: int, window=(20, 200), solver="lanczos",
                       seed: int = 0, tol: float = 1e-10, threads: int | None = None) -> LabReport:
    """Studies for (b1, 0), (0, bm1) and (b1, bm1); compares their scales via l^(1/gamma)."""
    if spec.b1 == 0 or spec.bm1 == 0:
        raise DomainError("parity split needs b1 != 0 and bm1 != 0")
    kind = Kind.MODEL if spec.kind is Kind.MODEL else Kind.GENERAL
    parts = {
        "b1": replace(spec, bm1=0.0, kind=kind),
        "bm1": replace(spec, b1=0.0, kind=kind),
        "combined": replace(spec, kind=kind),
    }
    # quadrature constants once; each study owns its operator
    base = asymptotic_constants(parts["combined"])
    def run(item):
        name, sp = item
        c = AsymptoticConstants(sp.d, sp.gamma, sp.b1, sp.bm1, base.C_dgamma,
                                *_c_pm(base.C_dgamma, sp), base.quad_error)
        return name, asymptotic_study(sp, N, k, window, solver, seed, tol, c)
    workers = min(3, threads or thread_cap())
    with ThreadPoolExecutor(max_workers=workers) as ex:
        reports = dict(ex.map(run, parts.items()))
    g = spec.gamma
    fits = {"window": list(window)}
    for side in ("plus", "minus"):
        key = "C_plus" if side == "plus" else "C_minus"
        ca, cb = getattr(reports["b1"].constants, key), getattr(reports["bm1"].constants, key)
        comb = (ca ** (1 / g) + cb ** (1 / g)) ** g
        fits[f"predicted_{side}"] = getattr(base, key)
        fits[f"parts_combination_{side}"] = comb
        fits[f"prediction_consistent_{side}"] = math.isclose(comb, getattr(base, key),
                                                           rel_tol=1e-12, abs_tol=1e-300)
        # measured scales: window medians of n^gamma lambda_n
        def scale(rep):
            lam = np.asarray(getattr(rep, f"lambda_{side}"))
            n, sel = _window_stats(lam, *window)
            return float(np.median(n[sel] ** g * lam[sel])) if np.any(sel) else 0.0
        sa, sb, sc = scale(reports["b1"]), scale(reports["bm1"]), scale(reports["combined"])
        mix = (sa ** (1 / g) + sb ** (1 / g)) ** g
        fits[f"measured_parts_{side}"] = [sa, sb]
        fits[f"measured_combined_{side}"] = sc
        fits[f"measured_ratio_{side}"] = sc / mix if mix > 0 else math.nan
    rep = reports["combined"]
    return replace(rep, fits={**rep.fits, **fits}, parts=reports)


def _c_pm(C, sp):
    from .constants import _signed_scale
    sp_, sm_ = _signed_scale(sp.b1, sp.bm1, sp.gamma)
    return sp_ * C, sm_ * C


def interlacing_check(spec: SymbolSpec, N: int, k: int = 20, seed: int = 0, tol: float = 1e-10):
    """lambda_n^+ at size N is <= lambda_n^+ at size 2N (+1e-12) for reported n."""
    small = solve(FastHankelOperator.from_matrix(build_weighted_hankel(spec, N)), k, "lanczos", tol, seed)
    big = solve(FastHankelOperator.from_matrix(build_weighted_hankel(spec, 2 * N)), k, "lanczos", tol, seed)
    n = min(len(small.pos), len(big.pos))
    diff = np.asarray(small.pos[:n]) - np.asarray(big.pos[:n])
    return bool(np.all(diff <= 1e-12)), n
