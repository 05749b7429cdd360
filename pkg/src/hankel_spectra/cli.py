"""Command-line interface: ``hankel-spectra {constants,spectrum,verify,study}``.

Exit codes: 0 ok, 1 verification failed, 2 usage / invalid parameters,
3 numeric failure, 4 capacity exceeded.  Parameters come from flags, then an
optional ``--config`` JSON file, then defaults (in that order of precedence).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, ConfigurationError, DomainError, NumericError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC, EXIT_CAPACITY = 0, 1, 2, 3, 4

SPEC_DEFAULTS = {"d": 1, "gamma": 1.0, "b1": 1.0, "bm1": 0.0, "kind": None}

DEFAULTS = {
    "constants": {**SPEC_DEFAULTS, "tol": 1e-12},
    "spectrum": {**SPEC_DEFAULTS, "N": 256, "k": 20, "solver": "lanczos", "seed": 0,
                 "tol": 1e-10, "out": None},
    "verify.reduce": {**SPEC_DEFAULTS, "d": 2, "N": 12, "out": None, "seed": 0},
    "verify.weyl": {"preset": "gaussian", "d": 2, "gamma": 1.0, "M": 4096, "L": None,
                    "n_lo": 10, "n_hi": 60, "slope_tol": 0.05, "ratio_lo": 0.7,
                    "ratio_hi": 1.3, "out": None, "seed": 0},
    "verify.laplace": {"gamma": 1.0, "n_max": 2, "lambda0": 0.5, "out": None},
    "verify.model": {**SPEC_DEFAULTS, "N": 2**14, "k": 200, "out": None, "seed": 0},
    "verify.s2": {**SPEC_DEFAULTS, "d": 2, "N": 10, "out": None},
    "study.asymptotic": {**SPEC_DEFAULTS, "N": 2**12, "k": 200, "window": [20, 200],
                         "solver": "lanczos", "seed": 0, "tol": 1e-10, "out": None, "plot": None},
    "study.model-compare": {**SPEC_DEFAULTS, "N": 2**12, "k": 200, "solver": "lanczos",
                            "seed": 0, "tol": 1e-10, "identical": False, "out": None,
                            "plot": None},
    "study.parity-split": {**SPEC_DEFAULTS, "b1": 1.0, "bm1": 1.0, "N": 2**12, "k": 200,
                           "window": [20, 200], "solver": "lanczos", "seed": 0, "tol": 1e-10,
                           "out": None, "plot": None},
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated parameter set for one command (``command`` like "study.asymptotic")."""

    command: str
    params: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, command, flags: dict, config: dict | None = None):
        if command not in DEFAULTS:
            raise UsageError(f"unknown command {command!r}")
        allowed = DEFAULTS[command]
        params = dict(allowed)
        for source in (config or {}), flags:
            unknown = sorted(set(source) - set(allowed))
            if unknown:
                raise UsageError(f"unknown keys for {command}: {', '.join(unknown)}")
            params.update(source)
        return cls(command, params)


# ---------------------------------------------------------------- serialization

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and obj.__class__.__module__.endswith("params"):
        return obj.value
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(text, path, stdout):
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _col(seq, i):
    return seq[i] if seq is not None and i < len(seq) else None


PLOT_TEMPLATE = '''"""Plot n^gamma lambda_n / C against n on log axes (generated)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv!r})))
for col in ({cols}):
    pts = [(int(r["n"]), float(r[col])) for r in rows if r.get(col)]
    pts = [(n, v) for n, v in pts if v > 0]
    if pts:
        plt.loglog(*zip(*pts), ".", label=col)
plt.xlabel("n")
plt.legend()
plt.savefig({png!r}, dpi=150)
'''


def _plot_script(path, csv_path, cols):
    text = PLOT_TEMPLATE.format(csv=str(csv_path), cols=", ".join(repr(c) for c in cols) + ",",
                                png=str(Path(csv_path).with_suffix(".png")))
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- helpers

def _spec(p, model=False):
    from .params import Kind, SymbolSpec
    kind = p.get("kind")
    if kind is None:
        kind = "model" if model else ("pure_power" if (p["b1"], p["bm1"]) == (1.0, 0.0) else "general")
    try:
        return SymbolSpec(int(p["d"]), float(p["gamma"]), float(p["b1"]), float(p["bm1"]), Kind(kind))
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def _check(value, ok, **extra):
    return {"pass": bool(ok), "value": value, **extra}


# ---------------------------------------------------------------- commands

def cmd_constants(p, stdout):
    from .constants import c_dgamma
    from .params import QuadratureConfig
    if not p["gamma"] > 0:
        raise DomainError("gamma must be > 0")
    c = c_dgamma(int(p["d"]), float(p["gamma"]), QuadratureConfig(tol=float(p["tol"])),
                 float(p["b1"]), float(p["bm1"]))
    stdout.write(dumps_json(c.to_dict()))
    return EXIT_OK


def cmd_spectrum(p, stdout):
    from .reduction import DENSE_LIMIT, build_weighted_hankel
    from .speceng import FastHankelOperator, dense_eig, lanczos_extremal
    spec = _spec(p)
    N, k = int(p["N"]), int(p["k"])
    if N < 1 or k < 0:
        raise DomainError("need N >= 1 and k >= 0")
    if p["solver"] == "dense" and N + 1 > DENSE_LIMIT:
        raise CapacityError(f"dense solver limited to N+1 <= {DENSE_LIMIT}, got N={N}")
    M = build_weighted_hankel(spec, N)
    if p["solver"] == "dense":
        res = dense_eig(M.dense(), k=k)
    elif p["solver"] == "lanczos":
        res = lanczos_extremal(FastHankelOperator.from_matrix(M), k, tol=float(p["tol"]),
                               seed=int(p["seed"]))
    else:
        raise DomainError(f"unknown solver {p['solver']!r}")
    rows = [(i + 1, _col(res.pos, i), _col(res.residuals_pos, i), _col(res.neg, i),
             _col(res.residuals_neg, i)) for i in range(k)
            if i < max(len(res.pos), len(res.neg))]
    text = dumps_csv(["n", "lambda_plus", "residual_plus", "lambda_minus", "residual_minus"], rows)
    meta = {"spec": spec.to_dict(), "k": k, **res.to_dict(), "converged_count": res.converged_count}
    if p["out"]:
        Path(p["out"]).write_text(text, encoding="utf-8")
        Path(str(p["out"]) + ".json").write_text(dumps_json(meta), encoding="utf-8")
    else:
        stdout.write(text)
    return EXIT_OK


def verify_reduce(p):
    from .reduction import (build_simplex_hankel, build_weighted_hankel, j_matrix,
                            reduction_check)
    spec = _spec(p)
    N = int(p["N"])
    rep = reduction_check(spec, N)
    rng = np.random.default_rng(int(p["seed"]))
    gam = build_weighted_hankel(spec, N)
    sim = build_simplex_hankel(spec, N, symbol=gam.symbol)
    J = j_matrix(spec.d, N)
    G = gam.dense()
    qf, iso = 0.0, 0.0
    for _ in range(10):
        x, y = rng.standard_normal(sim.size), rng.standard_normal(sim.size)
        lhs, rhs = y @ sim.matrix @ x, (J @ y) @ G @ (J @ x)
        qf = max(qf, abs(lhs - rhs) / max(abs(lhs), 1e-300))
        z = rng.standard_normal(N + 1)
        iso = max(iso, abs(np.linalg.norm(J.T @ z) / np.linalg.norm(z) - 1.0))
    return {
        "spectrum_match": _check(rep["max_rel_eig_diff"], rep["max_rel_eig_diff"] <= 1e-10),
        "kernel_dim": _check(rep["kernel_dim"], rep["kernel_dim"] == rep["expected_kernel_dim"],
                             expected=rep["expected_kernel_dim"],
                             raw_simplex_count=rep["kernel_dim_numeric"],
                             gamma_numeric_kernel=rep["gamma_kernel_numeric"]),
        "quadratic_form": _check(qf, qf <= 1e-12),
        "j_adjoint_isometry": _check(iso, iso <= 1e-12),
    }


def _weyl_spec(p):
    from .weylcheck import japanese_bracket_spec, model_psdo_spec
    if p["preset"] == "gaussian":
        return japanese_bracket_spec(L=float(p["L"] or 12.0), M=int(p["M"]))
    if p["preset"] == "model":
        return model_psdo_spec(int(p["d"]), float(p["gamma"]), 1.0, L=float(p["L"] or 4.0),
                               M=int(p["M"]))
    raise DomainError(f"unknown preset {p['preset']!r}")


def verify_weyl(p):
    from .weylcheck import predict_for, weyl_verify
    spec = _weyl_spec(p)
    pred = predict_for(spec)
    fit = weyl_verify(spec, pred, (int(p["n_lo"]), int(p["n_hi"])), seed=int(p["seed"]))
    g = spec.gamma
    slope_ok = abs(fit.slope_plus + g) <= float(p["slope_tol"]) * g
    mean_ok = float(p["ratio_lo"]) <= fit.mean_ratio_plus <= float(p["ratio_hi"])
    return {
        "slope_plus": _check(fit.slope_plus, slope_ok, target=-g),
        "mean_ratio_plus": _check(fit.mean_ratio_plus, mean_ok, C_plus=pred.C_plus),
    }


def laplace_ratios(gamma, n, lambda0, ts=(1e2, 1e4, 1e6)):
    from .params import QuadratureConfig, laplace_In_batch
    quad = QuadratureConfig(tol=1e-300, rel_tol=1e-12)
    vals = laplace_In_batch(n, np.array(ts), gamma, lambda0, quad)
    t = np.array(ts)
    return vals * t ** (1 + n) * np.log(t) ** gamma / math.factorial(n)


def verify_laplace(p):
    out = {}
    for n in range(int(p["n_max"]) + 1):
        r = laplace_ratios(float(p["gamma"]), n, float(p["lambda0"]))
        dev = np.abs(r - 1.0)
        out[f"n{n}_decreasing"] = _check(dev.tolist(), bool(np.all(np.diff(dev) < 0)),
                                         ratios=r.tolist())
        out[f"n{n}_final"] = _check(float(dev[-1]), dev[-1] < 0.2)
    return out


def verify_model(p):
    from .lab import model_compare
    t = _spec(p)
    m = _spec({**p, "kind": "model"}, model=True)
    rep = model_compare(t, m, int(p["N"]), int(p["k"]), seed=int(p["seed"]))
    return {"dyadic_medians_decrease": _check(rep.fits["medians"], rep.fits["decreasing"],
                                              singular_count=rep.fits.get("singular_count"))}


def verify_s2(p):
    from .lab import s2_bound_check
    lhs, rhs, ok = s2_bound_check(_spec(p), int(p["N"]))
    return {"s2_bound": _check(lhs, ok, rhs=rhs)}


VERIFY = {"reduce": verify_reduce, "weyl": verify_weyl, "laplace": verify_laplace,
          "model": verify_model, "s2": verify_s2}


def cmd_verify(suite, p, stdout):
    checks = VERIFY[suite](p)
    passed = all(c["pass"] for c in checks.values())
    _emit(dumps_json({"suite": suite, "pass": passed, "checks": checks}), p["out"], stdout)
    return EXIT_OK if passed else EXIT_FAIL


def _study_rows(rep, k):
    return [(i + 1, _col(rep.lambda_plus, i), _col(rep.lambda_minus, i),
             _col(rep.ratio_plus, i), _col(rep.ratio_minus, i)) for i in range(k)]


def cmd_study(kind, p, stdout):
    from .lab import asymptotic_study, model_compare, parity_split_study
    N, k = int(p["N"]), int(p["k"])
    if kind == "asymptotic":
        rep = asymptotic_study(_spec(p), N, k, tuple(p["window"]), p["solver"], int(p["seed"]),
                               float(p["tol"]))
        header = ["n", "lambda_plus", "lambda_minus", "ratio_plus", "ratio_minus"]
        rows = _study_rows(rep, k)
    elif kind == "model-compare":
        t = _spec(p)
        m = t if p["identical"] else _spec({**p, "kind": "model"}, model=True)
        rep = model_compare(t, m, N, k, p["solver"], int(p["seed"]), float(p["tol"]))
        header = ["n", "decay"]
        rows = [(i + 1, v) for i, v in enumerate(rep.decay or ())]
    else:
        rep = parity_split_study(_spec(p), N, k, tuple(p["window"]), p["solver"],
                                 int(p["seed"]), float(p["tol"]))
        header = ["n", "lambda_plus", "lambda_minus", "ratio_plus", "ratio_minus"]
        rows = _study_rows(rep, k)
    report = dumps_json(rep.to_dict())
    table = dumps_csv(header, rows)
    if p["out"]:
        out = Path(p["out"])
        out.write_text(report, encoding="utf-8")
        csv_path = out.with_suffix(".csv")
        csv_path.write_text(table, encoding="utf-8")
        if p["plot"]:
            _plot_script(p["plot"], csv_path, header[1:])
    else:
        stdout.write(report)
    return EXIT_OK


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _spec_flags(sp, model=True):
    S = argparse.SUPPRESS
    sp.add_argument("--d", type=int, default=S, help="dimension d >= 1")
    sp.add_argument("--gamma", type=float, default=S, help="exponent gamma > 0")
    sp.add_argument("--b1", type=float, default=S)
    sp.add_argument("--bm1", type=float, default=S)
    if model:
        sp.add_argument("--kind", choices=["pure_power", "general", "model"], default=S)


def build_parser():
    S = argparse.SUPPRESS
    p = _Parser(prog="hankel-spectra", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with parameters (flags override it)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("constants", help="C_{d,gamma} and C^±")
    _spec_flags(c, model=False)
    c.add_argument("--tol", type=float, default=S)

    s = sub.add_parser("spectrum", help="signed extremal eigenvalues of Gamma_N")
    _spec_flags(s)
    s.add_argument("--N", type=int, default=S)
    s.add_argument("--k", type=int, default=S)
    s.add_argument("--solver", choices=["dense", "lanczos"], default=S)
    s.add_argument("--seed", type=int, default=S)
    s.add_argument("--tol", type=float, default=S)
    s.add_argument("--out", default=S, help="CSV path; metadata goes to <out>.json")

    v = sub.add_parser("verify", help="property checks")
    vs = v.add_subparsers(dest="suite", required=True, parser_class=_Parser)
    r = vs.add_parser("reduce")
    _spec_flags(r)
    r.add_argument("--N", type=int, default=S)
    r.add_argument("--seed", type=int, default=S)
    w = vs.add_parser("weyl")
    w.add_argument("--preset", choices=["gaussian", "model"], default=S)
    w.add_argument("--d", type=int, default=S)
    w.add_argument("--gamma", type=float, default=S)
    w.add_argument("--M", type=int, default=S)
    w.add_argument("--L", type=float, default=S)
    w.add_argument("--n-lo", dest="n_lo", type=int, default=S)
    w.add_argument("--n-hi", dest="n_hi", type=int, default=S)
    w.add_argument("--seed", type=int, default=S)
    la = vs.add_parser("laplace")
    la.add_argument("--gamma", type=float, default=S)
    la.add_argument("--n-max", dest="n_max", type=int, default=S)
    la.add_argument("--lambda0", type=float, default=S)
    m = vs.add_parser("model")
    _spec_flags(m, model=False)
    m.add_argument("--N", type=int, default=S)
    m.add_argument("--k", type=int, default=S)
    m.add_argument("--seed", type=int, default=S)
    s2 = vs.add_parser("s2")
    _spec_flags(s2)
    s2.add_argument("--N", type=int, default=S)
    for sp in (r, w, la, m, s2):
        sp.add_argument("--out", default=S, help="JSON report path (default stdout)")

    st = sub.add_parser("study", help="experiments producing a LabReport")
    sts = st.add_subparsers(dest="study_kind", required=True, parser_class=_Parser)
    for name in ("asymptotic", "model-compare", "parity-split"):
        q = sts.add_parser(name)
        _spec_flags(q, model=name != "model-compare")
        q.add_argument("--N", type=int, default=S)
        q.add_argument("--k", type=int, default=S)
        q.add_argument("--solver", choices=["dense", "lanczos"], default=S)
        q.add_argument("--seed", type=int, default=S)
        q.add_argument("--tol", type=float, default=S)
        if name != "model-compare":
            q.add_argument("--window", type=int, nargs=2, default=S)
        else:
            q.add_argument("--identical", action="store_true", default=S,
                           help="compare the target with itself (zero operator)")
        q.add_argument("--out", default=S, help="LabReport JSON path; CSV next to it")
        q.add_argument("--plot", default=S, help="write a matplotlib script here")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = vars(build_parser().parse_args(argv))
        config = None
        cfg_path = ns.pop("config", None)
        if cfg_path:
            try:
                config = json.loads(Path(cfg_path).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise UsageError(f"cannot read config {cfg_path}: {exc}") from exc
            if not isinstance(config, dict):
                raise UsageError("config file must hold a JSON object")
        command = ns.pop("command")
        sub = ns.pop("suite", None) or ns.pop("study_kind", None)
        key = f"{command}.{sub}" if sub else command
        cfg = RunConfig.resolve(key, ns, config)
        if command == "constants":
            return cmd_constants(cfg.params, stdout)
        if command == "spectrum":
            return cmd_spectrum(cfg.params, stdout)
        if command == "verify":
            return cmd_verify(sub, cfg.params, stdout)
        return cmd_study(sub, cfg.params, stdout)
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ConfigurationError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CapacityError as exc:
        stderr.write(f"capacity: {exc}\n")
        return EXIT_CAPACITY
    except NumericError as exc:
        stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
