"""Compiled vs numpy quadrature kernel on the model-symbol workload.

    python benchmarks/bench_kernels.py --n 65537 --repeat 3
"""

import argparse
import time

import numpy as np

from hankel_spectra import _backend


def workload(n, d, gamma):
    # the t-values used when assembling a model symbol of length n
    t = np.arange(n, dtype=float)
    return (t, d - 1, gamma, 0.75, True, 1e-300, 1e-12, 4000)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2**14 + 1)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    args_ = workload(args.n, args.d, args.gamma)
    results = {}
    for name in _backend.available_backends():
        dt, (vals, _, conv) = best_of(lambda: _backend.laplace_batch(*args_, backend=name),
                                      args.repeat)
        results[name] = (dt, vals)
        print(f"{name:>9}: {dt * 1e3:9.1f} ms  ({args.n} integrals, all converged={bool(conv.all())})")
    if len(results) == 2:
        (tc, vc), (tp, vp) = results["compiled"], results["python"]
        diff = float(np.max(np.abs(vc - vp) / np.abs(vp)))
        print(f"  speedup: {tp / tc:.2f}x   max rel diff: {diff:.1e}")
    else:
        print("compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
