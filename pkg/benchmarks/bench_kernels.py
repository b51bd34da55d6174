"""Compare the compiled and pure-Python coordinate-descent kernels.

Both backends run the same number of sweeps from the same start on the same
problems; the table reports time per sweep and the largest difference
between the two results.

    python3 benchmarks/bench_kernels.py [--sweeps 20] [--repeat 3]
"""
import argparse
import time

import numpy as np

from lassokit.kernels import get_backend

SIZES = [(50, 20), (100, 100), (200, 400), (500, 1000)]


def _problem(n, p, seed):
    rng = np.random.default_rng(seed)
    X = np.asfortranarray(rng.standard_normal((n, p)))
    y = rng.standard_normal(n)
    lam = 0.1 * float(np.max(np.abs(X.T @ y)))
    return X, y, lam


def _run(fn, X, y, lam, sweeps):
    p = X.shape[1]
    beta = np.zeros(p)
    r = y.copy()
    col_sq = np.einsum("ij,ij->j", X, X)
    idx = np.arange(p, dtype=np.int64)
    t = time.perf_counter()
    fn(X, beta, r, col_sq, lam, 0.0, sweeps, idx)
    return time.perf_counter() - t, beta


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweeps", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        backends = [get_backend("cython"), get_backend("python")]
    except ImportError:
        print("compiled kernel not built; only the Python backend is available")
        backends = [get_backend("python")]
    print(f"{'n':>5} {'p':>5} " + " ".join(f"{name + ' ms/sweep':>18}" for name, _ in backends)
          + f" {'speedup':>8} {'max |diff|':>11}")
    for n, p in SIZES:
        X, y, lam = _problem(n, p, seed=n * 7919 + p)
        times, sols = [], []
        for _, fn in backends:
            best = min(_run(fn, X, y, lam, args.sweeps)[0] for _ in range(args.repeat))
            times.append(1e3 * best / args.sweeps)
            sols.append(_run(fn, X, y, lam, args.sweeps)[1])
        cols = " ".join(f"{t:18.4f}" for t in times)
        if len(backends) == 2:
            diff = float(np.max(np.abs(sols[0] - sols[1])))
            print(f"{n:5d} {p:5d} {cols} {times[1] / times[0]:8.1f} {diff:11.2e}")
        else:
            print(f"{n:5d} {p:5d} {cols}")


if __name__ == "__main__":
    main()
