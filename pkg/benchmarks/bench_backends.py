"""Time the numba and numpy simulation backends on the same workload.

    python3 benchmarks/bench_backends.py --trials 200000 --threads 1
"""
import argparse
import time

import numpy as np

from covertwalk import _jit
from covertwalk.kernels import simulate_trials
from covertwalk.params import SystemParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--model", type=int, choices=[1, 2], default=1)
    args = ap.parse_args()

    params = SystemParams(s=50, r=10, m=10.0, k=3, n=5, lam=1.0, w=50.0)
    backends = ["numpy"] + (["numba"] if _jit.HAS_NUMBA else [])
    if _jit.HAS_NUMBA:
        simulate_trials(params, args.model, trials=10, backend="numba")  # compile / load cache

    results = {}
    for backend in backends:
        run = lambda: simulate_trials(params, args.model, trials=args.trials, seed=1,
                                      backend=backend, threads=args.threads)
        secs, arrays = best_of(run, args.repeat)
        results[backend] = arrays
        print(f"{backend:>6}: {secs:8.3f} s  {args.trials / secs:12.0f} trials/s  "
              f"mean total {arrays.total_time.mean():.4f}")

    if len(results) == 2:
        a, b = results["numpy"], results["numba"]
        same = np.array_equal(a.detections, b.detections) and np.array_equal(
            a.dissemination_steps, b.dissemination_steps) and np.array_equal(a.collection_steps, b.collection_steps)
        diff = np.max(np.abs(a.total_time - b.total_time))
        print(f"steps/detections identical: {same}; max |time diff| {diff:.2e}")


if __name__ == "__main__":
    main()
