"""Exit criteria. Each test prints one PASS/FAIL line (also collected in the
terminal summary) and asserts at the stated tolerance."""
import itertools
import math
import os
import subprocess
import sys
import time

import numpy as np

from conftest import record_acceptance
from covertwalk import analytic
from covertwalk.codec import decode, encode
from covertwalk.kernels import simulate_trials
from covertwalk.optimizer import argmax_covertness, verify_optimal_n
from covertwalk.params import DelayModel, SystemParams
from covertwalk.simcore import run_monte_carlo

M1, M2 = DelayModel.MODEL1, DelayModel.MODEL2
FIG = dict(s=50, r=10, m=10.0, lam=1.0, w=50.0)


def random_params(rng, s_max=80):
    s = int(rng.integers(2, s_max + 1))
    r = int(rng.integers(1, s + 1))
    n = int(rng.integers(1, r + 1))
    k = int(rng.integers(1, n + 1))
    return SystemParams(s=s, r=r, m=float(rng.uniform(0.5, 30)), k=k, n=n,
                        lam=float(rng.uniform(0.2, 5)), w=float(rng.uniform(1, 100)))


def test_c01_detection_matches_monte_carlo():
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    oracle = np.random.default_rng(202)
    worst, ok = 0.0, True
    for _ in range(20):
        lam, m, k = rng.uniform(0.2, 5), rng.uniform(1, 50), int(rng.integers(1, 11))
        ell = m / k
        w = ell * rng.uniform(1.0, 20.0)
        p = SystemParams(s=k, r=k, m=m, k=k, n=k, lam=lam, w=w)
        hits, size = 0, 10**7
        for _ in range(5):
            t_tr = ell + oracle.exponential(1 / lam, size // 5)
            t_ar = oracle.uniform(0, w, size // 5)
            hits += int(np.count_nonzero(t_tr >= t_ar))
        est = hits / size
        se = math.sqrt(est * (1 - est) / size)
        z = abs(est - analytic.detection_probability(p)) / se
        worst = max(worst, z)
        ok &= z <= 3
    short = SystemParams(s=5, r=5, m=10, k=2, n=2, lam=1, w=4.99)
    ok &= analytic.detection_probability(short) == 1.0
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    assert record_acceptance(1, "P_d closed form vs 1e7-sample Monte Carlo (20 sets)", ok,
                             f"max |z|={worst:.2f}, W<ell gives 1, {elapsed:.1f}s")


def test_c02_degenerate_covertness():
    values = [analytic.covertness_probability(SystemParams(s=50, r=20, m=10, k=1, n=n, lam=1, w=8))
              for n in range(1, 21)]
    ok = all(v == 0.0 for v in values)
    assert record_acceptance(2, "P_c = 0 for lambda=1, m=10, k=1, W=8, all n", ok)


def test_c03_covertness_peak():
    start = time.perf_counter()
    base = SystemParams(s=50, r=15, m=10, k=1, n=15, lam=1, w=50)
    k, pc = argmax_covertness(base, range(1, 21), 15)
    elapsed = time.perf_counter() - start
    ok = k == 12 and elapsed < 1.0
    assert record_acceptance(3, "argmax_k P_c at n=15 is k=12", ok, f"k={k}, P_c={pc:.6f}")


def _sim_means(params_list, model, trials=100_000, seed=0):
    return [run_monte_carlo(p, model, trials=trials, seed=seed) for p in params_list]


def test_c04_model1_optimum_in_n():
    start = time.perf_counter()
    grid = [SystemParams(k=3, n=n, **FIG) for n in range(3, 11)]
    theory = [analytic.expected_total(p, M1) for p in grid]
    sims = _sim_means(grid, M1)
    close = all(abs(s.mean_total - t) <= 0.02 * t for s, t in zip(sims, theory))
    n_theory = 3 + int(np.argmin(theory))
    n_sim = 3 + int(np.argmin([s.mean_total for s in sims]))
    elapsed = time.perf_counter() - start
    ok = n_theory == 5 and n_sim == 5 and close and elapsed < 120
    assert record_acceptance(4, "Model 1, k=3: theory and simulation minimize at n=5", ok,
                             f"theory n={n_theory}, sim n={n_sim}, within 2%={close}, {elapsed:.1f}s")


def test_c05_model1_global_minimum():
    grid = [SystemParams(k=k, n=n, **FIG) for k in range(1, 6) for n in range(k, 11)]
    theory = [analytic.expected_total(p, M1) for p in grid]
    sims = _sim_means(grid, M1)
    at_t = grid[int(np.argmin(theory))]
    i_s = int(np.argmin([s.mean_total for s in sims]))
    at_s = grid[i_s]
    mean = sims[i_s].mean_total
    ok = (at_t.k, at_t.n) == (1, 2) and (at_s.k, at_s.n) == (1, 2) and abs(mean - 68.5556) <= 0.02 * 68.5556
    assert record_acceptance(5, "Model 1 grid minimum at (k=1, n=2), sim mean 68.6 +- 2%", ok,
                             f"theory ({at_t.k},{at_t.n}), sim ({at_s.k},{at_s.n}) mean {mean:.3f}")


def test_c06_model2_optimum():
    grid = [SystemParams(k=3, n=n, **FIG) for n in range(3, 11)]
    theory = [analytic.expected_total(p, M2) for p in grid]
    sims = _sim_means(grid, M2)
    n_theory = 3 + int(np.argmin(theory))
    n_sim = 3 + int(np.argmin([s.mean_total for s in sims]))
    closed = analytic.optimal_n_m2(10, 3)
    ok = n_theory == n_sim == closed == 5
    assert record_acceptance(6, "Model 2, k=3: theory, simulation and closed form give n=5", ok,
                             f"theory {n_theory}, sim {n_sim}, optimal_n_m2 {closed}")


def test_c07_closed_form_optimal_n():
    start = time.perf_counter()
    report = verify_optimal_n(60)
    elapsed = time.perf_counter() - start
    ok = report.ok and report.checked == 1830 and elapsed < 10
    assert record_acceptance(7, "optimal_n_m2 equals exhaustive search for k <= r <= 60", ok,
                             f"{len(report.mismatches)} mismatches, {report.ties} ties, {elapsed:.2f}s")


def test_c08_simulation_matches_theory():
    start = time.perf_counter()
    rng = np.random.default_rng(808)
    detail = []
    ok = True
    for model in (M1, M2):
        good = 0
        for i in range(30):
            p = random_params(rng)
            a = simulate_trials(p, model, trials=100_000, seed=1000 + i)
            root = math.sqrt(len(a))
            checks = [
                (a.dissemination_time, analytic.expected_dissemination(p, model)),
                (a.collection_time, analytic.expected_collection(p, model)),
                (a.total_time, analytic.expected_total(p, model)),
            ]
            good += all(abs(x.mean() - t) <= 3 * x.std(ddof=1) / root for x, t in checks)
        detail.append(f"model {int(model)}: {good}/30")
        ok &= good >= 28
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    assert record_acceptance(8, "simulated dis/col/total means within 3 SE of closed forms", ok,
                             ", ".join(detail) + f", {elapsed:.1f}s")


def test_c09_covertness_conjunction():
    rng = np.random.default_rng(909)
    worst, ok = 0.0, True
    for i in range(10):
        p = random_params(rng, s_max=40)
        target = analytic.covertness_probability(p)
        s = run_monte_carlo(p, M1 if i % 2 == 0 else M2, trials=100_000, seed=i)
        se = math.sqrt(target * (1 - target) / s.trials)
        if se == 0:
            ok &= s.covertness == target
            continue
        z = abs(s.covertness - target) / se
        worst = max(worst, z)
        ok &= z <= 3
    assert record_acceptance(9, "empirical covertness vs (1-P_d)^(n+k), 10 sets", ok, f"max |z|={worst:.2f}")


def test_c10_codec_mds():
    start = time.perf_counter()
    rng = np.random.default_rng(1010)
    failures = decodes = 0
    for n in range(1, 9):
        for k in range(1, n + 1):
            subsets = list(itertools.combinations(range(n), k))
            for _ in range(100):
                msg = rng.integers(0, 256, int(rng.integers(1, 200)), dtype=np.uint8).tobytes()
                cs = encode(msg, k, n)
                for sub in subsets:
                    decodes += 1
                    failures += decode(cs.subset(sub), k, n, len(msg)) != msg
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    assert record_acceptance(10, "every k-subset decodes, k <= n <= 8, 100 messages", ok,
                             f"{decodes} decodes, {failures} failures, {elapsed:.1f}s")


def test_c11_sweep_reproducible(tmp_path):
    env = dict(os.environ, NUMBA_NUM_THREADS="4")
    outs = []
    for threads in ("1", "4"):
        path = tmp_path / f"fig2_{threads}.csv"
        subprocess.run([sys.executable, "-m", "covertwalk", "sweep", "--preset", "fig2", "--seed", "7",
                        "--threads", threads, "--out", str(path)], env=env, check=True)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and outs[0].count(b"\n") == 43
    assert record_acceptance(11, "sweep --preset fig2 --seed 7 byte-identical across thread counts", ok,
                             f"{len(outs[0])} bytes")
