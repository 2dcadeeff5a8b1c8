"""Batch trial kernels.

Two interchangeable backends run the same per-trial procedure and consume the
same counter-based draws in the same order:

* ``numba``: one compiled scalar loop per trial, trials spread with ``prange``.
* ``numpy``: all trials of a block advance in lockstep, one vectorized step at
  a time, with finished trials dropped from the active set.

Draw order inside a trial (stream position increments by one per draw):

1. relay placement, partial Fisher-Yates over the ``s`` vertices (``r`` draws)
2. Alice's walk: one draw per visited vertex (the first picks the start
   vertex); a visit that deposits a chunk adds one draw for the transmission
   tail and one for the warden arrival
3. Bob's walk, same rule, harvesting chunk-holding relays

Vertex status codes: 0 empty, 1 relay, 2 relay holding a chunk, 3 harvested.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _jit
from ._jit import njit, prange
from .params import DelayModel, ParameterError, SystemParams, WalkModel
from .rng import stream_keys, unit_array, unit_nb

EMPTY, RELAY, HOLDING, HARVESTED = 0, 1, 2, 3

NUMPY_BLOCK = 16384


@dataclass
class TrialArrays:
    """Per-trial outputs, indexed by trial number."""

    dissemination_time: np.ndarray
    collection_time: np.ndarray
    dissemination_steps: np.ndarray
    collection_steps: np.ndarray
    detections: np.ndarray

    @property
    def total_time(self):
        return self.dissemination_time + self.collection_time

    def __len__(self):
        return len(self.detections)


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _phase_nb(key, ctr, status, s, want, mark, goal, walk, model, ell, lam, w, budget):
    time = 0.0
    steps = 0
    got = 0
    det = 0
    cur = -1
    one = np.uint64(1)
    while got < goal:
        u = unit_nb(key, ctr)
        ctr += one
        if cur < 0 or walk == 0 or s == 1:
            cur = int(u * s)
        else:
            v = int(u * (s - 1))
            if v >= cur:
                v += 1
            cur = v
        steps += 1
        if model == 1:
            time += 1.0
        if status[cur] == want:
            status[cur] = mark
            got += 1
            t = ell - math.log1p(-unit_nb(key, ctr)) / lam
            ctr += one
            a = unit_nb(key, ctr) * w
            ctr += one
            if model == 1:
                time += t
            if a <= t:
                det += 1
    if model == 2:
        time = steps * budget
    return time, steps, det, ctr


@njit(cache=True)
def _trial_nb(key, s, r, k, n, ell, lam, w, model, walk, budget):
    ctr = np.uint64(0)
    one = np.uint64(1)
    perm = np.arange(s)
    for i in range(r):
        j = i + int(unit_nb(key, ctr) * (s - i))
        ctr += one
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    status = np.zeros(s, dtype=np.int8)
    for i in range(r):
        status[perm[i]] = RELAY
    t_dis, st_dis, det_dis, ctr = _phase_nb(key, ctr, status, s, RELAY, HOLDING, n, walk, model, ell, lam, w, budget)
    t_col, st_col, det_col, ctr = _phase_nb(key, ctr, status, s, HOLDING, HARVESTED, k, walk, model, ell, lam, w, budget)
    return t_dis, st_dis, t_col, st_col, det_dis + det_col


@njit(cache=True, parallel=True)
def _batch_nb(keys, s, r, k, n, ell, lam, w, model, walk, budget, t_dis, t_col, st_dis, st_col, det):
    for i in prange(keys.shape[0]):
        a, b, c, d, e = _trial_nb(keys[i], s, r, k, n, ell, lam, w, model, walk, budget)
        t_dis[i] = a
        st_dis[i] = b
        t_col[i] = c
        st_col[i] = d
        det[i] = e


# ---------------------------------------------------------------- numpy path


def _phase_np(keys, ctr, status, s, want, mark, goal, walk, model, ell, lam, w, budget):
    size = keys.shape[0]
    time = np.zeros(size)
    steps = np.zeros(size, dtype=np.int64)
    det = np.zeros(size, dtype=np.int64)
    got = np.zeros(size, dtype=np.int64)
    cur = np.full(size, -1, dtype=np.int64)
    active = np.arange(size) if goal > 0 else np.arange(0)
    first = True
    while active.size:
        u = unit_array(keys[active], ctr[active])
        ctr[active] += np.uint64(1)
        if first or walk == 0 or s == 1:
            v = (u * s).astype(np.int64)
        else:
            v = (u * (s - 1)).astype(np.int64)
            v += v >= cur[active]
        first = False
        cur[active] = v
        steps[active] += 1
        if model == 1:
            time[active] += 1.0
        hit = status[active, v] == want
        if hit.any():
            h = active[hit]
            status[h, v[hit]] = mark
            got[h] += 1
            t = ell - np.log1p(-unit_array(keys[h], ctr[h])) / lam
            ctr[h] += np.uint64(1)
            a = unit_array(keys[h], ctr[h]) * w
            ctr[h] += np.uint64(1)
            if model == 1:
                time[h] += t
            det[h] += a <= t
            active = active[got[active] < goal]
    if model == 2:
        time = steps * budget
    return time, steps, det


def _block_np(keys, s, r, k, n, ell, lam, w, model, walk, budget):
    size = keys.shape[0]
    rows = np.arange(size)
    ctr = np.zeros(size, dtype=np.uint64)
    perm = np.tile(np.arange(s, dtype=np.int64), (size, 1))
    for i in range(r):
        j = i + (unit_array(keys, ctr) * (s - i)).astype(np.int64)
        ctr += np.uint64(1)
        tmp = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = tmp
    status = np.zeros((size, s), dtype=np.int8)
    status[rows[:, None], perm[:, :r]] = RELAY
    t_dis, st_dis, det_dis = _phase_np(keys, ctr, status, s, RELAY, HOLDING, n, walk, model, ell, lam, w, budget)
    t_col, st_col, det_col = _phase_np(keys, ctr, status, s, HOLDING, HARVESTED, k, walk, model, ell, lam, w, budget)
    return t_dis, st_dis, t_col, st_col, det_dis + det_col


# ---------------------------------------------------------------- dispatch


def simulate_trials(params: SystemParams, model=DelayModel.MODEL1, walk=WalkModel.IID, trials=1,
                    seed=0, first_index=0, backend=None, threads=None) -> TrialArrays:
    """Run trials ``first_index .. first_index + trials - 1`` and return per-trial arrays.

    Results depend only on ``(seed, trial index, params, model, walk)``; the
    backend and thread count change speed, not values (numba and numpy may
    differ in the last ulp of a logarithm).
    """
    model = DelayModel.parse(model)
    walk = WalkModel.parse(walk)
    if trials < 1:
        raise ParameterError(f"trials must be >= 1 (got {trials})")
    backend = backend or _jit.default_backend()
    if backend == "numba" and not _jit.HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")

    keys = stream_keys(seed, np.arange(first_index, first_index + trials, dtype=np.uint64))
    ell = params.chunk_length
    budget = 1.0 / params.lam + ell + 1.0
    args = (params.s, params.r, params.k, params.n, ell, params.lam, params.w, int(model), walk.code, budget)

    t_dis = np.empty(trials)
    t_col = np.empty(trials)
    st_dis = np.empty(trials, dtype=np.int64)
    st_col = np.empty(trials, dtype=np.int64)
    det = np.empty(trials, dtype=np.int64)

    if backend == "numba":
        import numba

        previous = numba.get_num_threads()
        if threads:
            numba.set_num_threads(max(1, min(int(threads), _jit.max_threads())))
        try:
            _batch_nb(keys, *args, t_dis, t_col, st_dis, st_col, det)
        finally:
            numba.set_num_threads(previous)
    else:
        bounds = [(lo, min(lo + NUMPY_BLOCK, trials)) for lo in range(0, trials, NUMPY_BLOCK)]

        def work(bound):
            lo, hi = bound
            a, b, c, d, e = _block_np(keys[lo:hi], *args)
            t_dis[lo:hi], st_dis[lo:hi], t_col[lo:hi], st_col[lo:hi], det[lo:hi] = a, b, c, d, e

        workers = max(1, int(threads or 1))
        if workers == 1 or len(bounds) == 1:
            for bound in bounds:
                work(bound)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(work, bounds))

    return TrialArrays(t_dis, t_col, st_dis, st_col, det)
