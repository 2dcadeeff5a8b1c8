"""Closed-form covertness and delay expectations.

All functions are pure. Harmonic numbers are computed by forward summation,
which is accurate to well under 1e-12 relative error for the relay counts
used here.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .params import DelayModel, ParameterError, SystemParams


@lru_cache(maxsize=4096)
def harmonic(j: int) -> float:
    """H_j = 1 + 1/2 + ... + 1/j, with H_0 = 0."""
    if j < 0:
        raise ParameterError(f"harmonic number needs j >= 0 (got {j})")
    total = 0.0
    for i in range(1, j + 1):
        total += 1.0 / i
    return total


def detection_from(ell: float, lam: float, w: float) -> float:
    """Probability that a U(0, w) warden arrival lands inside an ``ell + Exp(lam)`` transmission."""
    if w < ell:
        return 1.0
    p = 1.0 / (lam * w) + ell / w - math.exp(-lam * (w - ell)) / (lam * w)
    return min(1.0, max(0.0, p))


def covertness(m: float, k: int, n: int, lam: float, w: float) -> float:
    """Covertness of ``n + k`` independently monitored transmissions of ``m/k`` bits.

    Defined for any positive ``k`` and ``n``; does not require ``k <= n``.
    """
    p_d = detection_from(m / k, lam, w)
    return (1.0 - p_d) ** (n + k)


def detection_probability(params: SystemParams) -> float:
    return detection_from(params.chunk_length, params.lam, params.w)


def covertness_probability(params: SystemParams) -> float:
    return (1.0 - detection_probability(params)) ** (params.n + params.k)


def expected_chunk_time_m1(params: SystemParams, i: int) -> float:
    """Expected Model 1 time to place the i-th chunk (1-based)."""
    if not 1 <= i <= params.n:
        raise ParameterError(f"chunk index must lie in [1, n={params.n}] (got {i})")
    hit = (params.r - i + 1) / params.s
    return 1.0 / params.lam + params.chunk_length + 1.0 / hit


def per_visit_budget(params: SystemParams) -> float:
    """Model 2 cost of every visited vertex."""
    return 1.0 / params.lam + params.chunk_length + 1.0


def expected_dissemination_visits(params: SystemParams) -> float:
    return params.s * (harmonic(params.r) - harmonic(params.r - params.n))


def expected_collection_visits(params: SystemParams) -> float:
    return params.s * (harmonic(params.n) - harmonic(params.n - params.k))


def expected_dissemination(params: SystemParams, model=DelayModel.MODEL1) -> float:
    model = DelayModel.parse(model)
    visits = expected_dissemination_visits(params)
    if model is DelayModel.MODEL1:
        return params.n / params.lam + params.n * params.m / params.k + visits
    return per_visit_budget(params) * visits


def expected_collection(params: SystemParams, model=DelayModel.MODEL1) -> float:
    model = DelayModel.parse(model)
    visits = expected_collection_visits(params)
    if model is DelayModel.MODEL1:
        return params.k / params.lam + params.m + visits
    return per_visit_budget(params) * visits


def expected_total(params: SystemParams, model=DelayModel.MODEL1) -> float:
    model = DelayModel.parse(model)
    s, r, n, k = params.s, params.r, params.n, params.k
    coupon = s * (harmonic(r) + harmonic(n) - harmonic(r - n) - harmonic(n - k))
    if model is DelayModel.MODEL1:
        return (n + k) / params.lam + (n / k + 1.0) * params.m + coupon
    return per_visit_budget(params) * coupon


# relative gap below which two expected totals count as a tie
TIE_RTOL = 1e-9


def _m2_shape(r: int, k: int, n: int) -> float:
    # E[T_tot] under Model 2 divided by its positive per-visit budget and s
    return harmonic(r) + harmonic(n) - harmonic(r - n) - harmonic(n - k)


def optimal_n_m2(r: int, k: int) -> int:
    """Redundancy minimizing the Model 2 expected total time.

    The continuous optimum is ``sqrt(r*k + k) - 1``; its floor and ceiling
    (clamped to ``[k, r]``) are compared and the smaller ``n`` wins ties.
    """
    if k < 1 or r < 1:
        raise ParameterError(f"need r >= 1 and k >= 1 (got r={r}, k={k})")
    if k > r:
        raise ParameterError(f"constraint k <= r violated (k={k}, r={r})")
    root = math.sqrt(r * k + k) - 1.0
    lo = min(max(math.floor(root), k), r)
    hi = min(max(math.ceil(root), k), r)
    if lo == hi and lo in (k, r) and not k <= root <= r:
        candidates = range(k, r + 1)
    else:
        candidates = sorted({lo, hi})
    best_n, best_val = None, math.inf
    for n in candidates:
        val = _m2_shape(r, k, n)
        if best_n is None or val < best_val - TIE_RTOL * abs(best_val):
            best_n, best_val = n, val
    return best_n
