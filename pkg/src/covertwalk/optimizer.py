"""Covertness/delay tradeoff over the chunking (k) and redundancy (n) choices."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import analytic
from .params import DelayModel, ParameterError, SystemParams


class EmptyGridError(ValueError):
    pass


@dataclass(frozen=True)
class TradeoffPoint:
    k: int
    n: int
    p_c: float
    expected_total: float
    model: int = 1
    sim_total: float | None = None

    @property
    def key(self):
        return (self.k, self.n)


def grid_evaluate(base: SystemParams, k_range, n_range, model=DelayModel.MODEL1):
    """Analytic covertness and expected total time for every ``k <= n`` pair, k-major order."""
    model = DelayModel.parse(model)
    points = []
    for k in sorted(set(k_range)):
        for n in sorted(set(n_range)):
            if not 1 <= k <= n <= base.r:
                continue
            p = base.with_(k=k, n=n)
            points.append(TradeoffPoint(k, n, analytic.covertness_probability(p),
                                        analytic.expected_total(p, model), int(model)))
    if not points:
        raise EmptyGridError(f"no (k, n) pair in the ranges satisfies 1 <= k <= n <= r={base.r}")
    return points


def argmax_covertness(base: SystemParams, k_range, n: int):
    """Chunk count ``k`` maximizing ``(1 - P_d)^(n + k)`` for fixed ``n``.

    The covertness formula is evaluated directly, so ``k`` may exceed ``n``
    here. Ties go to the smaller ``k``.
    """
    ks = sorted(set(k_range))
    if not ks:
        raise EmptyGridError("empty k range")
    if ks[0] < 1 or n < 1:
        raise ParameterError("k and n must be positive")
    best_k, best = None, -1.0
    for k in ks:
        pc = analytic.covertness(base.m, k, n, base.lam, base.w)
        if pc > best:
            best_k, best = k, pc
    return best_k, best


def pareto_frontier(points):
    """Points not dominated in (higher P_c, lower E[T_tot]), by ascending delay.

    Along the result both delay and covertness strictly increase. Exact
    duplicates keep the lexicographically smaller ``(k, n)``.
    """
    points = list(points)
    if not points:
        raise EmptyGridError("no points to filter")
    ordered = sorted(points, key=lambda p: (p.expected_total, -p.p_c, p.k, p.n))
    front = []
    for p in ordered:
        if not front or p.p_c > front[-1].p_c:
            front.append(p)
    return front


@dataclass
class OptimalNReport:
    r_max: int
    checked: int = 0
    ties: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches


def exhaustive_optimal_n(r: int, k: int, model=DelayModel.MODEL2, base: SystemParams | None = None):
    """All minimizers of the expected total over ``n in [k, r]`` (within the tie tolerance)."""
    model = DelayModel.parse(model)
    if base is None:
        base = SystemParams(s=r, r=r, m=1.0, k=k, n=k, lam=1.0, w=1.0)
    values = {n: analytic.expected_total(base.with_(s=max(base.s, r), r=r, k=k, n=n), model)
              for n in range(k, r + 1)}
    best = min(values.values())
    return [n for n, v in values.items() if v - best <= analytic.TIE_RTOL * abs(best)]


def verify_optimal_n(r_max: int, model=DelayModel.MODEL2) -> OptimalNReport:
    """Compare the closed-form optimal ``n`` with exhaustive search for all ``k <= r <= r_max``."""
    model = DelayModel.parse(model)
    if model is not DelayModel.MODEL2:
        raise ParameterError("the closed-form optimal n exists for Model 2 only")
    if r_max < 1:
        raise ParameterError(f"r_max must be >= 1 (got {r_max})")
    report = OptimalNReport(r_max)
    for r in range(1, r_max + 1):
        for k in range(1, r + 1):
            closed = analytic.optimal_n_m2(r, k)
            winners = exhaustive_optimal_n(r, k, model)
            report.checked += 1
            if len(winners) > 1:
                report.ties += 1
            if closed not in winners:
                report.mismatches.append((r, k, closed, winners))
    return report
