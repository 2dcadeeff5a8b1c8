"""Monte Carlo simulation of covert dissemination and collection.

Alice walks the complete graph depositing one chunk on each of the first
``n`` distinct relays she meets; Bob then walks until he has harvested ``k``
chunk-holding relays. Every real chunk transmission is watched by a fresh
``U(0, w)`` warden arrival and is detected when the arrival falls inside the
transmission.

Timing per visited vertex:

* Model 1: 1 unit, plus the sampled ``ell + Exp(lam)`` transmission when a
  chunk changes hands.
* Model 2: a flat ``1 + ell + 1/lam`` at every vertex. The transmission is
  still sampled, but only to decide detection.

The functions taking a :class:`~covertwalk.rng.Stream` are the scalar
reference implementation (used for transcripts and the codec demo). Bulk runs
go through :mod:`covertwalk.kernels`, which replays exactly the same draws.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .kernels import EMPTY, HARVESTED, HOLDING, RELAY, simulate_trials
from .params import DelayModel, ParameterError, SystemParams, WalkModel
from .rng import Stream


def sample_transmission_time(rng: Stream, ell: float, lam: float, size=None):
    """Shifted exponential ``ell + Exp(lam)``."""
    u = rng.random(size)
    if size is None:
        return ell - math.log1p(-u) / lam
    return ell - np.log1p(-u) / lam


def sample_warden_arrival(rng: Stream, w: float, size=None):
    """Uniform warden arrival on ``[0, w)``."""
    return rng.random(size) * w


class PhaseResult(NamedTuple):
    time: float
    steps: int
    detections: int


@dataclass
class RelayField:
    """Vertex states for one trial plus the chunk stored on each relay."""

    s: int
    status: list
    chunk_at: dict = field(default_factory=dict)
    payloads: dict = field(default_factory=dict)
    placement: list = field(default_factory=list)

    @classmethod
    def place(cls, rng: Stream, s: int, r: int):
        perm = list(range(s))
        for i in range(r):
            j = i + int(rng.random() * (s - i))
            perm[i], perm[j] = perm[j], perm[i]
        status = [EMPTY] * s
        for v in perm[:r]:
            status[v] = RELAY
        return cls(s, status, placement=perm[:r])

    @property
    def relays(self):
        return sorted(v for v, st in enumerate(self.status) if st != EMPTY)

    @property
    def holders(self):
        return sorted(v for v, st in enumerate(self.status) if st == HOLDING)


def _walk(rng, params, model, walk, field_, want, mark, goal, on_hit, log, phase, offset):
    s = params.s
    ell, lam, w = params.chunk_length, params.lam, params.w
    budget = 1.0 / lam + ell + 1.0
    time = 0.0
    steps = got = det = 0
    cur = -1
    while got < goal:
        u = rng.random()
        if cur < 0 or walk is WalkModel.IID or s == 1:
            cur = int(u * s)
        else:
            v = int(u * (s - 1))
            cur = v + 1 if v >= cur else v
        steps += 1
        if model is DelayModel.MODEL1:
            time += 1.0
        clock = time if model is DelayModel.MODEL1 else steps * budget
        if log is not None:
            log.append((f"{phase}_visit", offset + clock, cur, None))
        if field_.status[cur] == want:
            field_.status[cur] = mark
            chunk = on_hit(cur, got)
            got += 1
            t = sample_transmission_time(rng, ell, lam)
            a = sample_warden_arrival(rng, w)
            if model is DelayModel.MODEL1:
                time += t
            caught = a <= t
            det += caught
            if log is not None:
                clock = time if model is DelayModel.MODEL1 else steps * budget
                log.append(("deposit" if phase == "alice" else "retrieve", offset + clock, cur, chunk))
                if caught:
                    log.append(("detected", offset + clock, cur, chunk))
    if model is DelayModel.MODEL2:
        time = steps * budget
    return PhaseResult(time, steps, int(det))


def simulate_dissemination(rng: Stream, params: SystemParams, model=DelayModel.MODEL1, walk=WalkModel.IID,
                           relays: RelayField | None = None, payloads=None, log=None, offset=0.0) -> PhaseResult:
    """Alice's walk until ``n`` distinct relays each hold one chunk.

    ``relays`` is mutated in place; when omitted, relays are placed from
    ``rng`` first. ``payloads`` (indexable by chunk number) are stored on the
    relays. ``log`` collects ``(event, time, vertex, chunk)`` tuples.
    """
    model, walk = DelayModel.parse(model), WalkModel.parse(walk)
    field_ = relays if relays is not None else RelayField.place(rng, params.s, params.r)

    def deposit(vertex, i):
        field_.chunk_at[vertex] = i
        if payloads is not None:
            field_.payloads[vertex] = payloads[i]
        return i

    return _walk(rng, params, model, walk, field_, RELAY, HOLDING, params.n, deposit, log, "alice", offset)


def simulate_collection(rng: Stream, params: SystemParams, model=DelayModel.MODEL1, walk=WalkModel.IID,
                        relays: RelayField | None = None, collected=None, log=None, offset=0.0,
                        k: int | None = None) -> PhaseResult:
    """Bob's walk until ``k`` chunk-holding relays are harvested.

    ``collected``, if given, is a list receiving ``(chunk_index, payload)``.
    Without ``relays`` a fresh field is placed with the first ``n`` placed
    relays holding chunks. ``k=0`` returns an empty phase.
    """
    model, walk = DelayModel.parse(model), WalkModel.parse(walk)
    goal = params.k if k is None else k
    if goal == 0:
        return PhaseResult(0.0, 0, 0)
    field_ = relays
    if field_ is None:
        field_ = RelayField.place(rng, params.s, params.r)
        for i, v in enumerate(field_.placement[: params.n]):
            field_.status[v] = HOLDING
            field_.chunk_at[v] = i
    if sum(st == HOLDING for st in field_.status) < goal:
        raise ParameterError("fewer chunk-holding relays than chunks to collect")

    def harvest(vertex, _):
        chunk = field_.chunk_at.get(vertex)
        if collected is not None:
            collected.append((chunk, field_.payloads.get(vertex)))
        return chunk

    return _walk(rng, params, model, walk, field_, HOLDING, HARVESTED, goal, harvest, log, "bob", offset)


@dataclass(frozen=True)
class TrialOutcome:
    dissemination_time: float
    collection_time: float
    total_time: float
    dissemination_steps: int
    collection_steps: int
    transmissions: int
    detections: int
    detected: bool


def run_trial(rng: Stream, params: SystemParams, model=DelayModel.MODEL1, walk=WalkModel.IID,
              payloads=None, collected=None, log=None) -> TrialOutcome:
    """One end-to-end transfer; Bob starts after Alice's last deposit."""
    field_ = RelayField.place(rng, params.s, params.r)
    dis = simulate_dissemination(rng, params, model, walk, field_, payloads=payloads, log=log)
    col = simulate_collection(rng, params, model, walk, field_, collected=collected, log=log, offset=dis.time)
    det = dis.detections + col.detections
    return TrialOutcome(
        dissemination_time=dis.time,
        collection_time=col.time,
        total_time=dis.time + col.time,
        dissemination_steps=dis.steps,
        collection_steps=col.steps,
        transmissions=params.n + params.k,
        detections=det,
        detected=det >= 1,
    )


def trial_events(seed, index, params, model=DelayModel.MODEL1, walk=WalkModel.IID):
    """Transcript records for trial ``index``, one dict per event."""
    log = []
    run_trial(Stream(seed, index), params, model, walk, log=log)
    return [
        {"trial_index": index, "event_type": ev, "time": t, "vertex": v, "chunk_index": c}
        for ev, t, v, c in log
    ]


def write_transcript(fh, seed, indices, params, model=DelayModel.MODEL1, walk=WalkModel.IID):
    """Write line-delimited JSON events for the given trials."""
    for i in indices:
        for rec in trial_events(seed, i, params, model, walk):
            fh.write(json.dumps(rec) + "\n")


def _se(x):
    if len(x) < 2:
        return 0.0
    return float(np.std(x, ddof=1) / math.sqrt(len(x)))


@dataclass(frozen=True)
class MonteCarloSummary:
    trials: int
    seed: int
    model: int
    walk: str
    mean_dissemination: float
    se_dissemination: float
    mean_collection: float
    se_collection: float
    mean_total: float
    se_total: float
    mean_dissemination_steps: float
    mean_collection_steps: float
    covertness: float
    covertness_se: float
    covertness_halfwidth: float
    transmissions: int
    detections: int
    detection_rate: float
    detection_rate_se: float

    def as_dict(self):
        return asdict(self)


def summarize(arrays, params: SystemParams, model, walk, seed) -> MonteCarloSummary:
    n_trials = len(arrays)
    total = arrays.total_time
    covert = float(np.mean(arrays.detections == 0))
    covert_se = math.sqrt(covert * (1.0 - covert) / n_trials)
    transmissions = n_trials * (params.n + params.k)
    detections = int(arrays.detections.sum())
    rate = detections / transmissions
    return MonteCarloSummary(
        trials=n_trials,
        seed=seed,
        model=int(model),
        walk=WalkModel.parse(walk).value,
        mean_dissemination=float(np.mean(arrays.dissemination_time)),
        se_dissemination=_se(arrays.dissemination_time),
        mean_collection=float(np.mean(arrays.collection_time)),
        se_collection=_se(arrays.collection_time),
        mean_total=float(np.mean(total)),
        se_total=_se(total),
        mean_dissemination_steps=float(np.mean(arrays.dissemination_steps)),
        mean_collection_steps=float(np.mean(arrays.collection_steps)),
        covertness=covert,
        covertness_se=covert_se,
        covertness_halfwidth=1.96 * covert_se,
        transmissions=transmissions,
        detections=detections,
        detection_rate=rate,
        detection_rate_se=math.sqrt(rate * (1.0 - rate) / transmissions),
    )


def run_monte_carlo(params: SystemParams, model=DelayModel.MODEL1, walk=WalkModel.IID, trials=100_000,
                    seed=0, backend=None, threads=None, transcript=None) -> MonteCarloSummary:
    """Run ``trials`` independent transfers and aggregate them.

    Trial ``i`` draws from stream ``(seed, i)``, so the summary is identical
    for any thread count. ``transcript`` (a text file object) receives the
    event log of every trial; keep ``trials`` small when using it.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1 (got {trials})")
    model, walk = DelayModel.parse(model), WalkModel.parse(walk)
    arrays = simulate_trials(params, model, walk, trials, seed, backend=backend, threads=threads)
    if transcript is not None:
        write_transcript(transcript, seed, range(trials), params, model, walk)
    return summarize(arrays, params, model, walk, seed)
