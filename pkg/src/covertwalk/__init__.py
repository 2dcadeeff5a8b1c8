"""Covert mobile message passing over random walks on a complete graph.

Closed-form covertness and delay expectations (:mod:`covertwalk.analytic`),
a seeded Monte Carlo simulator (:mod:`covertwalk.simcore`), a k-of-n erasure
codec (:mod:`covertwalk.codec`) and tradeoff exploration
(:mod:`covertwalk.optimizer`).
"""
from .analytic import (
    covertness_probability,
    detection_probability,
    expected_chunk_time_m1,
    expected_collection,
    expected_dissemination,
    expected_total,
    harmonic,
    optimal_n_m2,
)
from .params import DelayModel, ParameterError, SystemParams, WalkModel
from .rng import Stream
from .simcore import MonteCarloSummary, TrialOutcome, run_monte_carlo, run_trial

__version__ = "0.1.0"

__all__ = [
    "DelayModel",
    "MonteCarloSummary",
    "ParameterError",
    "Stream",
    "SystemParams",
    "TrialOutcome",
    "WalkModel",
    "covertness_probability",
    "detection_probability",
    "expected_chunk_time_m1",
    "expected_collection",
    "expected_dissemination",
    "expected_total",
    "harmonic",
    "optimal_n_m2",
    "run_monte_carlo",
    "run_trial",
]
