"""Logical error rate estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Rate:
    rate: float
    stderr: float
    failures: int
    shots: int

    def __iter__(self):
        yield self.rate
        yield self.stderr


def binomial_stderr(rate: float, shots: int) -> float:
    if shots <= 0:
        return 0.0
    return math.sqrt(max(rate * (1 - rate), 0.0) / shots)


def logical_error_rate(predictions, actual) -> Rate:
    """Fraction of shots whose predicted observables differ anywhere from the actual flips."""
    pred = np.asarray(predictions, dtype=bool)
    act = np.asarray(actual, dtype=bool)
    if pred.shape != act.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {act.shape}")
    if pred.ndim == 1:
        pred, act = pred[:, None], act[:, None]
    shots = pred.shape[0]
    if shots == 0:
        return Rate(0.0, 0.0, 0, 0)
    fails = int(np.any(pred != act, axis=1).sum())
    rate = fails / shots
    return Rate(rate, binomial_stderr(rate, shots), fails, shots)
