"""Syndrome decoders and logical-error-rate statistics."""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..sim.dem import CheckMatrix, DetectorErrorModel
from .bposd import BPOSD, bposd_decode
from .brute import ExactTables, TooLargeError, brute_force_decode
from .matching import MatchingGraph, NonGraphlikeError, mwpm_decode
from .stats import Rate, binomial_stderr, logical_error_rate

DECODERS = ("mwpm", "bposd")
VARIANTS = ("parity_check", "batch")


class Decoder:
    """Uniform front end: build once from a DEM, then decode shot tables."""

    def __init__(self, dem: DetectorErrorModel, kind: str = "mwpm", variant: str = "batch",
                 osd_order: int = 0, max_iters: int = 50):
        if kind not in DECODERS:
            raise ValueError(f"unknown decoder {kind!r}; choose from {DECODERS}")
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
        self.kind = kind
        self.variant = variant
        self.num_detectors = dem.num_detectors
        self.num_observables = dem.num_observables
        if kind == "mwpm":
            self._impl = MatchingGraph.from_dem(dem)
        else:
            self.check_matrix = dem.check_matrix()
            self._impl = BPOSD(self.check_matrix, max_iters=max_iters, osd_order=osd_order)

    def decode_batch(self, events: np.ndarray) -> np.ndarray:
        events = np.asarray(events, dtype=bool)
        events = events.reshape(events.shape[0] if events.ndim == 2 else -1, self.num_detectors)
        if self.num_detectors == 0:
            return np.zeros((events.shape[0], self.num_observables), dtype=bool)
        if self.kind == "mwpm":
            return self._impl.decode_batch(events)
        return bposd_decode(self.check_matrix, events, variant=self.variant, decoder=self._impl)


__all__ = [
    "BPOSD",
    "CheckMatrix",
    "DECODERS",
    "Decoder",
    "ExactTables",
    "MatchingGraph",
    "NonGraphlikeError",
    "Rate",
    "TooLargeError",
    "VARIANTS",
    "binomial_stderr",
    "bposd_decode",
    "brute_force_decode",
    "logical_error_rate",
    "mwpm_decode",
]
