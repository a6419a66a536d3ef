"""Batched Pauli-frame sampler.

A frame is the Pauli difference between a noisy shot and the noiseless
reference.  Each qubit carries an X bit and a Z bit per shot, packed 64
shots to a uint64 word, and gates act on frames by conjugation (signs are
irrelevant).  A Z-basis measurement flips exactly when the frame has an X
component there.  Detector and observable values are reported as flips
relative to the reference, which is zero when nothing went wrong.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .. import gates
from ..circuit import Circuit
from . import bits
from .rng import uniforms
from .tableau import reference_sample

DEFAULT_BATCH = 1 << 14


def thread_count() -> int:
    """Worker threads, capped by ``QECFORGE_THREADS`` when set."""
    env = os.environ.get("QECFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


_LETTER_X = {"I": 0, "X": 1, "Y": 1, "Z": 0}
_LETTER_Z = {"I": 0, "X": 0, "Y": 1, "Z": 1}


@dataclass(frozen=True)
class _Step:
    kind: str  # "h", "s", "cx", "noise", "m", "mr", "r", "det", "obs"
    a: np.ndarray
    b: Optional[np.ndarray] = None
    # noise: cumulative thresholds and per-position lookup tables
    cum: Optional[np.ndarray] = None
    lut_x: Optional[np.ndarray] = None
    lut_z: Optional[np.ndarray] = None
    stream: int = 0
    index: int = 0


def _distinct(*arrs) -> bool:
    allq = np.concatenate(arrs)
    return len(np.unique(allq)) == len(allq)


class FrameProgram:
    """A circuit pre-lowered to vectorised frame steps."""

    def __init__(self, circuit: Circuit, check_determinism: bool = True):
        self.circuit = circuit
        self.num_qubits = circuit.num_qubits
        self.num_measurements = circuit.num_measurements
        self.num_detectors = circuit.num_detectors
        self.num_observables = circuit.num_observables
        if check_determinism:
            reference_sample(circuit, check=True)
        self.steps: List[_Step] = []
        dets, obs = circuit.detector_records()
        self.det_records = dets
        self.obs_records = [obs.get(k, []) for k in range(circuit.num_observables)]
        for pos, ins in enumerate(circuit):
            self._lower(pos, ins)

    def _gate_steps(self, ins) -> None:
        groups = ins.groups()
        prims = gates.decompose(ins.name, ins.params)
        if not prims:
            return
        cols = np.array(groups, dtype=np.int64).reshape(len(groups), -1)
        vector_ok = _distinct(cols.ravel())
        batches = [cols] if vector_ok else [cols[i:i + 1] for i in range(len(cols))]
        for cols_b in batches:
            for prim, local in prims:
                if prim == "H":
                    self.steps.append(_Step("h", cols_b[:, local[0]]))
                elif prim == "S":
                    self.steps.append(_Step("s", cols_b[:, local[0]]))
                else:
                    self.steps.append(_Step("cx", cols_b[:, local[0]], cols_b[:, local[1]]))

    def _lower(self, pos: int, ins) -> None:
        kind = ins.kind
        if kind == "gate":
            self._gate_steps(ins)
        elif kind == "noise":
            comps = gates.noise_components(ins.name, ins.params)
            comps = [(p, q) for p, q in comps if q > 0]
            if not comps:
                return
            k = gates.arity(ins.name)
            cum = np.cumsum([q for _, q in comps])
            lut_x = np.zeros((k, len(comps) + 1), dtype=bool)
            lut_z = np.zeros((k, len(comps) + 1), dtype=bool)
            for j, (pauli, _) in enumerate(comps):
                for i, letter in enumerate(pauli):
                    lut_x[i, j] = _LETTER_X[letter]
                    lut_z[i, j] = _LETTER_Z[letter]
            cols = np.array(ins.groups(), dtype=np.int64).reshape(-1, k)
            self.steps.append(_Step("noise", cols, cum=cum, lut_x=lut_x, lut_z=lut_z, stream=pos))
        elif kind == "measure":
            step = "mr" if ins.name == "MR" else "m"
            self.steps.append(_Step(step, np.array(ins.targets, dtype=np.int64), stream=pos))
        elif kind == "reset":
            self.steps.append(_Step("r", np.array(ins.targets, dtype=np.int64), stream=pos))

    # -- execution -----------------------------------------------------------

    def run_batch(self, seed: int, shot_start: int, shots: int, randomize_gauge: bool = True):
        """Simulate one batch; returns packed (records, detectors, observables)."""
        W = bits.num_words(shots)
        n = self.num_qubits
        x = np.zeros((n, W), dtype=np.uint64)
        z = np.zeros((n, W), dtype=np.uint64)
        rec = np.zeros((self.num_measurements, W), dtype=np.uint64)
        m = 0
        for st in self.steps:
            k = st.kind
            if k == "h":
                a = st.a
                tmp = x[a].copy()
                x[a] = z[a]
                z[a] = tmp
            elif k == "s":
                z[st.a] ^= x[st.a]
            elif k == "cx":
                x[st.b] ^= x[st.a]
                z[st.a] ^= z[st.b]
            elif k == "noise":
                cols = st.a
                u = uniforms(seed, st.stream, shot_start, shots, len(cols))
                idx = np.empty(u.shape, dtype=np.int64)
                idx[...] = np.searchsorted(st.cum, u, side="right")
                for i in range(cols.shape[1]):
                    fx = bits.pack(st.lut_x[i][idx].T)
                    fz = bits.pack(st.lut_z[i][idx].T)
                    q = cols[:, i]
                    if _distinct(q):
                        x[q] ^= fx
                        z[q] ^= fz
                    else:
                        np.bitwise_xor.at(x, q, fx)
                        np.bitwise_xor.at(z, q, fz)
            elif k in ("m", "mr"):
                q = st.a
                cnt = len(q)
                for j, qq in enumerate(q):
                    rec[m + j] = x[qq]
                    if k == "mr":
                        x[qq] = 0
                m += cnt
                if randomize_gauge:
                    z[q] ^= _gauge_bits(seed, st.stream, shot_start, shots, cnt)
            elif k == "r":
                q = st.a
                x[q] = 0
                if randomize_gauge:
                    z[q] = _gauge_bits(seed, st.stream, shot_start, shots, len(q))
                else:
                    z[q] = 0
        det = np.zeros((self.num_detectors, W), dtype=np.uint64)
        for i, recs in enumerate(self.det_records):
            if recs:
                det[i] = np.bitwise_xor.reduce(rec[recs], axis=0)
        obs = np.zeros((self.num_observables, W), dtype=np.uint64)
        for i, recs in enumerate(self.obs_records):
            if recs:
                obs[i] = np.bitwise_xor.reduce(rec[recs], axis=0)
        return rec, det, obs


def _gauge_bits(seed: int, stream: int, shot_start: int, shots: int, count: int) -> np.ndarray:
    u = uniforms(seed, stream ^ (1 << 40), shot_start, shots, count)
    return bits.pack((u < 0.5).T)


def frame_sample(circuit: Circuit, shots: int, seed: int = 0, batch_size: int = DEFAULT_BATCH,
                 threads: Optional[int] = None, return_measurements: bool = False,
                 program: Optional[FrameProgram] = None):
    """Sample detector and observable flips with the Pauli-frame method.

    Parameters
    ----------
    circuit : Circuit
        Noisy circuit whose noiseless detectors are deterministic.
    shots : int
    seed : int
        Results depend only on ``seed``, never on ``batch_size`` or ``threads``.
    batch_size : int
        Shots per packed batch.

    Returns
    -------
    detectors, observables : numpy.ndarray
        Bool tables of shape ``(shots, num_detectors)`` and
        ``(shots, num_observables)``.  With ``return_measurements`` the
        measurement flips are returned as a third table.
    """
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    prog = program or FrameProgram(circuit)
    batch_size = max(1, int(batch_size))
    starts = list(range(0, shots, batch_size))

    def job(start: int):
        b = min(batch_size, shots - start)
        rec, det, obs = prog.run_batch(seed, start, b)
        out = (bits.unpack(det, b).T, bits.unpack(obs, b).T)
        if return_measurements:
            out += (bits.unpack(rec, b).T,)
        return out

    nthreads = threads if threads is not None else thread_count()
    if nthreads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            parts = list(ex.map(job, starts))
    else:
        parts = [job(s) for s in starts]
    widths = [prog.num_detectors, prog.num_observables] + ([prog.num_measurements] if return_measurements else [])
    if not parts:
        return tuple(np.zeros((0, w), dtype=bool) for w in widths)
    return tuple(np.concatenate([p[i] for p in parts], axis=0) for i in range(len(widths)))
