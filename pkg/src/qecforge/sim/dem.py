"""Detector error models.

A detector error model (DEM) lists independent error mechanisms, each a
probability together with the detectors and observables it flips.  The
compiler walks the circuit backwards once, keeping for every qubit the set
of detectors an X or a Z error at the current point would flip, so each
Pauli component of each noise channel costs one lookup.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .. import gates
from ..circuit import Circuit
from .tableau import reference_sample


class DemError(ValueError):
    """The circuit cannot be turned into a detector error model."""


Symptom = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class ErrorMechanism:
    """One independent error.

    ``parts`` optionally suggests a split of the symptom into pieces (the X
    and Z components of the underlying Pauli) for matching decoders; it does
    not take part in equality.
    """

    p: float
    detectors: Tuple[int, ...]
    observables: Tuple[int, ...] = ()
    parts: Tuple[Symptom, ...] = field(default=(), compare=False)

    @property
    def symptom(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return self.detectors, self.observables


def merge_probability(p1: float, p2: float) -> float:
    """Probability that exactly one of two independent events happens."""
    return p1 * (1 - p2) + p2 * (1 - p1)


@dataclass(frozen=True)
class CheckMatrix:
    """Column-aligned parity-check view of a DEM.

    Attributes
    ----------
    H : numpy.ndarray
        ``(num_detectors, num_mechanisms)`` uint8 detector incidence.
    L : numpy.ndarray
        ``(num_observables, num_mechanisms)`` uint8 observable incidence.
    priors : numpy.ndarray
        Per-mechanism probability.
    """

    H: np.ndarray
    L: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.uint8) % 2
        L = np.asarray(self.L, dtype=np.uint8).reshape(-1, H.shape[1]) % 2
        priors = np.asarray(self.priors, dtype=float)
        if priors.shape != (H.shape[1],):
            raise ValueError("priors must have one entry per column of H")
        if H.shape[1] and not H.any(axis=0).all():
            raise ValueError("every column of H must be nonzero")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "priors", priors)

    @property
    def num_detectors(self) -> int:
        return self.H.shape[0]

    @property
    def num_mechanisms(self) -> int:
        return self.H.shape[1]

    @property
    def num_observables(self) -> int:
        return self.L.shape[0]


class DetectorErrorModel:
    """Independent error mechanisms with unique symptoms."""

    def __init__(self, mechanisms: Iterable[ErrorMechanism], num_detectors: Optional[int] = None,
                 num_observables: Optional[int] = None):
        mechs = list(mechanisms)
        seen = set()
        for m in mechs:
            if m.symptom in seen:
                raise ValueError(f"duplicate symptom {m.symptom}")
            seen.add(m.symptom)
        nd = max((max(m.detectors) + 1 for m in mechs if m.detectors), default=0)
        no = max((max(m.observables) + 1 for m in mechs if m.observables), default=0)
        self.mechanisms: Tuple[ErrorMechanism, ...] = tuple(mechs)
        self.num_detectors = max(nd, num_detectors or 0)
        self.num_observables = max(no, num_observables or 0)

    def __len__(self) -> int:
        return len(self.mechanisms)

    def __iter__(self):
        return iter(self.mechanisms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DetectorErrorModel):
            return NotImplemented
        return (self.mechanisms == other.mechanisms and self.num_detectors == other.num_detectors
                and self.num_observables == other.num_observables)

    def __repr__(self) -> str:
        return (f"DetectorErrorModel(mechanisms={len(self)}, detectors={self.num_detectors}, "
                f"observables={self.num_observables})")

    def is_graphlike(self) -> bool:
        return all(len(m.detectors) <= 2 for m in self.mechanisms)

    def check_matrix(self) -> CheckMatrix:
        mechs = [m for m in self.mechanisms if m.detectors]
        H = np.zeros((self.num_detectors, len(mechs)), dtype=np.uint8)
        L = np.zeros((self.num_observables, len(mechs)), dtype=np.uint8)
        for j, m in enumerate(mechs):
            H[list(m.detectors), j] = 1
            L[list(m.observables), j] = 1
        return CheckMatrix(H, L, np.array([m.p for m in mechs], dtype=float))

    def detector_marginals(self) -> np.ndarray:
        """Exact firing probability of each detector."""
        prod = np.ones(self.num_detectors)
        for m in self.mechanisms:
            prod[list(m.detectors)] *= 1 - 2 * m.p
        return (1 - prod) / 2

    def sample(self, shots: int, seed: int = 0):
        """Sample ``(detectors, observables, errors)`` bool tables from the model."""
        rng = np.random.default_rng(seed)
        n = len(self.mechanisms)
        p = np.array([m.p for m in self.mechanisms], dtype=float)
        err = rng.random((shots, n)) < p
        H = sp.lil_matrix((n, self.num_detectors), dtype=np.int32)
        L = sp.lil_matrix((n, self.num_observables), dtype=np.int32)
        for j, m in enumerate(self.mechanisms):
            for d in m.detectors:
                H[j, d] = 1
            for o in m.observables:
                L[j, o] = 1
        E = sp.csr_matrix(err.astype(np.int32))
        dets = (E @ H.tocsr()).toarray() % 2
        obs = (E @ L.tocsr()).toarray() % 2
        return dets.astype(bool), obs.astype(bool), err

    # -- text format ---------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        mentioned_d = set()
        mentioned_o = set()
        for m in self.mechanisms:
            pieces = m.parts or ((m.detectors, m.observables),)
            terms = " ^ ".join(" ".join([f"D{d}" for d in ds] + [f"L{o}" for o in os_]) for ds, os_ in pieces)
            mentioned_d.update(m.detectors)
            mentioned_o.update(m.observables)
            lines.append(f"error({m.p!r}) " + terms)
        if self.num_detectors and (self.num_detectors - 1) not in mentioned_d:
            lines.append(f"detector D{self.num_detectors - 1}")
        if self.num_observables and (self.num_observables - 1) not in mentioned_o:
            lines.append(f"logical_observable L{self.num_observables - 1}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "DetectorErrorModel":
        mechs: Dict[Tuple, float] = {}
        parts: Dict[Tuple, Tuple[Symptom, ...]] = {}
        nd = no = 0
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.match(r"^error\(([^)]*)\)(.*)$", line)
            if m:
                try:
                    p = float(m.group(1))
                except ValueError:
                    raise DemError(f"line {lineno}: bad probability {m.group(1)!r}") from None
                ds, os_ = set(), set()
                pieces = []
                for chunk in m.group(2).split("^"):
                    pd, po = set(), set()
                    for tok in chunk.split():
                        if re.fullmatch(r"D\d+", tok):
                            pd ^= {int(tok[1:])}
                        elif re.fullmatch(r"L\d+", tok):
                            po ^= {int(tok[1:])}
                        else:
                            raise DemError(f"line {lineno}: bad target {tok!r}")
                    ds ^= pd
                    os_ ^= po
                    pieces.append((tuple(sorted(pd)), tuple(sorted(po))))
                key = (tuple(sorted(ds)), tuple(sorted(os_)))
                mechs[key] = merge_probability(mechs.get(key, 0.0), p)
                if len(pieces) > 1:
                    parts.setdefault(key, tuple(pieces))
                continue
            m = re.match(r"^detector\s+D(\d+)$", line)
            if m:
                nd = max(nd, int(m.group(1)) + 1)
                continue
            m = re.match(r"^logical_observable\s+L(\d+)$", line)
            if m:
                no = max(no, int(m.group(1)) + 1)
                continue
            raise DemError(f"line {lineno}: cannot parse {line!r}")
        return cls([ErrorMechanism(p, d, o, parts.get((d, o), ())) for (d, o), p in mechs.items()], nd, no)


# -- compiler -----------------------------------------------------------------

_APPROX_ONLY = frozenset(["DEPOLARIZE2", "PAULI_CHANNEL_2"])


def _bits_to_sets(mask: int, num_detectors: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    dets: List[int] = []
    obs: List[int] = []
    i = 0
    while mask:
        if mask & 1:
            if i < num_detectors:
                dets.append(i)
            else:
                obs.append(i - num_detectors)
        mask >>= 1
        i += 1
    return tuple(dets), tuple(obs)


def compile_dem(circuit: Circuit, approximate_disjoint: bool = False, check: bool = True) -> DetectorErrorModel:
    """Compile a noisy circuit into a detector error model.

    Parameters
    ----------
    circuit : Circuit
    approximate_disjoint : bool
        Two-qubit channels have exclusive outcomes; with this flag their 15
        components are treated as independent mechanisms, otherwise they are
        rejected.  Single-qubit channels are always expanded this way.
    check : bool
        Verify noiseless determinism of detectors and observables first.

    Returns
    -------
    DetectorErrorModel
        Mechanisms are merged by symptom, ones flipping nothing are
        dropped, and probabilities above 1/2 are folded to ``1 - p``.
    """
    if check:
        reference_sample(circuit, check=True)
    nd = circuit.num_detectors
    dets, obs = circuit.detector_records()
    sens = [0] * circuit.num_measurements
    for i, recs in enumerate(dets):
        for r in recs:
            sens[r] ^= 1 << i
    for k, recs in obs.items():
        for r in recs:
            sens[r] ^= 1 << (nd + k)
    n = circuit.num_qubits
    sx = [0] * n
    sz = [0] * n
    found: Dict[int, float] = {}
    split: Dict[int, Tuple[float, Tuple[int, int]]] = {}  # symptom -> (p, (x part, z part)) of largest contributor
    m = circuit.num_measurements
    for ins in reversed(circuit.instructions):
        kind = ins.kind
        if kind == "gate":
            prims = gates.decompose(ins.name, ins.params)
            for grp in reversed(ins.groups()):
                for prim, local in reversed(prims):
                    if prim == "H":
                        a = grp[local[0]]
                        sx[a], sz[a] = sz[a], sx[a]
                    elif prim == "S":
                        a = grp[local[0]]
                        sx[a] ^= sz[a]
                    else:
                        c, t = grp[local[0]], grp[local[1]]
                        sx[c] ^= sx[t]
                        sz[t] ^= sz[c]
        elif kind == "measure":
            for q in reversed(ins.targets):
                m -= 1
                if ins.name == "MR":
                    sx[q] = 0
                sx[q] ^= sens[m]
                sz[q] = 0
        elif kind == "reset":
            for q in ins.targets:
                sx[q] = 0
                sz[q] = 0
        elif kind == "noise":
            if ins.name in _APPROX_ONLY and not approximate_disjoint:
                raise DemError(f"{ins.name} has correlated outcomes; pass approximate_disjoint=True")
            comps = gates.noise_components(ins.name, ins.params)
            for grp in ins.groups():
                for pauli, p in comps:
                    if p <= 0:
                        continue
                    symx = symz = 0
                    for q, letter in zip(grp, pauli):
                        if letter in "XY":
                            symx ^= sx[q]
                        if letter in "ZY":
                            symz ^= sz[q]
                    sym = symx ^ symz
                    if sym:
                        found[sym] = merge_probability(found.get(sym, 0.0), p)
                        if symx and symz and symx != symz and (sym not in split or p > split[sym][0]):
                            split[sym] = (p, (symx, symz))
    mechs = []
    for sym, p in found.items():
        if p <= 0:
            continue
        d, o = _bits_to_sets(sym, nd)
        if p > 0.5:
            warnings.warn(f"mechanism {d}/{o} has p={p:.6g} > 1/2; folded to {1 - p:.6g}", RuntimeWarning)
            p = 1.0 - p
        pieces = tuple(_bits_to_sets(x, nd) for x in split[sym][1]) if sym in split else ()
        mechs.append(ErrorMechanism(p, d, o, pieces))
    mechs.sort(key=lambda e: (e.detectors, e.observables))
    return DetectorErrorModel(mechs, nd, circuit.num_observables)
