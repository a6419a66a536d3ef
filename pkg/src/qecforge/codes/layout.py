"""Code layouts and the generic CSS memory-circuit builder."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..circuit import Circuit, CircuitBuilder

Coord = Tuple[float, ...]


@dataclass(frozen=True)
class Check:
    """One measured Pauli operator with its own ancilla.

    A check with a ``flag`` qubit couples it to the ancilla after the first
    and before the last data CX, so an ancilla fault that would spread to
    several data qubits also flips the flag.
    """

    type: str  # "X" or "Z"
    support: Tuple[int, ...]
    ancilla: int
    coords: Coord = ()
    flag: Optional[int] = None


@dataclass
class CodeLayout:
    """Qubits, measured checks and logical operators of a CSS code.

    ``stabilizers`` lists, for every stabilizer generator, its type and the
    checks whose product it is (a single check for most codes, several
    gauge checks for Bacon-Shor).  ``schedule`` is a list of phases; each
    phase is a list of CX layers given as ``(check index, data qubit)``
    pairs.  All checks of a phase are reset together before its first layer
    and measured together after its last one.
    """

    name: str
    num_data: int
    data_coords: List[Coord]
    checks: List[Check]
    stabilizers: List[Tuple[str, Tuple[int, ...]]]
    logical_z: List[Tuple[int, ...]]
    schedule: List[List[List[Tuple[int, int]]]]
    logical_x: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def data_qubits(self) -> List[int]:
        return list(range(self.num_data))

    @property
    def ancilla_qubits(self) -> List[int]:
        return [c.ancilla for c in self.checks]

    @property
    def flag_qubits(self) -> List[int]:
        return [c.flag for c in self.checks if c.flag is not None]

    @property
    def num_qubits(self) -> int:
        return self.num_data + len(self.checks) + len(self.flag_qubits)

    def stabilizer_supports(self) -> List[Tuple[str, frozenset]]:
        out = []
        for typ, idx in self.stabilizers:
            sup: set = set()
            for i in idx:
                sup ^= set(self.checks[i].support)
            out.append((typ, frozenset(sup)))
        return out

    def coords(self) -> Dict[int, Coord]:
        out = {q: c for q, c in enumerate(self.data_coords)}
        for ch in self.checks:
            out[ch.ancilla] = ch.coords
            if ch.flag is not None:
                out[ch.flag] = (ch.coords[0] + 0.5,) + tuple(ch.coords[1:])
        return out


def default_schedule(checks: Sequence[Check]) -> List[List[List[Tuple[int, int]]]]:
    """All Z checks, then all X checks, each greedily packed into layers.

    Layer ``t`` of a check type uses the ``t``-th support qubit of every
    check; collisions are pushed to later layers.
    """
    layers: List[List[Tuple[int, int]]] = []
    for typ in ("Z", "X"):
        block: List[List[Tuple[int, int]]] = []
        busy: List[set] = []
        for ci, ch in enumerate(checks):
            if ch.type != typ:
                continue
            t = 0
            for q in ch.support:
                while t < len(block) and (q in busy[t] or ch.ancilla in busy[t]):
                    t += 1
                if t == len(block):
                    block.append([])
                    busy.append(set())
                block[t].append((ci, q))
                busy[t].update((q, ch.ancilla))
                t += 1
        layers.extend(block)
    return [layers]


def memory_circuit(layout: CodeLayout, rounds: int) -> Circuit:
    """Z-basis memory experiment for ``layout``.

    Data qubits start in |0>.  Every round measures each phase's checks
    with one ancilla each, plus a flag qubit where the check has one.  Z-type stabilizers get detectors from the first
    round on (the initial state fixes them); X-type ones from the second
    round, comparing with the previous round; every flag gets its own
    detector each round.  The final data measurement
    closes the Z-type detectors, and one observable is declared per
    logical qubit.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    b = CircuitBuilder()
    nd = layout.num_data
    checks = layout.checks
    b.append("R", list(range(nd)))
    prev: Dict[int, List[int]] = {}
    coords_of = {i: c.coords for i, c in enumerate(checks)}
    for r in range(rounds):
        rec: Dict[int, int] = {}
        flag_rec: Dict[int, int] = {}
        for phase in layout.schedule:
            in_phase = sorted({ci for layer in phase for ci, _ in layer})
            if not in_phase:
                continue
            anc = [checks[ci].ancilla for ci in in_phase]
            xs = [checks[ci].ancilla for ci in in_phase if checks[ci].type == "X"]
            # moments as {name: targets}: reset, H, then (data CX, flag CX) per layer, H, measure
            moments: List[Dict[str, List[int]]] = [{"R": list(anc)}, {"H": list(xs)}]
            for layer in phase:
                pairs: List[int] = []
                for ci, q in layer:
                    ch = checks[ci]
                    pairs += [q, ch.ancilla] if ch.type == "Z" else [ch.ancilla, q]
                moments += [{"CX": pairs}, {}]
            moments += [{"H": list(xs)}, {"M": list(anc)}]
            for ci in in_phase:
                ch = checks[ci]
                if ch.flag is None:
                    continue
                span = [t for t, layer in enumerate(phase) if any(c == ci for c, _ in layer)]
                if span[-1] - span[0] < 2:
                    raise ValueError(f"check {ci} is too short to carry a flag")
                # flag lives only between its couplings: after the first and before the last data CX
                opened, closed = 3 + 2 * span[0], 1 + 2 * span[-1]
                pair = [ch.flag, ch.ancilla] if ch.type == "Z" else [ch.ancilla, ch.flag]
                for m in (opened, closed):
                    moments[m].setdefault("CX", []).extend(pair)
                # Z-check flags are prepared and read out in the X basis
                prep = ([("R", opened - 2), ("H", opened - 1)] if ch.type == "Z" else [("R", opened - 1)])
                read = ([("H", closed + 1), ("M", closed + 2)] if ch.type == "Z" else [("M", closed + 1)])
                for name, m in prep + read:
                    moments[m].setdefault(name, []).append(ch.flag)
            owner = {}
            for ci in in_phase:
                owner[checks[ci].ancilla] = (ci, False)
                if checks[ci].flag is not None:
                    owner[checks[ci].flag] = (ci, True)
            for mom in moments:
                if not any(mom.values()):
                    continue
                for name in ("R", "H", "CX", "M"):
                    if not mom.get(name):
                        continue
                    if name == "M":
                        for q, k in zip(mom[name], b.measure("M", mom[name])):
                            ci, is_flag = owner[q]
                            (flag_rec if is_flag else rec)[ci] = k
                    else:
                        b.append(name, mom[name])
                b.tick()
        for si, (typ, idx) in enumerate(layout.stabilizers):
            now = [rec[ci] for ci in idx]
            c0 = coords_of[idx[0]]
            if r == 0:
                if typ == "Z":
                    b.detector(now, tuple(c0) + (r,))
            else:
                b.detector(now + prev[si], tuple(c0) + (r,))
            prev[si] = now
        for ci in sorted(flag_rec):
            c0 = coords_of[ci]
            b.detector([flag_rec[ci]], (c0[0] + 0.5,) + tuple(c0[1:]) + (r,))
    data_rec = b.measure("M", list(range(nd)))
    for si, (typ, idx) in enumerate(layout.stabilizers):
        if typ != "Z":
            continue
        sup: set = set()
        for ci in idx:
            sup ^= set(checks[ci].support)
        c0 = coords_of[idx[0]]
        b.detector(prev[si] + [data_rec[q] for q in sorted(sup)], tuple(c0) + (rounds,))
    for k, lz in enumerate(layout.logical_z):
        b.observable(k, [data_rec[q] for q in lz])
    return b.build(layout.num_qubits)
