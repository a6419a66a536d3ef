"""SWAP-based routing onto a device graph with a logical/physical qubit tracker.

The circuit is turned into a dependency DAG: operations depend on the
previous operation on each of their qubits, and measurements and
annotations additionally form one classical chain so that record
references keep their meaning.  Executable operations are emitted as soon
as their two-qubit gates sit on a device edge; otherwise a strategy picks
SWAPs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import gates
from ..arch import Device
from ..circuit import Circuit, Instruction, layerize
from .translate import merge_moments, split_groups

ROUTINGS = ("basic", "stochastic", "sabre")

SABRE_EXTENDED_SIZE = 20
SABRE_EXTENDED_WEIGHT = 0.5
SABRE_DECAY = 0.001
SABRE_RESET = 5
STOCHASTIC_TRIALS = 32


class RoutingError(ValueError):
    pass


@dataclass
class TrackerLog:
    """Logical-to-physical mapping through a routed circuit.

    Attributes
    ----------
    initial : list of int
        ``initial[l]`` is the physical qubit holding logical ``l`` at the
        start.  Logical ids at or above ``num_logical`` stand for unused
        device qubits, so the map is a full permutation.
    swaps : list of (int, int, int)
        ``(position, p, q)``: a SWAP of physical ``p`` and ``q`` emitted as
        the ``position``-th operation of the routed stream (before
        layerizing).
    snapshots : list of list of int
        Mapping after each swap.
    """

    initial: List[int]
    num_logical: int
    num_measurements: int = 0
    swaps: List[Tuple[int, int, int]] = field(default_factory=list)
    snapshots: List[List[int]] = field(default_factory=list)

    @property
    def num_physical(self) -> int:
        return len(self.initial)

    @property
    def final(self) -> List[int]:
        return list(self.snapshots[-1]) if self.snapshots else list(self.initial)

    def replay(self) -> List[int]:
        """Final mapping recomputed from the initial layout and the swaps."""
        l2p = list(self.initial)
        p2l = {p: l for l, p in enumerate(l2p)}
        for _, p, q in self.swaps:
            lp, lq = p2l[p], p2l[q]
            l2p[lp], l2p[lq] = q, p
            p2l[p], p2l[q] = lq, lp
        return l2p

    def logical_at(self, physical: int, after_swap: Optional[int] = None) -> int:
        m = self.final if after_swap is None else (self.snapshots[after_swap] if after_swap >= 0 else self.initial)
        return list(m).index(physical)


@dataclass(frozen=True)
class SwapMetrics:
    swaps_inserted: int
    original_2q: int

    @property
    def extra_2q(self) -> int:
        return 3 * self.swaps_inserted

    @property
    def pct(self) -> float:
        return 100.0 * self.extra_2q / self.original_2q if self.original_2q else 0.0

    def as_dict(self) -> dict:
        return {"swaps_inserted": self.swaps_inserted, "extra_2q": self.extra_2q,
                "original_2q": self.original_2q, "pct": self.pct}


def full_layout(partial: Sequence[int], num_physical: int) -> List[int]:
    """Extend an injective logical-to-physical map to a permutation."""
    used = set(partial)
    if len(used) != len(partial):
        raise RoutingError("layout is not injective")
    if any(not 0 <= p < num_physical for p in partial):
        raise RoutingError("layout maps outside the device")
    rest = [p for p in range(num_physical) if p not in used]
    return list(partial) + rest


class _Dag:
    def __init__(self, ops: Sequence[Instruction]):
        n = len(ops)
        self.ops = list(ops)
        self.succ: List[List[int]] = [[] for _ in range(n)]
        self.npred = np.zeros(n, dtype=np.int64)
        last_q: Dict[int, int] = {}
        last_c = -1
        for i, ins in enumerate(ops):
            preds = set()
            for q in ins.qubits:
                if q in last_q:
                    preds.add(last_q[q])
                last_q[q] = i
            if ins.is_annotation or ins.name in gates.MEASUREMENTS:
                if last_c >= 0:
                    preds.add(last_c)
                last_c = i
            for p in preds:
                self.succ[p].append(i)
            self.npred[i] = len(preds)


def _is_2q(ins: Instruction) -> bool:
    return len(ins.qubits) == 2


class _Router:
    def __init__(self, dag: _Dag, device: Device, l2p: List[int], strategy: str, seed: int):
        self.dag = dag
        self.device = device
        self.dist = device.distances()
        if not np.isfinite(self.dist).all():
            raise RoutingError("device graph is disconnected")
        self.nbrs = device.neighbors()
        self.l2p = list(l2p)
        self.p2l = [0] * len(l2p)
        for l, p in enumerate(l2p):
            self.p2l[p] = l
        self.strategy = strategy
        self.rng = np.random.default_rng(seed)
        self.out: List[Instruction] = []
        self.swaps: List[Tuple[int, int, int]] = []
        self.snapshots: List[List[int]] = []
        self.decay = np.ones(len(l2p))
        self.since_reset = 0

    # helpers
    def pdist(self, ins: Instruction) -> float:
        a, b = ins.qubits
        return self.dist[self.l2p[a], self.l2p[b]]

    def adjacent(self, ins: Instruction) -> bool:
        a, b = ins.qubits
        return self.device.has_edge(self.l2p[a], self.l2p[b])

    def swap(self, p: int, q: int) -> None:
        la, lb = self.p2l[p], self.p2l[q]
        self.l2p[la], self.l2p[lb] = q, p
        self.p2l[p], self.p2l[q] = lb, la
        self.swaps.append((len(self.out), p, q))
        self.out.append(Instruction("SWAP", (p, q)))
        self.snapshots.append(list(self.l2p))
        self.decay[p] += SABRE_DECAY
        self.decay[q] += SABRE_DECAY
        self.since_reset += 1
        if self.since_reset >= SABRE_RESET:
            self.decay[:] = 1.0
            self.since_reset = 0

    def emit(self, ins: Instruction) -> None:
        if ins.qubits:
            self.out.append(Instruction(ins.name, tuple(self.l2p[q] for q in ins.targets), ins.params))
        else:
            self.out.append(ins)

    # main loop
    def run(self) -> None:
        dag = self.dag
        npred = dag.npred.copy()
        front = [i for i in range(len(dag.ops)) if npred[i] == 0]
        stuck = 0
        while front:
            progressed = True
            while progressed:
                progressed = False
                keep = []
                ready = []
                for i in sorted(front):
                    ins = dag.ops[i]
                    if not _is_2q(ins) or self.adjacent(ins):
                        ready.append(i)
                    else:
                        keep.append(i)
                for i in ready:
                    self.emit(dag.ops[i])
                    for s in dag.succ[i]:
                        npred[s] -= 1
                        if npred[s] == 0:
                            keep.append(s)
                if ready:
                    progressed = True
                    self.decay[:] = 1.0
                    self.since_reset = 0
                    stuck = 0
                front = keep
            if not front:
                break
            blocked = sorted(front)
            stuck += 1
            if self.strategy == "basic" or stuck > 4 * len(self.l2p):
                self._basic_step(dag.ops[blocked[0]])
            elif self.strategy == "stochastic":
                self._stochastic_step([dag.ops[i] for i in blocked])
            else:
                self._sabre_step(blocked, npred)

    def _basic_step(self, ins: Instruction) -> None:
        """Walk the first qubit one hop along a shortest path toward the second."""
        a, b = (self.l2p[q] for q in ins.qubits)
        best = min(self.nbrs[a], key=lambda v: (self.dist[v, b], v))
        self.swap(a, best)

    def _candidates(self, blocked: Sequence[Instruction]) -> List[Tuple[int, int]]:
        cand = set()
        for ins in blocked:
            for q in ins.qubits:
                p = self.l2p[q]
                for v in self.nbrs[p]:
                    cand.add((min(p, v), max(p, v)))
        return sorted(cand)

    def _front_cost(self, blocked: Sequence[Instruction], l2p: List[int]) -> float:
        return float(sum(self.dist[l2p[i.qubits[0]], l2p[i.qubits[1]]] for i in blocked))

    def _stochastic_step(self, blocked: Sequence[Instruction]) -> None:
        """Best of several randomised greedy swap sequences that free a front gate."""
        best_seq = None
        limit = int(self.dist.max()) * 2 + 2
        for _ in range(STOCHASTIC_TRIALS):
            l2p = list(self.l2p)
            p2l = list(self.p2l)
            seq = []
            for _ in range(limit):
                cand = set()
                for ins in blocked:
                    for q in ins.qubits:
                        p = l2p[q]
                        for v in self.nbrs[p]:
                            cand.add((min(p, v), max(p, v)))
                cand = sorted(cand)
                noise = 1.0 + 0.5 * self.rng.random(len(cand))
                scores = []
                for (p, v), w in zip(cand, noise):
                    lp, lv = p2l[p], p2l[v]
                    l2p[lp], l2p[lv] = v, p
                    scores.append(self._front_cost(blocked, l2p) * w)
                    l2p[lp], l2p[lv] = p, v
                p, v = cand[int(np.argmin(scores))]
                lp, lv = p2l[p], p2l[v]
                l2p[lp], l2p[lv] = v, p
                p2l[p], p2l[v] = lv, lp
                seq.append((p, v))
                if any(self.device.has_edge(l2p[i.qubits[0]], l2p[i.qubits[1]]) for i in blocked):
                    break
            key = (len(seq), self._front_cost(blocked, l2p))
            if best_seq is None or key < best_seq[0]:
                best_seq = (key, seq)
        for p, v in best_seq[1]:
            self.swap(p, v)

    def _extended(self, blocked: Sequence[int], npred) -> List[Instruction]:
        """Upcoming two-qubit gates behind the front layer (breadth first)."""
        dag = self.dag
        out: List[Instruction] = []
        seen = set(blocked)
        queue = list(blocked)
        head = 0
        local = {}
        while head < len(queue) and len(out) < SABRE_EXTENDED_SIZE:
            i = queue[head]
            head += 1
            for s in dag.succ[i]:
                if s in seen:
                    continue
                local[s] = local.get(s, npred[s]) - 1
                if local[s] > 0:
                    continue
                seen.add(s)
                queue.append(s)
                if _is_2q(dag.ops[s]):
                    out.append(dag.ops[s])
                    if len(out) >= SABRE_EXTENDED_SIZE:
                        break
        return out

    def _sabre_step(self, blocked: Sequence[int], npred) -> None:
        front = [self.dag.ops[i] for i in blocked]
        ext = self._extended(blocked, npred)
        cand = self._candidates(front)
        l2p = self.l2p
        best, best_score = [], None
        for p, v in cand:
            lp, lv = self.p2l[p], self.p2l[v]
            l2p[lp], l2p[lv] = v, p
            f = self._front_cost(front, l2p) / len(front)
            e = self._front_cost(ext, l2p) / len(ext) if ext else 0.0
            l2p[lp], l2p[lv] = p, v
            score = max(self.decay[p], self.decay[v]) * (f + SABRE_EXTENDED_WEIGHT * e)
            if best_score is None or score < best_score - 1e-12:
                best, best_score = [(p, v)], score
            elif abs(score - best_score) <= 1e-12:
                best.append((p, v))
        p, v = best[int(self.rng.integers(len(best)))]
        self.swap(p, v)


def route(c: Circuit, device: Device, layout: Sequence[int], strategy: str = "sabre", seed: int = 0):
    """Insert SWAPs so every two-qubit gate acts on a device edge.

    Parameters
    ----------
    c : Circuit
        Logical circuit.
    device : Device
    layout : sequence of int
        Physical qubit of each logical qubit at the start.
    strategy : {"basic", "stochastic", "sabre"}
    seed : int

    Returns
    -------
    routed : Circuit
        On the device's qubits, layerized, SWAPs kept as ``SWAP`` gates.
    tracker : TrackerLog
    metrics : SwapMetrics
    """
    if strategy not in ROUTINGS:
        raise RoutingError(f"unknown routing strategy {strategy!r}")
    if c.num_qubits > device.num_qubits:
        raise RoutingError(f"circuit needs {c.num_qubits} qubits, device has {device.num_qubits}")
    if len(layout) < c.num_qubits:
        raise RoutingError("layout does not cover every circuit qubit")
    if c.has_noise():
        raise RoutingError("route the clean circuit; noise is injected afterwards")
    l2p = full_layout(list(layout)[: c.num_qubits], device.num_qubits)
    ops = [i for i in split_groups(c) if i.name != "TICK"]
    r = _Router(_Dag(ops), device, l2p, strategy, seed)
    r.run()
    routed = layerize(merge_moments(r.out, device.num_qubits))
    tracker = TrackerLog(l2p, c.num_qubits, c.num_measurements, r.swaps, r.snapshots)
    metrics = SwapMetrics(len(r.swaps), c.two_qubit_gate_count())
    return routed, tracker, metrics


def count_swaps(pairs: Sequence[Tuple[int, int]], device: Device, layout: Sequence[int], strategy: str,
                seed: int = 0) -> Tuple[int, List[int]]:
    """Route a bare two-qubit interaction list; returns (swaps, final layout)."""
    ops = [Instruction("CX", p) for p in pairs]
    n = max((max(p) for p in pairs), default=-1) + 1
    l2p = full_layout(list(layout)[:n], device.num_qubits)
    r = _Router(_Dag(ops), device, l2p, strategy, seed)
    r.run()
    return len(r.swaps), r.l2p
