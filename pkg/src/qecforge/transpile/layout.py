"""Initial placement of logical qubits on a device."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .. import gates
from ..arch import Device
from ..circuit import Circuit
from .route import RoutingError, count_swaps, full_layout

LAYOUTS = ("trivial", "dense", "sabre")
SABRE_LAYOUT_ITERS = 3
DENSE_MAX_STARTS = 64


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class LayoutMap:
    logical_to_physical: Tuple[int, ...]
    strategy: str

    def __len__(self) -> int:
        return len(self.logical_to_physical)

    def __getitem__(self, q: int) -> int:
        return self.logical_to_physical[q]

    def __iter__(self):
        return iter(self.logical_to_physical)


def interaction_pairs(c: Circuit) -> List[Tuple[int, int]]:
    return [tuple(g) for ins in c.instructions if ins.name in gates.TWO_QUBIT_GATES for g in ins.groups()]


def dense_subset(device: Device, k: int) -> List[int]:
    """Connected ``k``-qubit region with the most internal couplers.

    Grown greedily from each start qubit, always adding the frontier qubit
    with the most links into the region (ties: higher degree, lower index);
    the best region over all starts wins.
    """
    n = device.num_qubits
    if k > n:
        raise LayoutError(f"need {k} qubits, device has {n}")
    if k == 0:
        return []
    nbrs = device.neighbors(("local", "inter_qpu"))
    deg = np.array([len(x) for x in nbrs])
    starts = range(n) if n <= DENSE_MAX_STARTS else np.linspace(0, n - 1, DENSE_MAX_STARTS).round().astype(int)
    best, best_score = None, -1
    for s in starts:
        s = int(s)
        chosen = [s]
        inside = {s}
        links = {}
        for v in nbrs[s]:
            links[v] = links.get(v, 0) + 1
        internal = 0
        while len(chosen) < k:
            if not links:
                break
            v = max(links, key=lambda u: (links[u], deg[u], -u))
            internal += links.pop(v)
            chosen.append(v)
            inside.add(v)
            for u in nbrs[v]:
                if u not in inside:
                    links[u] = links.get(u, 0) + 1
        if len(chosen) < k:
            continue
        if internal > best_score:
            best, best_score = chosen, internal
    if best is None:
        # disconnected local graph (e.g. shuttle-only links): fall back to index order
        return list(range(k))
    return best


def _dense(c: Circuit, device: Device) -> List[int]:
    return dense_subset(device, c.num_qubits)


def _sabre(c: Circuit, device: Device, seed: int, routing: str) -> List[int]:
    """Forward/backward refinement; the trivial and dense placements compete too."""
    n = c.num_qubits
    pairs = interaction_pairs(c)
    rng = np.random.default_rng(seed)
    candidates = [list(range(n))]
    try:
        candidates.append(_dense(c, device))
    except LayoutError:
        pass
    start = full_layout(list(rng.permutation(device.num_qubits)[:n]), device.num_qubits)
    for init in (start, full_layout(candidates[-1], device.num_qubits)):
        l2p = init
        for it in range(SABRE_LAYOUT_ITERS):
            _, l2p = count_swaps(pairs, device, l2p, "sabre", seed + it)
            _, l2p = count_swaps(pairs[::-1], device, l2p, "sabre", seed + it)
        candidates.append(l2p[:n])
    best, best_cost = None, None
    for cand in candidates:
        cost = count_swaps(pairs, device, cand, routing, seed)[0]
        if best_cost is None or cost < best_cost:
            best, best_cost = cand, cost
    return list(best)


def layout(c: Circuit, device: Device, strategy: str = "trivial", seed: int = 0,
           routing: str = "sabre") -> LayoutMap:
    """Choose physical qubits for the circuit's logical qubits.

    ``trivial`` maps ``i -> i``; ``dense`` picks the densest connected region;
    ``sabre`` runs forward/backward routing passes from a random and the
    dense start and keeps whichever of those and the trivial placement
    needs the fewest SWAPs under ``routing``.
    """
    if c.num_qubits > device.num_qubits:
        raise LayoutError(f"circuit needs {c.num_qubits} qubits, device has {device.num_qubits}")
    if strategy == "trivial":
        m = list(range(c.num_qubits))
    elif strategy == "dense":
        m = _dense(c, device)
    elif strategy == "sabre":
        try:
            m = _sabre(c, device, seed, routing)
        except RoutingError as e:
            raise LayoutError(str(e)) from e
    else:
        raise LayoutError(f"unknown layout strategy {strategy!r}")
    return LayoutMap(tuple(int(x) for x in m), strategy)
