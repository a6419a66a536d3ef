"""Minimum-weight perfect matching decoder.

Fired detectors are paired with each other or with a virtual boundary node
along shortest paths of the detector graph.  Small defect sets are matched
exactly by a subset recursion whose memo is shared between shots; larger
ones go through a blossom solver (networkx).
"""
from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ..sim.dem import DetectorErrorModel, merge_probability


class NonGraphlikeError(ValueError):
    """The DEM has an error mechanism that cannot be expressed as graph edges."""


_EPS = 1e-12  # stand-in for zero weights, which csgraph would read as "no edge"


MAX_APPROX_MASS = 0.01


def edge_weight(p: float) -> float:
    if not 0 < p <= 0.5:
        raise ValueError(f"edge probability {p} outside (0, 1/2]")
    return math.log((1 - p) / p)


def _decompose(dets: Tuple[int, ...], obs: int, edges: Dict[Tuple[int, int], Dict[int, float]], boundary: int):
    """Most likely split of a hyperedge into existing edges whose observables XOR to ``obs``.

    Searches every pairing of the detectors (each paired with another one
    or the boundary) and returns the one with the smallest total weight,
    or None when no pairing exists.
    """
    best = [math.inf, None]

    def rec(rest: Tuple[int, ...], mask: int, cost: float, parts: list) -> None:
        if cost >= best[0]:
            return
        if not rest:
            if mask == obs:
                best[0], best[1] = cost, list(parts)
            return
        first, tail = rest[0], rest[1:]
        options = []
        for j, other in enumerate(tail):
            key = (first, other) if first < other else (other, first)
            if key in edges:
                options.append((key, tail[:j] + tail[j + 1:]))
        if (first, boundary) in edges:
            options.append(((first, boundary), tail))
        for key, remaining in options:
            for m, p in edges[key].items():
                parts.append((key, m))
                rec(remaining, mask ^ m, cost + edge_weight(min(p, 0.5)), parts)
                parts.pop()

    rec(tuple(dets), 0, 0.0, [])
    return best[1]


class MatchingGraph:
    """Detector graph with one boundary node.

    Parameters
    ----------
    num_detectors : int
    edges : iterable of (a, b, p, obs_mask)
        ``b`` may be ``None`` for a boundary edge.  Parallel edges keep the
        most likely one.
    """

    def __init__(self, num_detectors: int, edges: Iterable[Tuple[int, Optional[int], float, int]],
                 num_observables: int = 0, exact_limit: int = 12):
        self.num_detectors = int(num_detectors)
        self.num_observables = int(num_observables)
        self.boundary = self.num_detectors
        self.exact_limit = exact_limit
        self.approximated = 0
        best: Dict[Tuple[int, int], Tuple[float, int]] = {}
        for a, b, p, mask in edges:
            b = self.boundary if b is None else b
            key = (a, b) if a < b else (b, a)
            w = edge_weight(p)
            if key not in best or w < best[key][0]:
                best[key] = (w, int(mask))
        self.edges = best
        self._build()

    @classmethod
    def from_dem(cls, dem: DetectorErrorModel, exact_limit: int = 12,
                 max_approx_mass: float = MAX_APPROX_MASS) -> "MatchingGraph":
        """Build the graph, decomposing hyperedges into existing edges.

        Mechanisms carrying an X/Z split are split first.  A piece that
        still flips more than two detectors takes its most likely
        decomposition into graphlike edges.  Pieces with none (rare, e.g.
        faults spread by routing SWAPs) are approximated by pairing their
        sorted detectors, as long as their share of the total mechanism
        probability stays within ``max_approx_mass``; ``approximated``
        counts them.

        Raises
        ------
        NonGraphlikeError
            When the undecomposable share exceeds ``max_approx_mass``; the
            model is then not suited to matching (e.g. LDPC codes).
        """
        nd = dem.num_detectors
        probs: Dict[Tuple[int, int], Dict[int, float]] = {}
        hyper = []

        def add(key, mask, p):
            by_mask = probs.setdefault(key, {})
            by_mask[mask] = merge_probability(by_mask.get(mask, 0.0), p)

        for m in dem.mechanisms:
            if not m.detectors:
                continue
            for dets, obs in m.parts or ((m.detectors, m.observables),):
                if not dets:
                    continue  # an observable-only piece cannot be matched; dropped
                if len(dets) > 2:
                    hyper.append((dets, sum(1 << o for o in obs), m.p))
                    continue
                a = dets[0]
                b = dets[1] if len(dets) == 2 else nd
                add((a, b), sum(1 << o for o in obs), m.p)
        base = {k: dict(v) for k, v in probs.items()}
        total = sum(m.p for m in dem.mechanisms) or 1.0
        failed = []
        for dets, mask, p in hyper:
            parts = _decompose(tuple(dets), mask, base, nd)
            if parts is None:
                failed.append((dets, mask, p))
                continue
            for key, m_ in parts:
                probs[key][m_] = merge_probability(probs[key][m_], p)
        lost = sum(p for _, _, p in failed)
        if failed and lost / total > max_approx_mass:
            raise NonGraphlikeError(
                f"{len(failed)} mechanisms (e.g. detectors {list(failed[0][0])}) carrying {lost / total:.1%} of the "
                "error probability have no decomposition into graph edges; matching needs a graphlike model"
            )
        for dets, mask, p in failed:
            ds = sorted(dets)
            pairs = [(ds[i], ds[i + 1]) for i in range(0, len(ds) - 1, 2)]
            if len(ds) % 2:
                pairs.append((ds[-1], nd))
            for i, key in enumerate(pairs):
                add(key, mask if i == 0 else 0, p)
        edges = []
        for (a, b), by_mask in probs.items():
            for mask, p in by_mask.items():
                edges.append((a, None if b == nd else b, min(p, 0.5), mask))
        g = cls(nd, edges, dem.num_observables, exact_limit)
        g.approximated = len(failed)
        return g

    def _build(self) -> None:
        n = self.num_detectors + 1
        rows, cols, vals = [], [], []
        for (a, b), (w, _) in self.edges.items():
            w = max(w, _EPS)
            rows += [a, b]
            cols += [b, a]
            vals += [w, w]
        g = csr_matrix((vals, (rows, cols)), shape=(n, n))
        dist, pred = shortest_path(g, directed=False, return_predecessors=True)
        self.dist = dist
        # observable parity along each shortest path, filled in distance order
        par = np.zeros((n, n), dtype=np.int64)
        mask_of = {}
        for (a, b), (_, m) in self.edges.items():
            mask_of[(a, b)] = m
            mask_of[(b, a)] = m
        for s in range(n):
            order = np.argsort(dist[s], kind="stable")
            row = par[s]
            ps = pred[s]
            for v in order:
                u = ps[v]
                if u < 0:
                    continue
                row[v] = row[u] ^ mask_of[(int(u), int(v))]
        self.path_obs = par
        self._memo: Dict[int, Tuple[float, int]] = {0: (0.0, 0)}

    # -- decoding ------------------------------------------------------------

    def _exact(self, mask: int) -> Tuple[float, int]:
        memo = self._memo
        hit = memo.get(mask)
        if hit is not None:
            return hit
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        B = self.boundary
        best_w, best_o = math.inf, 0
        d_i = self.dist[i]
        if math.isfinite(d_i[B]):
            w, o = self._exact(rest)
            w += d_i[B]
            if w < best_w:
                best_w, best_o = w, o ^ int(self.path_obs[i, B])
        r = rest
        while r:
            lowj = r & -r
            j = lowj.bit_length() - 1
            r ^= lowj
            if math.isfinite(d_i[j]):
                w, o = self._exact(rest ^ lowj)
                w += d_i[j]
                if w < best_w:
                    best_w, best_o = w, o ^ int(self.path_obs[i, j])
        if len(memo) > 2_000_000:
            memo.clear()
            memo[0] = (0.0, 0)
        memo[mask] = (best_w, best_o)
        return best_w, best_o

    def _blossom(self, defects: Sequence[int]) -> Tuple[float, int]:
        B = self.boundary
        g = nx.Graph()
        k = len(defects)
        big = 0.0
        pairs = []
        for x in range(k):
            for y in range(x + 1, k):
                w = self.dist[defects[x], defects[y]]
                if math.isfinite(w):
                    pairs.append((x, y, w))
                    big = max(big, w)
            w = self.dist[defects[x], B]
            if math.isfinite(w):
                pairs.append((x, k + x, w))
                big = max(big, w)
        for x in range(k):
            for y in range(x + 1, k):
                pairs.append((k + x, k + y, 0.0))
        big = 2 * big + 1
        for u, v, w in pairs:
            g.add_edge(u, v, weight=big - w)
        match = nx.max_weight_matching(g, maxcardinality=True)
        total, obs = 0.0, 0
        for u, v in match:
            u, v = min(u, v), max(u, v)
            if u >= k:
                continue
            du = defects[u]
            dv = B if v >= k else defects[v]
            total += self.dist[du, dv]
            obs ^= int(self.path_obs[du, dv])
        if len(match) * 2 != 2 * k:
            return math.inf, obs
        return total, obs

    def decode_with_weight(self, events: Sequence[int]) -> Tuple[np.ndarray, float]:
        """Prediction bits and total matching weight for one shot."""
        ev = np.asarray(events, dtype=bool)
        if ev.shape != (self.num_detectors,):
            raise ValueError(f"expected {self.num_detectors} detector bits, got shape {ev.shape}")
        defects = np.flatnonzero(ev)
        if defects.size <= self.exact_limit:
            mask = 0
            for d in defects:
                mask |= 1 << int(d)
            w, o = self._exact(mask)
        else:
            w, o = self._blossom([int(d) for d in defects])
        out = np.array([(o >> k) & 1 for k in range(self.num_observables)], dtype=bool)
        return out, float(w)

    def decode(self, events: Sequence[int]) -> np.ndarray:
        return self.decode_with_weight(events)[0]

    def decode_batch(self, events: np.ndarray) -> np.ndarray:
        events = np.asarray(events, dtype=bool)
        out = np.zeros((events.shape[0], self.num_observables), dtype=bool)
        cache: Dict[bytes, np.ndarray] = {}
        fired = events.any(axis=1)
        for s in np.flatnonzero(fired):
            key = np.packbits(events[s]).tobytes()
            pred = cache.get(key)
            if pred is None:
                pred = self.decode(events[s])
                cache[key] = pred
            out[s] = pred
        return out


def mwpm_decode(graph: MatchingGraph, events) -> np.ndarray:
    """Observable prediction for one shot (or a 2-D table of shots)."""
    events = np.asarray(events, dtype=bool)
    if events.ndim == 2:
        return graph.decode_batch(events)
    return graph.decode(events)
