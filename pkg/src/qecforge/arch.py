"""Device topologies, the device catalog and shuttling augmentation.

Times are in microseconds throughout.  Edge ``duration`` is the extra time a
two-qubit gate spends on that link on top of the native gate duration; it is
zero for ordinary couplers and the move-there-and-back time for shuttle
links.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

LINK_CLASSES = ("local", "inter_qpu", "shuttle")
GATESETS = ("stim_clifford", "heron", "h2")
TOPOLOGIES = ("line", "grid", "cuboid", "heavy_hex", "complete", "triangular")
PRESETS = ("willow_x3", "apollo_768", "infleqtion_x16", "flamingo", "nighthawk")

# defaults for presets; none of these are device-specific calibrations
HERON_T2_MEAN = 330.14
HERON_T2_STD = 142.84
T_FLOOR = 1.0
NEUTRAL_ATOM_PITCH = 4.0  # um between neighbouring sites
NEUTRAL_ATOM_SPEED = 0.55  # um/us, fastest error-free move
INFLEQTION_T1 = 4.0e6
INFLEQTION_T2 = 1.0e6


class DeviceError(ValueError):
    pass


@dataclass(frozen=True)
class Qubit:
    index: int
    coords: Tuple[float, ...]
    t1: Optional[float] = None
    t2: Optional[float] = None


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    link_class: str = "local"
    duration: float = 0.0
    error_scale: float = 1.0

    @property
    def key(self) -> Tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True)
class Device:
    """Qubit-connectivity graph with per-qubit and per-link properties.

    Parameters
    ----------
    qubits : tuple of Qubit
        Indexed ``0..n-1`` in order.
    edges : tuple of Edge
        Undirected, no duplicates.
    gateset : str
        Native gate-set id.
    qpus : tuple of int, optional
        QPU id per qubit for distributed devices.
    name : str
    noise : str, optional
        Name of the noise preset this device ships with.
    shuttling : bool
        Whether shuttle links were added.
    """

    qubits: Tuple[Qubit, ...]
    edges: Tuple[Edge, ...]
    gateset: str = "stim_clifford"
    qpus: Optional[Tuple[int, ...]] = None
    name: str = "custom"
    noise: Optional[str] = None
    shuttling: bool = False
    _adj: Dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for i, q in enumerate(self.qubits):
            if q.index != i:
                raise DeviceError(f"qubit {i} has index {q.index}")
            if q.t1 is not None and q.t2 is not None and q.t2 > 2 * q.t1 + 1e-12:
                raise DeviceError(f"qubit {i}: T2={q.t2} exceeds 2*T1={2 * q.t1}")
        if self.gateset not in GATESETS:
            raise DeviceError(f"unknown gate set {self.gateset!r}")
        n = len(self.qubits)
        adj: Dict[Tuple[int, int], Edge] = {}
        for e in self.edges:
            if e.link_class not in LINK_CLASSES:
                raise DeviceError(f"unknown link class {e.link_class!r}")
            if not (0 <= e.a < n and 0 <= e.b < n) or e.a == e.b:
                raise DeviceError(f"bad edge ({e.a}, {e.b})")
            if e.key in adj:
                raise DeviceError(f"duplicate edge {e.key}")
            if e.link_class == "shuttle" and not self.shuttling:
                raise DeviceError("shuttle edges require shuttling=True")
            adj[e.key] = e
        if self.qpus is not None and len(self.qpus) != n:
            raise DeviceError("qpus must give one id per qubit")
        object.__setattr__(self, "_adj", adj)

    # -- queries ---------------------------------------------------------------

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge(self, a: int, b: int) -> Optional[Edge]:
        return self._adj.get((a, b) if a < b else (b, a))

    def has_edge(self, a: int, b: int) -> bool:
        return self.edge(a, b) is not None

    def graph(self, classes: Iterable[str] = LINK_CLASSES) -> nx.Graph:
        classes = set(classes)
        g = nx.Graph()
        g.add_nodes_from(range(self.num_qubits))
        g.add_edges_from(e.key for e in self.edges if e.link_class in classes)
        return g

    def neighbors(self, classes: Iterable[str] = LINK_CLASSES) -> List[List[int]]:
        classes = set(classes)
        out: List[List[int]] = [[] for _ in range(self.num_qubits)]
        for e in self.edges:
            if e.link_class in classes:
                out[e.a].append(e.b)
                out[e.b].append(e.a)
        return [sorted(x) for x in out]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_qubits, dtype=np.int64)
        for e in self.edges:
            deg[e.a] += 1
            deg[e.b] += 1
        return deg

    def is_connected(self) -> bool:
        return self.num_qubits <= 1 or nx.is_connected(self.graph())

    def distances(self) -> np.ndarray:
        """Hop-count distance matrix (``inf`` between components)."""
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import shortest_path

        n = self.num_qubits
        if not self.edges:
            d = np.full((n, n), np.inf)
            np.fill_diagonal(d, 0)
            return d
        a = np.array([e.a for e in self.edges])
        b = np.array([e.b for e in self.edges])
        g = csr_matrix((np.ones(a.size), (a, b)), shape=(n, n))
        return shortest_path(g, directed=False, unweighted=True)

    def coords(self) -> np.ndarray:
        dim = max(len(q.coords) for q in self.qubits) if self.qubits else 0
        out = np.zeros((self.num_qubits, dim))
        for q in self.qubits:
            out[q.index, : len(q.coords)] = q.coords
        return out

    def subdevice(self, keep: Sequence[int], name: Optional[str] = None) -> "Device":
        """Induced sub-graph on ``keep``, reindexed in the given order."""
        pos = {q: i for i, q in enumerate(keep)}
        qubits = tuple(replace(self.qubits[q], index=i) for i, q in enumerate(keep))
        edges = tuple(
            replace(e, a=pos[e.a], b=pos[e.b]) for e in self.edges if e.a in pos and e.b in pos
        )
        qpus = tuple(self.qpus[q] for q in keep) if self.qpus is not None else None
        return Device(qubits, edges, self.gateset, qpus, name or self.name, self.noise,
                      any(e.link_class == "shuttle" for e in edges))

    def with_gateset(self, gateset: str) -> "Device":
        return replace(self, gateset=gateset)

    def with_error_scale(self, link_class: str, scale: float) -> "Device":
        edges = tuple(replace(e, error_scale=scale) if e.link_class == link_class else e for e in self.edges)
        return replace(self, edges=edges)

    # -- JSON --------------------------------------------------------------------

    def to_dict(self) -> dict:
        qs = []
        for q in self.qubits:
            d = {"id": q.index, "x": q.coords[0] if q.coords else 0, "y": q.coords[1] if len(q.coords) > 1 else 0}
            if len(q.coords) > 2:
                d["z"] = q.coords[2]
            if q.t1 is not None:
                d["t1"] = q.t1
            if q.t2 is not None:
                d["t2"] = q.t2
            qs.append(d)
        out = {
            "name": self.name,
            "qubits": qs,
            "edges": [{"a": e.a, "b": e.b, "class": e.link_class, "duration": e.duration,
                       "error_scale": e.error_scale} for e in self.edges],
            "gateset": self.gateset,
            "shuttling": self.shuttling,
        }
        if self.qpus is not None:
            out["qpus"] = list(self.qpus)
        if self.noise is not None:
            out["noise"] = self.noise
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "Device":
        qubits = []
        for q in sorted(d["qubits"], key=lambda q: q["id"]):
            c = (q.get("x", 0), q.get("y", 0)) + ((q["z"],) if "z" in q else ())
            qubits.append(Qubit(int(q["id"]), tuple(float(v) for v in c), q.get("t1"), q.get("t2")))
        edges = tuple(
            Edge(int(e["a"]), int(e["b"]), e.get("class", "local"), float(e.get("duration", 0.0)),
                 float(e.get("error_scale", 1.0)))
            for e in d["edges"]
        )
        shuttling = d.get("shuttling", any(e.link_class == "shuttle" for e in edges))
        qpus = tuple(d["qpus"]) if d.get("qpus") is not None else None
        return cls(tuple(qubits), edges, d.get("gateset", "stim_clifford"), qpus, d.get("name", "custom"),
                   d.get("noise"), shuttling)

    @classmethod
    def from_json(cls, text: str) -> "Device":
        return cls.from_dict(json.loads(text))


def _device(coords: Sequence[Tuple[float, ...]], pairs: Iterable[Tuple[int, int]], name: str, **kw) -> Device:
    qubits = tuple(Qubit(i, tuple(float(v) for v in c)) for i, c in enumerate(coords))
    edges = tuple(Edge(a, b) if a < b else Edge(b, a) for a, b in pairs)
    return Device(qubits, edges, name=name, **kw)


# -- synthetic topologies -----------------------------------------------------


def _grid_pairs(rows: int, cols: int, offset: int = 0, diagonal: bool = False):
    def q(r, c):
        return offset + r * cols + c

    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                yield q(r, c), q(r, c + 1)
            if r + 1 < rows:
                yield q(r, c), q(r + 1, c)
            if diagonal and r + 1 < rows and c + 1 < cols:
                yield q(r, c), q(r + 1, c + 1)


def _heavy_hex(rows: int, cols: int):
    coords = [(float(c), float(2 * r)) for r in range(rows) for c in range(cols)]
    pairs = [(r * cols + c, r * cols + c + 1) for r in range(rows) for c in range(cols - 1)]
    for r in range(rows - 1):
        start = 0 if r % 2 == 0 else 2
        for c in range(start, cols, 4):
            b = len(coords)
            coords.append((float(c), float(2 * r + 1)))
            pairs += [(r * cols + c, b), (b, (r + 1) * cols + c)]
    return coords, pairs


def make_topology(kind: str, *dims: int, name: Optional[str] = None) -> Device:
    """Synthetic device graph.

    Parameters
    ----------
    kind : {"line", "grid", "cuboid", "heavy_hex", "complete", "triangular"}
        ``grid`` and ``cuboid`` are nearest-neighbour lattices; ``heavy_hex``
        takes ``(rows, cols)`` of degree-2 row qubits joined by bridge
        qubits every fourth column, alternating offsets; ``triangular`` is a
        grid with one diagonal per cell (degree 6 inside).
    dims : int
    """
    if not dims or any(int(x) <= 0 for x in dims):
        raise DeviceError(f"dimensions must be positive, got {dims}")
    dims = tuple(int(x) for x in dims)
    label = name or f"{kind}({','.join(map(str, dims))})"
    if kind == "line":
        (n,) = dims
        return _device([(i, 0) for i in range(n)], [(i, i + 1) for i in range(n - 1)], label)
    if kind == "complete":
        (n,) = dims
        return _device([(i, 0) for i in range(n)], itertools.combinations(range(n), 2), label)
    if kind in ("grid", "triangular"):
        if len(dims) == 1:
            side = math.isqrt(dims[0])
            dims = (side, side)
        rows, cols = dims
        coords = [(c, r) for r in range(rows) for c in range(cols)]
        return _device(coords, _grid_pairs(rows, cols, diagonal=kind == "triangular"), label)
    if kind == "cuboid":
        a, b, c = dims
        coords = [(x, y, z) for z in range(c) for y in range(b) for x in range(a)]

        def q(x, y, z):
            return (z * b + y) * a + x

        pairs = []
        for z in range(c):
            for y in range(b):
                for x in range(a):
                    if x + 1 < a:
                        pairs.append((q(x, y, z), q(x + 1, y, z)))
                    if y + 1 < b:
                        pairs.append((q(x, y, z), q(x, y + 1, z)))
                    if z + 1 < c:
                        pairs.append((q(x, y, z), q(x, y, z + 1)))
        return _device(coords, pairs, label)
    if kind == "heavy_hex":
        rows, cols = dims
        coords, pairs = _heavy_hex(rows, cols)
        return _device(coords, pairs, label)
    raise DeviceError(f"unknown topology {kind!r}")


# -- shuttling ----------------------------------------------------------------


def shuttle_time(distance: float, pitch: float, max_speed: float) -> float:
    """Move-there-and-back time for ``distance`` lattice units."""
    return 2.0 * distance * pitch / max_speed


def add_shuttling(d: Device, pitch: float = NEUTRAL_ATOM_PITCH, max_speed: float = NEUTRAL_ATOM_SPEED) -> Device:
    """Add shuttle links between every non-adjacent pair.

    A device that already has shuttle links is returned unchanged.
    """
    if d.shuttling:
        return d
    if pitch <= 0 or max_speed <= 0:
        raise DeviceError("pitch and max_speed must be positive")
    if any(len(q.coords) == 0 for q in d.qubits):
        raise DeviceError("shuttling needs qubit coordinates")
    xyz = d.coords()
    new = list(d.edges)
    for a in range(d.num_qubits):
        for b in range(a + 1, d.num_qubits):
            if not d.has_edge(a, b):
                dist = float(np.linalg.norm(xyz[a] - xyz[b]))
                new.append(Edge(a, b, "shuttle", shuttle_time(dist, pitch, max_speed), 1.0))
    return replace(d, edges=tuple(new), shuttling=True)


# -- qubit quality --------------------------------------------------------------


def sample_qubit_quality(d: Device, mean_t: float = HERON_T2_MEAN, stddev: float = HERON_T2_STD,
                         seed: int = 0, mean_t1: Optional[float] = None) -> Device:
    """Draw per-qubit T1 and T2 from normal distributions.

    Samples are floored at ``T_FLOOR`` and T2 is clipped to at most 2*T1.
    ``mean_t1`` defaults to ``mean_t``.
    """
    if stddev < 0:
        raise DeviceError("stddev must be nonnegative")
    rng = np.random.default_rng(seed)
    n = d.num_qubits
    m1 = mean_t if mean_t1 is None else mean_t1
    t1 = np.maximum(rng.normal(m1, stddev, n), T_FLOOR)
    t2 = np.maximum(rng.normal(mean_t, stddev, n), T_FLOOR)
    t2 = np.minimum(t2, 2 * t1)
    qubits = tuple(replace(q, t1=float(t1[i]), t2=float(t2[i])) for i, q in enumerate(d.qubits))
    return replace(d, qubits=qubits)


def with_uniform_quality(d: Device, t1: float, t2: float) -> Device:
    return replace(d, qubits=tuple(replace(q, t1=t1, t2=t2) for q in d.qubits))


# -- presets ----------------------------------------------------------------------


def _tiles(rows: int, cols: int, count: int, diagonal: bool):
    """Side-by-side lattice tiles forming one lattice; returns coords, pairs and qpu ids."""
    coords, pairs, qpus = [], [], []
    width = cols * count
    for r in range(rows):
        for c in range(width):
            coords.append((c, r))
            qpus.append(c // cols)
    for a, b in _grid_pairs(rows, width, diagonal=diagonal):
        pairs.append((a, b))
    return coords, pairs, qpus


def flamingo(tile_rows: int = 12, tile_cols: int = 13, tiles: int = 3, inter_links: int = 3,
             inter_scale: float = 10.0) -> Device:
    """Grid QPU tiles in a row joined by a few noisy inter-QPU links."""
    coords = []
    qpus = []
    pairs = []
    per = tile_rows * tile_cols
    for t in range(tiles):
        off = t * per
        coords += [(t * (tile_cols + 1) + c, r) for r in range(tile_rows) for c in range(tile_cols)]
        qpus += [t] * per
        pairs += list(_grid_pairs(tile_rows, tile_cols, offset=off))
    if inter_links > tile_rows:
        raise DeviceError(f"{inter_links} inter-QPU links do not fit on {tile_rows} rows")
    # midpoints of equal row bands, distinct whenever the links fit
    rows = [(2 * k + 1) * tile_rows // (2 * inter_links) for k in range(inter_links)]
    edges = [Edge(min(a, b), max(a, b)) for a, b in pairs]
    for t in range(tiles - 1):
        for r in rows:
            a = t * per + int(r) * tile_cols + tile_cols - 1
            b = (t + 1) * per + int(r) * tile_cols
            edges.append(Edge(a, b, "inter_qpu", 0.0, inter_scale))
    qubits = _heron_qubits(coords)
    return Device(qubits, tuple(edges), "heron", tuple(qpus), "flamingo", "flamingo")


def _heron_qubits(coords):
    return tuple(Qubit(i, tuple(float(v) for v in c), HERON_T2_MEAN, HERON_T2_MEAN) for i, c in enumerate(coords))


def nighthawk(tile_rows: int = 10, tile_cols: int = 12, tiles: int = 3) -> Device:
    """Degree-6 lattice tiles joined along their whole shared boundary at full quality."""
    coords, pairs, qpus = _tiles(tile_rows, tile_cols, tiles, diagonal=True)
    edges = []
    for a, b in pairs:
        a, b = min(a, b), max(a, b)
        cls = "local" if qpus[a] == qpus[b] else "inter_qpu"
        edges.append(Edge(a, b, cls, 0.0, 1.0))
    return Device(_heron_qubits(coords), tuple(edges), "heron", tuple(qpus), "nighthawk", "nighthawk")


def device_preset(name: str, shuttling: Optional[bool] = None) -> Device:
    """Scaled models of the catalogued devices.

    ``shuttling`` toggles the shuttle links where the technology allows
    movement; by default Apollo has them and Infleqtion does not.
    """
    key = name.lower().replace("-", "_")
    if key in ("willow", "willow_x3"):
        if shuttling:
            raise DeviceError("willow does not support shuttling")
        d = make_topology("grid", 15, 21, name="willow_x3")
        return replace(d, noise="willow")
    if key in ("infleqtion", "infleqtion_x16"):
        d = make_topology("grid", 16, 24, name="infleqtion_x16")
        d = with_uniform_quality(d, INFLEQTION_T1, INFLEQTION_T2)
        d = replace(d, noise="infleqtion")
        return add_shuttling(d) if shuttling else d
    if key in ("apollo", "apollo_768"):
        d = make_topology("grid", 24, 32, name="apollo_768")
        d = replace(d, gateset="h2", noise="apollo")
        return d if shuttling is False else add_shuttling(d, 1.0, 1.0)
    if shuttling:
        raise DeviceError(f"{name} does not support shuttling")
    if key == "flamingo":
        return flamingo()
    if key == "nighthawk":
        return nighthawk()
    raise DeviceError(f"unknown device preset {name!r}; choose from {', '.join(PRESETS)}")

