"""Native gate sets and exact single-qubit Clifford resynthesis.

A single-qubit Clifford is identified by the images of X and Z under
conjugation, each a Pauli ``(x, z, sign)``; global phase is ignored, so the
group has 24 elements.  Each gate set gets a breadth-first table of shortest
native words for all 24.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .. import gates

Pauli = Tuple[int, int, int]
Clifford1 = Tuple[Pauli, Pauli]
Op = Tuple[str, Tuple[float, ...]]

IDENTITY: Clifford1 = ((1, 0, 0), (0, 1, 0))


def _h(p: Pauli) -> Pauli:
    x, z, r = p
    return (z, x, r ^ (x & z))


def _s(p: Pauli) -> Pauli:
    x, z, r = p
    return (x, x ^ z, r ^ (x & z))


def then(c: Clifford1, prim: str) -> Clifford1:
    """``c`` followed by primitive ``H`` or ``S``."""
    f = _h if prim == "H" else _s
    return (f(c[0]), f(c[1]))


def clifford_of(name: str, params: Sequence[float] = ()) -> Clifford1:
    c = IDENTITY
    for prim, _ in gates.decompose(name, params):
        c = then(c, prim)
    return c


def compose(a: Clifford1, b: Clifford1) -> Clifford1:
    """``a`` then ``b``."""
    out = a
    for prim in _word(b):
        out = then(out, prim)
    return out


@lru_cache(maxsize=None)
def _word(c: Clifford1) -> Tuple[str, ...]:
    """Some H/S word implementing ``c`` (BFS over primitives)."""
    seen = {IDENTITY: ()}
    frontier = [IDENTITY]
    while c not in seen:
        nxt = []
        for e in frontier:
            for prim in ("H", "S"):
                f = then(e, prim)
                if f not in seen:
                    seen[f] = seen[e] + (prim,)
                    nxt.append(f)
        frontier = nxt
    return seen[c]


@dataclass(frozen=True)
class GateSet:
    """Allowed instructions of a target device.

    Attributes
    ----------
    id : str
    one_qubit : tuple of (name, params)
        Native single-qubit gates, including their allowed params.
    two_qubit : frozenset of str
        Native two-qubit gate names.
    entangler : (name, params)
        Gate every CX is rewritten around.
    """

    id: str
    one_qubit: Tuple[Op, ...]
    two_qubit: FrozenSet[str]
    entangler: Op

    @property
    def gate_names(self) -> FrozenSet[str]:
        return frozenset(n for n, _ in self.one_qubit) | self.two_qubit

    def is_native(self, name: str, params: Sequence[float] = ()) -> bool:
        if name in gates.TWO_QUBIT_GATES:
            if name not in self.two_qubit:
                return False
            return name != "RZZ" or tuple(params) == self.entangler[1]
        if name in gates.ONE_QUBIT_GATES:
            return (name, tuple(float(p) for p in params)) in self._one_set
        return True  # measurements, resets, noise and annotations

    @property
    def _one_set(self):
        return _one_set(self)

    def synth(self, c: Clifford1) -> Tuple[Op, ...]:
        """Shortest native word for a single-qubit Clifford."""
        return _table(self)[c]


@lru_cache(maxsize=None)
def _one_set(g: GateSet):
    return frozenset(g.one_qubit)


@lru_cache(maxsize=None)
def _table(g: GateSet) -> Dict[Clifford1, Tuple[Op, ...]]:
    gens = [(op, clifford_of(op[0], op[1])) for op in g.one_qubit]
    seen: Dict[Clifford1, Tuple[Op, ...]] = {IDENTITY: ()}
    frontier = [IDENTITY]
    while frontier and len(seen) < 24:
        nxt = []
        for e in frontier:
            for op, ce in gens:
                f = compose(e, ce)
                if f not in seen:
                    seen[f] = seen[e] + (op,)
                    nxt.append(f)
        frontier = nxt
    if len(seen) != 24:
        raise ValueError(f"gate set {g.id} does not generate the single-qubit Clifford group")
    return seen


def _ops(*names: str) -> Tuple[Op, ...]:
    return tuple((n, ()) for n in names)


STIM_CLIFFORD = GateSet(
    "stim_clifford",
    _ops("H", "S", "S_DAG", "X", "Y", "Z", "SX", "SX_DAG", "SQRT_Y", "SQRT_Y_DAG"),
    frozenset(["CX", "CZ"]),
    ("CX", ()),
)
HERON = GateSet(
    "heron",
    _ops("SX", "X") + tuple(("RZ", (float(k),)) for k in (1, 2, 3)),
    frozenset(["CZ"]),
    ("CZ", ()),
)
H2 = GateSet(
    "h2",
    tuple(("RZ", (float(k),)) for k in (1, 2, 3))
    + tuple(("U1Q", (float(t), float(p))) for t in (1, 2, 3) for p in range(4)),
    frozenset(["RZZ"]),
    ("RZZ", (1.0,)),
)
GATESETS: Dict[str, GateSet] = {g.id: g for g in (STIM_CLIFFORD, HERON, H2)}


def get_gateset(name) -> GateSet:
    if isinstance(name, GateSet):
        return name
    try:
        return GATESETS[name]
    except KeyError:
        raise ValueError(f"unknown gate set {name!r}; choose from {', '.join(GATESETS)}") from None


def cx_block(g: GateSet) -> List[Tuple[str, Tuple[int, ...], object]]:
    """CX(0, 1) in terms of the entangler and single-qubit Cliffords.

    Items are ``("1q", (q,), Clifford1)`` or ``(name, (0, 1), params)``.
    """
    h = clifford_of("H")
    if g.entangler[0] == "CX":
        return [("CX", (0, 1), ())]
    if g.entangler[0] == "CZ":
        return [("1q", (1,), h), ("CZ", (0, 1), ()), ("1q", (1,), h)]
    if g.entangler == ("RZZ", (1.0,)):
        sd = clifford_of("S_DAG")
        return [("1q", (1,), h), ("RZZ", (0, 1), (1.0,)), ("1q", (0,), sd), ("1q", (1,), compose(sd, h))]
    raise ValueError(f"no CX block for entangler {g.entangler}")
