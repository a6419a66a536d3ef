"""Gate-set translation with optional peephole optimisation."""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .. import gates
from ..circuit import Circuit, Instruction, layerize
from .gatesets import IDENTITY, Clifford1, GateSet, clifford_of, compose, cx_block, get_gateset, then


class TranslationError(ValueError):
    pass


def split_groups(c: Circuit) -> List[Instruction]:
    """One instruction per gate application (pairs for two-qubit gates)."""
    out: List[Instruction] = []
    for ins in c.instructions:
        if ins.is_annotation or len(ins.groups()) <= 1:
            out.append(ins)
        else:
            out.extend(Instruction(ins.name, g, ins.params) for g in ins.groups())
    return out


def merge_moments(ops: List[Instruction], num_qubits: int) -> Circuit:
    """Join consecutive same-name, same-param operations on disjoint qubits."""
    out: List[Instruction] = []
    for ins in ops:
        prev = out[-1] if out else None
        if (prev is not None and not ins.is_annotation and prev.name == ins.name and prev.params == ins.params
                and not set(prev.qubits) & set(ins.qubits)):
            out[-1] = Instruction(prev.name, prev.targets + ins.targets, prev.params)
        else:
            out.append(ins)
    return Circuit(out, num_qubits)


def _expand(ins: Instruction, g: GateSet) -> List[Tuple[str, Tuple[int, ...], object]]:
    """Rewrite one application into natives and abstract single-qubit Cliffords."""
    name = ins.name
    if name in gates.ONE_QUBIT_GATES:
        if g.is_native(name, ins.params):
            return [(name, ins.targets, ins.params)]
        return [("1q", ins.targets, clifford_of(name, ins.params))]
    if name in gates.TWO_QUBIT_GATES:
        if g.is_native(name, ins.params):
            return [(name, ins.targets, ins.params)]
        if name == "CZ" and "CX" in g.two_qubit:
            a, b = ins.targets
            h = clifford_of("H")
            return [("1q", (b,), h), ("CX", (a, b), ()), ("1q", (b,), h)]
        out = []
        for prim, local in gates.decompose(name, ins.params):
            qs = tuple(ins.targets[i] for i in local)
            if prim == "CX":
                for item, loc, par in cx_block(g):
                    out.append((item, tuple(qs[i] for i in loc), par))
            else:
                out.append(("1q", qs, then(IDENTITY, prim)))
        return out
    return [(name, ins.targets, ins.params)]


def _emit_1q(g: GateSet, q: int, c: Clifford1, out: List[Instruction]) -> None:
    for n, p in g.synth(c):
        out.append(Instruction(n, (q,), p))


def translate(c: Circuit, gateset="stim_clifford", optimize: bool = False) -> Circuit:
    """Rewrite ``c`` into the gates of ``gateset``.

    Native gates are kept; every other single-qubit gate becomes the
    shortest native word for its Clifford, and non-native two-qubit gates
    are decomposed into CX (a SWAP into three) with each CX rewritten around
    the native entangler.  ``optimize`` additionally cancels adjacent
    inverse two-qubit gates and resynthesises every single-qubit run,
    repeating until the gate count stops changing.
    """
    g = get_gateset(gateset)
    for ins in c.instructions:
        if ins.kind == "gate" and ins.name not in gates.UNITARY_GATES:
            raise TranslationError(f"{ins.name} is not a Clifford gate")
    if not optimize:
        out: List[Instruction] = []
        for ins in c.instructions:
            if ins.kind != "gate":
                out.append(ins)
                continue
            for grp in ins.groups():
                for name, qs, par in _expand(Instruction(ins.name, grp, ins.params), g):
                    if name == "1q":
                        _emit_1q(g, qs[0], par, out)
                    else:
                        out.append(Instruction(name, qs, par))
        return merge_moments(out, c.num_qubits)
    cur = c
    had_ticks = any(i.name == "TICK" for i in c.instructions)
    best = None
    while True:
        nxt = _optimize_pass(cur, g)
        if best is not None and nxt.gate_count() >= best:
            break
        best = nxt.gate_count()
        cur = nxt
    return layerize(cur) if had_ticks else cur


_SELF_INVERSE = {"CX": False, "CZ": True, "SWAP": True}  # value: symmetric in its targets


def _combine_2q(a: Tuple[str, Tuple[int, ...], tuple], b: Tuple[str, Tuple[int, ...], tuple]):
    """Product of two adjacent two-qubit gates on the same pair, or None if not simplifiable.

    Returns a list of replacement items (possibly empty).
    """
    na, qa, pa = a
    nb, qb, pb = b
    if na != nb:
        return None
    if na in _SELF_INVERSE:
        same = qa == qb or (_SELF_INVERSE[na] and qa == qb[::-1])
        return [] if same else None
    if na == "RZZ" and set(qa) == set(qb):
        k = (int(pa[0]) + int(pb[0])) % 4
        if k == 0:
            return []
        if k == 2:
            z = clifford_of("Z")
            return [("1q", (qa[0],), z), ("1q", (qa[1],), z)]
        return [("RZZ", qa, (float(k),))]
    return None


def _optimize_pass(c: Circuit, g: GateSet) -> Circuit:
    items: List[Optional[list]] = []  # [name, qubits, params]
    stacks: Dict[int, List[int]] = {}

    def top(q):
        s = stacks.get(q)
        return s[-1] if s else None

    def push(item):
        items.append(item)
        for q in item[1]:
            stacks.setdefault(q, []).append(len(items) - 1)

    def pop(idx):
        for q in items[idx][1]:
            stacks[q].pop()
        items[idx] = None

    def add_1q(q, cl):
        j = top(q)
        if j is not None and items[j][0] == "1q":
            items[j][2] = compose(items[j][2], cl)
            return
        push(["1q", (q,), cl])

    def add(item):
        name, qs, par = item
        if name == "1q":
            add_1q(qs[0], par)
            return
        if name in gates.ONE_QUBIT_GATES:
            add_1q(qs[0], clifford_of(name, par))
            return
        if name in gates.TWO_QUBIT_GATES:
            j = top(qs[0])
            if j is not None and j == top(qs[1]) and items[j][0] in gates.TWO_QUBIT_GATES:
                rep = _combine_2q(tuple(items[j]), (name, qs, par))
                if rep is not None:
                    pop(j)
                    for r in rep:
                        add(r)
                    return
            push([name, qs, par])
            return
        push([name, qs, par])

    for ins in c.instructions:
        if ins.name == "TICK":
            continue
        if ins.kind != "gate":
            push([ins.name, ins.targets if not ins.is_annotation else (), ins.params, ins])
            continue
        for grp in ins.groups():
            for item in _expand(Instruction(ins.name, grp, ins.params), g):
                add(item)
    out: List[Instruction] = []
    for it in items:
        if it is None:
            continue
        if len(it) == 4:
            out.append(it[3])
        elif it[0] == "1q":
            _emit_1q(g, it[1][0], it[2], out)
        else:
            out.append(Instruction(it[0], it[1], it[2]))
    return merge_moments(out, c.num_qubits)
