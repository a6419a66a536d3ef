"""Layouts of the supported code families."""
from __future__ import annotations

from dataclasses import replace
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from .. import gf2
from .layout import Check, CodeLayout, default_schedule


def repetition_layout(d: int) -> CodeLayout:
    """Bit-flip repetition code: checks ``Z_i Z_{i+1}``, logical ``Z_0``."""
    checks = [Check("Z", (i, i + 1), d + i, (2 * i + 1, 0)) for i in range(d - 1)]
    layout = CodeLayout(
        name=f"repetition-{d}",
        num_data=d,
        data_coords=[(2 * i, 0) for i in range(d)],
        checks=checks,
        stabilizers=[("Z", (i,)) for i in range(d - 1)],
        logical_z=[(0,)],
        schedule=[],
        logical_x=[tuple(range(d))],
    )
    layout.schedule = default_schedule(checks)
    return layout


def rotated_surface_layout(d: int) -> CodeLayout:
    """Rotated surface code on a ``d x d`` data patch.

    Face ``(r, c)`` sits between data ``(r, c)`` and ``(r+1, c+1)``; faces
    with even ``r + c`` are X-type.  Weight-2 X faces line the top and
    bottom edges and weight-2 Z faces the left and right ones.  Checks run
    the usual interleaved order (X: NW NE SW SE, Z: NW SW NE SE), which
    keeps hook errors perpendicular to the logical operator they could
    shorten.
    """
    def q(r, c):
        return r * d + c

    checks: List[Check] = []
    corners: List[Dict[str, int]] = []
    for r in range(-1, d):
        for c in range(-1, d):
            typ = "X" if (r + c) % 2 == 0 else "Z"
            interior = 0 <= r < d - 1 and 0 <= c < d - 1
            top_bottom = (r in (-1, d - 1)) and 0 <= c < d - 1 and typ == "X"
            sides = (c in (-1, d - 1)) and 0 <= r < d - 1 and typ == "Z"
            if not (interior or top_bottom or sides):
                continue
            pos = {}
            for name, (rr, cc) in {"NW": (r, c), "NE": (r, c + 1), "SW": (r + 1, c), "SE": (r + 1, c + 1)}.items():
                if 0 <= rr < d and 0 <= cc < d:
                    pos[name] = q(rr, cc)
            order = ("NW", "NE", "SW", "SE") if typ == "X" else ("NW", "SW", "NE", "SE")
            support = tuple(pos[k] for k in order if k in pos)
            checks.append(Check(typ, support, d * d + len(checks), (2 * c + 2, 2 * r + 2)))
            corners.append(pos)
    layers: List[List[Tuple[int, int]]] = [[] for _ in range(4)]
    for ci, ch in enumerate(checks):
        order = ("NW", "NE", "SW", "SE") if ch.type == "X" else ("NW", "SW", "NE", "SE")
        for t, k in enumerate(order):
            if k in corners[ci]:
                layers[t].append((ci, corners[ci][k]))
    return CodeLayout(
        name=f"rotated_surface-{d}",
        num_data=d * d,
        data_coords=[(2 * c + 1, 2 * r + 1) for r in range(d) for c in range(d)],
        checks=checks,
        stabilizers=[(ch.type, (i,)) for i, ch in enumerate(checks)],
        logical_z=[tuple(q(0, c) for c in range(d))],
        schedule=[layers],
        logical_x=[tuple(q(r, 0) for r in range(d))],
    )


def bacon_shor_layout(m1: int, m2: int) -> CodeLayout:
    """Bacon-Shor code on an ``m1 x m2`` grid (rows x columns).

    Gauges are vertical ``XX`` pairs and horizontal ``ZZ`` pairs, each
    with one ancilla.  Z stabilizers are products of the ZZ gauges joining
    two neighbouring columns; X stabilizers products of the XX gauges
    joining two neighbouring rows.  ZZ gauges are measured first, then XX.
    Logical Z is column 0.
    """
    def q(r, c):
        return r * m2 + c

    nd = m1 * m2
    checks: List[Check] = []
    z_by_col: Dict[int, List[int]] = {}
    x_by_row: Dict[int, List[int]] = {}
    for r in range(m1):
        for c in range(m2 - 1):
            z_by_col.setdefault(c, []).append(len(checks))
            checks.append(Check("Z", (q(r, c), q(r, c + 1)), nd + len(checks), (2 * c + 1, 2 * r)))
    for r in range(m1 - 1):
        for c in range(m2):
            x_by_row.setdefault(r, []).append(len(checks))
            checks.append(Check("X", (q(r, c), q(r + 1, c)), nd + len(checks), (2 * c, 2 * r + 1)))
    stabs = [("Z", tuple(z_by_col[c])) for c in range(m2 - 1)] + [("X", tuple(x_by_row[r])) for r in range(m1 - 1)]

    def phase(typ):
        idx = [i for i, ch in enumerate(checks) if ch.type == typ]
        return [[(i, checks[i].support[0]) for i in idx], [(i, checks[i].support[1]) for i in idx]]

    return CodeLayout(
        name=f"bacon_shor-{m1}x{m2}",
        num_data=nd,
        data_coords=[(2 * c, 2 * r) for r in range(m1) for c in range(m2)],
        checks=checks,
        stabilizers=stabs,
        logical_z=[tuple(q(r, 0) for r in range(m1))],
        schedule=[phase("Z"), phase("X")],
        logical_x=[tuple(q(0, c) for c in range(m2))],
    )


_HAMMING = [(0, 2, 4, 6), (1, 2, 5, 6), (3, 4, 5, 6)]
_STEANE_LOGICAL = (0, 1, 2)


@lru_cache(maxsize=None)
def _steane_structure(level: int):
    """Stabilizer supports (shared by X and Z) and a weight-3^m logical."""
    if level == 1:
        return [tuple(s) for s in _HAMMING], _STEANE_LOGICAL
    inner, inner_log = _steane_structure(level - 1)
    block = 7 ** (level - 1)
    stabs = []
    for b in range(7):
        stabs += [tuple(b * block + q for q in s) for s in inner]
    for s in _HAMMING:
        stabs.append(tuple(sorted(b * block + q for b in s for q in inner_log)))
    logical = tuple(sorted(b * block + q for b in _STEANE_LOGICAL for q in inner_log))
    return stabs, logical


def steane_concat_layout(level: int, flags: bool = False) -> CodeLayout:
    """Steane code concatenated ``level`` times, ``[[7^m, 1, 3^m]]``.

    Outer-level checks act on the inner blocks' weight-3 logical operators.
    Each stabilizer is measured with one ancilla.  With ``flags`` every
    check also gets a flag qubit: with bare ancillas a single fault in the
    middle of a weight-4 check leaves a weight-2 data error that the
    Hamming syndrome confuses with a different single-qubit error.
    """
    if level < 1:
        raise ValueError("concatenation level must be at least 1")
    supports, logical = _steane_structure(level)
    nd = 7 ** level
    checks: List[Check] = []
    for typ in ("Z", "X"):
        for i, s in enumerate(supports):
            checks.append(Check(typ, s, nd + len(checks), (float(np.mean(s)), 1.0 if typ == "Z" else 2.0, float(i))))
    if flags:
        base = nd + len(checks)
        checks = [replace(ch, flag=base + i) for i, ch in enumerate(checks)]
    layout = CodeLayout(
        name=f"steane_concat-{level}",
        num_data=nd,
        data_coords=[(float(q), 0.0) for q in range(nd)],
        checks=checks,
        stabilizers=[(ch.type, (i,)) for i, ch in enumerate(checks)],
        logical_z=[logical],
        schedule=[],
        logical_x=[logical],
    )
    layout.schedule = default_schedule(checks)
    return layout


def _cyclic(n: int, k: int) -> np.ndarray:
    return np.roll(np.eye(n, dtype=np.uint8), k, axis=1)


def bb_matrices(l: int = 12, m: int = 6, a_terms=(("x", 3), ("y", 1), ("y", 2)), b_terms=(("y", 3), ("x", 1), ("x", 2))):
    """Term matrices of a bivariate bicycle code; ``A`` and ``B`` are their sums."""
    x = np.kron(_cyclic(l, 1), np.eye(m, dtype=np.uint8))
    y = np.kron(np.eye(l, dtype=np.uint8), _cyclic(m, 1))

    def mono(var, e):
        base = x if var == "x" else y
        return np.linalg.matrix_power(base.astype(np.int64), e).astype(np.uint8) % 2

    A_terms = [mono(v, e) for v, e in a_terms]
    B_terms = [mono(v, e) for v, e in b_terms]
    return A_terms, B_terms


def bivariate_bicycle_layout(l: int = 12, m: int = 6, a_terms=(("x", 3), ("y", 1), ("y", 2)),
                             b_terms=(("y", 3), ("x", 1), ("x", 2))) -> CodeLayout:
    """Bivariate bicycle code; the defaults give the gross ``[[144, 12, 12]]`` code.

    ``H_X = [A | B]`` and ``H_Z = [B^T | A^T]``.  Each check is read out by
    one ancilla in six CX layers, one per polynomial term, so within a
    layer every check touches a different data qubit.
    """
    A_terms, B_terms = bb_matrices(l, m, a_terms, b_terms)
    half = l * m
    nd = 2 * half
    A = sum(A_terms) % 2
    B = sum(B_terms) % 2
    HX = np.hstack([A, B]).astype(np.uint8)
    HZ = np.hstack([B.T, A.T]).astype(np.uint8)
    checks: List[Check] = []
    layers_z: List[List[Tuple[int, int]]] = [[] for _ in range(6)]
    layers_x: List[List[Tuple[int, int]]] = [[] for _ in range(6)]
    # Z check i: left block through B^T terms, right block through A^T terms
    z_terms = [(Bt.T, 0) for Bt in B_terms] + [(At.T, half) for At in A_terms]
    x_terms = [(At, 0) for At in A_terms] + [(Bt, half) for Bt in B_terms]
    for i in range(half):
        sup = tuple(int(np.flatnonzero(M[i])[0]) + off for M, off in z_terms)
        checks.append(Check("Z", sup, nd + len(checks), (i // m, i % m, 1)))
    for i in range(half):
        sup = tuple(int(np.flatnonzero(M[i])[0]) + off for M, off in x_terms)
        checks.append(Check("X", sup, nd + len(checks), (i // m, i % m, 2)))
    for ci, ch in enumerate(checks):
        target = layers_z if ch.type == "Z" else layers_x
        for t, qd in enumerate(ch.support):
            target[t].append((ci, qd))
    # logical Z operators: ker(H_X) modulo rowspace(H_Z)
    kernel = gf2.nullspace(HX)
    logicals = gf2.complement_basis(HZ, kernel)
    return CodeLayout(
        name=f"bivariate_bicycle-{l}x{m}",
        num_data=nd,
        data_coords=[(float(j // m), float(j % m), float(j // half)) for j in range(nd)],
        checks=checks,
        stabilizers=[(ch.type, (i,)) for i, ch in enumerate(checks)],
        logical_z=[tuple(int(v) for v in np.flatnonzero(row)) for row in logicals],
        schedule=[layers_z + layers_x],
    )
