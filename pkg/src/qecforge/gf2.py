"""Linear algebra over GF(2) on bit-packed rows."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .sim import bits


@dataclass
class Reduced:
    """Result of Gauss-Jordan elimination.

    Attributes
    ----------
    rows : numpy.ndarray
        Packed reduced matrix (``m`` rows, columns followed by the extra columns).
    pivots : list of int
        Pivot column of reduced row ``i``.
    num_cols : int
        Number of matrix columns (extra columns excluded).
    num_extra : int
    """

    rows: np.ndarray
    pivots: List[int]
    num_cols: int
    num_extra: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def dense(self) -> np.ndarray:
        full = bits.unpack(self.rows, self.num_cols + self.num_extra)
        return full[:, : self.num_cols].astype(np.uint8)

    def extra(self) -> np.ndarray:
        full = bits.unpack(self.rows, self.num_cols + self.num_extra)
        return full[:, self.num_cols:].astype(np.uint8)


def gauss_jordan(A: np.ndarray, extra: Optional[np.ndarray] = None, order: Optional[np.ndarray] = None,
                 stop_at_rank: Optional[int] = None) -> Reduced:
    """Reduce ``[A | extra]`` to reduced row echelon form.

    Columns are scanned in ``order`` (default left to right), so the pivots
    form the first independent columns in that order.  Returned pivot
    indices refer to the original column numbering.
    """
    A = np.asarray(A, dtype=bool)
    m, n = A.shape
    if order is not None:
        order = np.asarray(order, dtype=np.int64)
        A = A[:, order]
    k = 0
    if extra is not None:
        extra = np.asarray(extra, dtype=bool).reshape(m, -1)
        k = extra.shape[1]
        A = np.concatenate([A, extra], axis=1)
    P = bits.pack(A) if m else np.zeros((0, bits.num_words(n + k)), dtype=np.uint64)
    pivots: List[int] = []
    row = 0
    limit = m if stop_at_rank is None else min(m, stop_at_rank)
    for j in range(n):
        if row >= limit:
            break
        w = j >> 6
        sh = np.uint64(j & 63)
        col = (P[row:, w] >> sh) & np.uint64(1)
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            P[[row, piv]] = P[[piv, row]]
        hit = np.flatnonzero((P[:, w] >> sh) & np.uint64(1))
        hit = hit[hit != row]
        if hit.size:
            P[hit] ^= P[row]
        pivots.append(j)
        row += 1
    if order is not None:
        pivots = [int(order[j]) for j in pivots]
    return Reduced(P, pivots, n, k)


def rank(A: np.ndarray) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return gauss_jordan(A).rank


def nullspace(A: np.ndarray) -> np.ndarray:
    """Basis (as rows) of ``{x : A x = 0}``."""
    A = np.asarray(A, dtype=np.uint8)
    m, n = A.shape
    red = gauss_jordan(A)
    R = red.dense()
    pivset = set(red.pivots)
    free = [j for j in range(n) if j not in pivset]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(red.pivots):
            if R[r, f]:
                basis[i, p] = 1
    return basis


def solve(A: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """One solution of ``A x = b`` (free variables zero), or None."""
    A = np.asarray(A, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8).reshape(-1)
    red = gauss_jordan(A, extra=b[:, None])
    ext = red.extra()[:, 0]
    if ext[red.rank:].any():
        return None
    x = np.zeros(A.shape[1], dtype=np.uint8)
    for r, p in enumerate(red.pivots):
        x[p] = ext[r]
    return x


def in_rowspace(A: np.ndarray, v: np.ndarray) -> bool:
    A = np.asarray(A, dtype=np.uint8)
    if A.shape[0] == 0:
        return not np.asarray(v).any()
    return rank(np.vstack([A, np.asarray(v, dtype=np.uint8)[None]])) == rank(A)


def complement_basis(span: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Rows of ``candidates`` that extend ``span`` to larger ranks, greedily."""
    span = np.asarray(span, dtype=np.uint8)
    keep = []
    current = span.copy()
    r = rank(current) if current.size else 0
    for v in np.asarray(candidates, dtype=np.uint8):
        trial = np.vstack([current, v[None]]) if current.size else v[None]
        rr = rank(trial)
        if rr > r:
            keep.append(v)
            current, r = trial, rr
    n = span.shape[1] if span.ndim == 2 else candidates.shape[1]
    return np.array(keep, dtype=np.uint8).reshape(len(keep), n)
