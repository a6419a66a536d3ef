"""Exhaustive decoders used as ground truth on small instances."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..sim.dem import CheckMatrix

MAX_COLUMNS = 24
_ROUND = 9  # decimals kept when comparing summed weights


class TooLargeError(ValueError):
    pass


def _columns_as_ints(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    if M.shape[0] == 0:
        return np.zeros(M.shape[1], dtype=np.int64)
    return (M << np.arange(M.shape[0], dtype=np.int64)[:, None]).sum(axis=0)


def _enumerate(synd_cols, obs_cols, weights, log_p, log_q):
    """All subsets of a column block: syndrome, observable, weight, log-prob, bits."""
    k = len(synd_cols)
    size = 1 << k
    s = np.zeros(size, dtype=np.int64)
    o = np.zeros(size, dtype=np.int64)
    w = np.zeros(size)
    lp = np.full(size, float(np.sum(log_q)))
    for j in range(k):
        lo, hi = 1 << j, 1 << (j + 1)
        s[lo:hi] = s[:lo] ^ synd_cols[j]
        o[lo:hi] = o[:lo] ^ obs_cols[j]
        w[lo:hi] = w[:lo] + weights[j]
        lp[lo:hi] = lp[:lo] - log_q[j] + log_p[j]
    return s, o, w, lp


def _lex_key(size_bits: int, offset: int, total: int) -> np.ndarray:
    """Integer whose order is the lexicographic order of the error bit tuple."""
    idx = np.arange(1 << size_bits, dtype=np.int64)
    key = np.zeros_like(idx)
    for j in range(size_bits):
        key |= ((idx >> j) & 1) << (total - 1 - (offset + j))
    return key


def brute_force_decode(H: CheckMatrix, events, mode: str = "error", return_error: bool = False):
    """Exact decoding by enumerating all error subsets.

    Parameters
    ----------
    H : CheckMatrix
        At most 24 columns.
    events : array_like
        Detector bits of one shot.
    mode : {"error", "coset"}
        ``"error"`` returns the observables of the single most likely error
        (ties go to the lexicographically smallest error vector, read as
        ``(e0, e1, ...)``).  ``"coset"`` returns the observable class with
        the largest total probability.

    Returns
    -------
    prediction : numpy.ndarray
        Bool observable bits.  With ``return_error`` (error mode only) the
        chosen error vector is returned as well; it is None when the
        syndrome cannot be produced.
    """
    n = H.num_mechanisms
    if n > MAX_COLUMNS:
        raise TooLargeError(f"{n} columns exceeds the brute-force limit of {MAX_COLUMNS}")
    ev = np.asarray(events, dtype=bool).reshape(-1)
    if ev.size != H.num_detectors:
        raise ValueError("events length does not match H")
    target = int(sum(1 << i for i in np.flatnonzero(ev)))
    sc = _columns_as_ints(H.H)
    oc = _columns_as_ints(H.L)
    p = np.clip(H.priors, 1e-300, 1.0)
    q = np.clip(1 - H.priors, 1e-300, 1.0)
    w = np.log(q / p)
    lp, lq = np.log(p), np.log(q)
    h = n // 2
    sA, oA, wA, lpA = _enumerate(sc[:h], oc[:h], w[:h], lp[:h], lq[:h])
    sB, oB, wB, lpB = _enumerate(sc[h:], oc[h:], w[h:], lp[h:], lq[h:])
    K = H.num_observables
    if mode == "coset":
        # probability mass per (syndrome, observable) of block B
        keyB = sB * (1 << K) + oB
        tot = np.zeros(1 << K)
        pB = np.exp(lpB)
        order = np.argsort(keyB, kind="stable")
        uk, start = np.unique(keyB[order], return_index=True)
        massB = np.add.reduceat(pB[order], start) if uk.size else np.zeros(0)
        lookup = dict(zip(uk.tolist(), massB.tolist()))
        pA = np.exp(lpA)
        for a in range(sA.size):
            sb = target ^ int(sA[a])
            for ob in range(1 << K):
                mass = lookup.get(sb * (1 << K) + ob)
                if mass:
                    tot[ob ^ int(oA[a])] += pA[a] * mass
        best = int(np.argmax(tot))
        pred = np.array([(best >> k) & 1 for k in range(K)], dtype=bool)
        return pred
    if mode != "error":
        raise ValueError(f"unknown mode {mode!r}")
    keyA = _lex_key(h, 0, n)
    keyB = _lex_key(n - h, h, n)
    wA_r, wB_r = np.round(wA, _ROUND), np.round(wB, _ROUND)
    # best B entry per syndrome: minimum weight, then smallest key
    order = np.lexsort((keyB, wB_r, sB))
    s_sorted = sB[order]
    first = np.flatnonzero(np.r_[True, s_sorted[1:] != s_sorted[:-1]])
    bestB = {int(s_sorted[i]): int(order[i]) for i in first}
    best = None
    for a in range(sA.size):
        b = bestB.get(target ^ int(sA[a]))
        if b is None:
            continue
        cand = (round(float(wA[a] + wB[b]), _ROUND), int(keyA[a] | keyB[b]), a, b)
        if best is None or cand[:2] < best[:2]:
            best = cand
    if best is None:
        pred = np.zeros(K, dtype=bool)
        return (pred, None) if return_error else pred
    _, _, a, b = best
    err = np.zeros(n, dtype=bool)
    for j in range(h):
        err[j] = (a >> j) & 1
    for j in range(n - h):
        err[h + j] = (b >> j) & 1
    obs = int(oA[a] ^ oB[b])
    pred = np.array([(obs >> k) & 1 for k in range(K)], dtype=bool)
    return (pred, err) if return_error else pred


@dataclass
class ExactTables:
    """Optimal-decoding tables over every (syndrome, observable) pair.

    Built by dynamic programming over mechanisms, which is affordable when
    ``num_detectors + num_observables`` is small.  ``min_weight[s, o]`` is
    the lowest total weight ``sum ln((1-p)/p)`` of an error with syndrome
    ``s`` and observable flips ``o``; ``count[s, o]`` counts the errors that
    attain it; ``mass[s, o]`` is their total probability.
    """

    min_weight: np.ndarray
    count: np.ndarray
    mass: np.ndarray

    @classmethod
    def build(cls, H: CheckMatrix, tol: float = 1e-9) -> "ExactTables":
        D, K = H.num_detectors, H.num_observables
        if D + K > 24:
            raise TooLargeError("table too large")
        S = 1 << (D + K)
        sc = _columns_as_ints(np.vstack([H.H, H.L]))
        minw = np.full(S, np.inf)
        cnt = np.zeros(S, dtype=np.int64)
        mass = np.zeros(S)
        minw[0], cnt[0], mass[0] = 0.0, 1, 1.0
        idx = np.arange(S, dtype=np.int64)
        for j, p in enumerate(H.priors):
            w = float(np.log((1 - p) / p))
            src = idx ^ int(sc[j])
            shifted_w = minw[src] + w
            shifted_c = cnt[src]
            better = shifted_w < minw - tol
            with np.errstate(invalid="ignore"):
                tie = np.isfinite(shifted_w) & (np.abs(shifted_w - minw) <= tol)
            new_w = np.where(better, shifted_w, minw)
            new_c = np.where(better, shifted_c, np.where(tie, cnt + shifted_c, cnt))
            mass = mass * (1 - p) + mass[src] * p
            minw, cnt = new_w, new_c
        shape = (1 << K, 1 << D)
        # index = s | o << D, so reshape gives [o, s]; transpose to [s, o]
        return cls(minw.reshape(shape).T.copy(), cnt.reshape(shape).T.copy(), mass.reshape(shape).T.copy())

    def syndrome_min_weight(self) -> np.ndarray:
        return self.min_weight.min(axis=1)

    def ml_error_prediction(self, s: int, tol: float = 1e-9) -> Tuple[int, bool]:
        """Observable class of the most likely error and whether that error is unique."""
        row = self.min_weight[s]
        best = float(row.min())
        if not np.isfinite(best):
            return 0, False
        hits = np.flatnonzero(np.abs(row - best) <= tol)
        unique = hits.size == 1 and int(self.count[s, hits[0]]) == 1
        return int(hits[0]), unique

    def ml_coset_prediction(self, s: int) -> int:
        return int(np.argmax(self.mass[s]))
