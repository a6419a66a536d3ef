"""Belief propagation with ordered-statistics post-processing.

BP is the flooding min-sum variant with a fixed scaling factor.  When BP
fails to reproduce the syndrome, columns are ordered by their posterior
error likelihood and the first independent ones form an information set on
which the syndrome equation is solved exactly (OSD-0).  A positive
``osd_order`` additionally tries every flip pattern of that many of the
most likely non-pivot columns and keeps the lightest solution.
"""
from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from .. import gf2
from ..sim.dem import CheckMatrix

MS_SCALING = 0.625


class BPOSD:
    """Reusable decoder for one check matrix.

    Parameters
    ----------
    H : CheckMatrix
    max_iters : int
    osd_order : int
    scaling : float
        Min-sum scaling factor.
    """

    def __init__(self, H: CheckMatrix, max_iters: int = 50, osd_order: int = 0, scaling: float = MS_SCALING):
        self.H = H
        self.max_iters = int(max_iters)
        self.osd_order = int(osd_order)
        self.scaling = float(scaling)
        Hm = H.H.astype(bool)
        m, n = Hm.shape
        self.m, self.n = m, n
        ci, vj = np.nonzero(Hm)  # sorted by check
        self.edge_check = ci
        self.edge_var = vj
        self.check_start = np.searchsorted(ci, np.arange(m))
        self.check_deg = np.bincount(ci, minlength=m)
        p = np.clip(H.priors, 1e-15, 1 - 1e-15)
        self.prior_llr = np.log((1 - p) / p)
        self._Hint = Hm.astype(np.uint8)
        self._var_order = np.argsort(vj, kind="stable")
        sv = vj[self._var_order]
        self._var_starts = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]]) if sv.size else np.zeros(0, dtype=np.int64)
        self._var_ids = sv[self._var_starts] if sv.size else np.zeros(0, dtype=np.int64)

    def _scatter(self, vals: np.ndarray) -> np.ndarray:
        """Per-variable sum of edge values, row by row."""
        out = np.zeros((vals.shape[0], self.n))
        if self._var_ids.size:
            out[:, self._var_ids] = np.add.reduceat(vals[:, self._var_order], self._var_starts, axis=1)
        return out

    # -- BP --------------------------------------------------------------------

    def _bp(self, syndromes: np.ndarray):
        """Vectorised min-sum over a batch; returns (hard, posterior, converged)."""
        S = syndromes.shape[0]
        E = self.edge_var.size
        llr = np.broadcast_to(self.prior_llr, (S, self.n))
        hard = np.zeros((S, self.n), dtype=bool)
        post = np.array(llr, dtype=float)
        converged = ~syndromes.any(axis=1)
        if E == 0:
            return hard, post, converged
        active = np.where(~converged)[0]
        ev, ec = self.edge_var, self.edge_check
        starts = self.check_start
        syn_sign = np.where(syndromes, -1.0, 1.0)
        r = np.zeros((S, E))
        nonempty = self.check_deg > 0
        st = starts[nonempty]
        for _ in range(self.max_iters):
            if active.size == 0:
                break
            ra = r[active]
            # variable to check
            tot = llr[active] + self._scatter(ra)
            q = tot[:, ev] - ra
            aq = np.abs(q)
            neg = q < 0
            # check to variable: sign parity and the two smallest magnitudes
            par = np.zeros((active.size, self.m), dtype=np.int64)
            par[:, nonempty] = np.add.reduceat(neg.astype(np.int64), st, axis=1)
            min1 = np.full((active.size, self.m), np.inf)
            min1[:, nonempty] = np.minimum.reduceat(aq, st, axis=1)
            is_min = aq == min1[:, ec]
            idx = np.where(is_min, np.arange(E)[None, :], E)
            first = np.full((active.size, self.m), E)
            first[:, nonempty] = np.minimum.reduceat(idx, st, axis=1)
            aq2 = aq.copy()
            rr = np.arange(active.size)[:, None]
            fm = first[:, nonempty]
            aq2[np.broadcast_to(rr, fm.shape), np.minimum(fm, E - 1)] = np.inf
            min2 = np.full((active.size, self.m), np.inf)
            min2[:, nonempty] = np.minimum.reduceat(aq2, st, axis=1)
            excl = np.where(np.arange(E)[None, :] == first[:, ec], min2[:, ec], min1[:, ec])
            sign = np.where(((par[:, ec] - neg) % 2) == 1, -1.0, 1.0) * syn_sign[active][:, ec]
            excl = np.where(np.isfinite(excl), excl, 0.0)
            ra = self.scaling * sign * excl
            r[active] = ra
            post_a = llr[active] + self._scatter(ra)
            post[active] = post_a
            h = post_a < 0
            hard[active] = h
            ok = ~((h.astype(np.uint8) @ self._Hint.T) % 2 != syndromes[active]).any(axis=1)
            converged[active[ok]] = True
            active = active[~ok]
        return hard, post, converged

    # -- OSD -------------------------------------------------------------------

    def _osd(self, syndrome: np.ndarray, posterior: np.ndarray) -> np.ndarray:
        order = np.argsort(posterior, kind="stable")
        red = gf2.gauss_jordan(self._Hint, extra=syndrome[:, None].astype(np.uint8), order=order)
        ext = red.extra()[:, 0]
        e = np.zeros(self.n, dtype=bool)
        for r, col in enumerate(red.pivots):
            e[col] = bool(ext[r])
        if self.osd_order <= 0:
            return e
        pivset = set(red.pivots)
        rest = [int(c) for c in order if int(c) not in pivset][: self.osd_order]
        if not rest:
            return e
        R = red.dense()  # columns are in scan order
        pos = np.empty(self.n, dtype=np.int64)
        pos[order] = np.arange(self.n)
        cost_w = np.where(self.prior_llr > 0, self.prior_llr, 0.0)
        best, best_cost = e, float(cost_w[e].sum())
        piv_arr = np.array(red.pivots, dtype=np.int64)
        for pattern in itertools.product([0, 1], repeat=len(rest)):
            if not any(pattern):
                continue
            flip = [c for c, b in zip(rest, pattern) if b]
            rhs = ext[: red.rank].astype(bool).copy()
            for c in flip:
                rhs ^= R[: red.rank, pos[c]].astype(bool)
            cand = np.zeros(self.n, dtype=bool)
            cand[piv_arr] = rhs
            cand[flip] = True
            cost = float(cost_w[cand].sum())
            if cost < best_cost:
                best, best_cost = cand, cost
        return best

    # -- public ----------------------------------------------------------------

    def decode_errors(self, syndromes: np.ndarray) -> np.ndarray:
        """Estimated error vectors for a batch of syndromes."""
        syndromes = np.atleast_2d(np.asarray(syndromes, dtype=bool))
        if syndromes.shape[1] != self.m:
            raise ValueError(f"expected {self.m} detector bits per shot, got {syndromes.shape[1]}")
        hard, post, conv = self._bp(syndromes)
        for s in np.flatnonzero(~conv):
            hard[s] = self._osd(syndromes[s], post[s])
        return hard

    def decode_batch(self, syndromes: np.ndarray) -> np.ndarray:
        syndromes = np.atleast_2d(np.asarray(syndromes, dtype=bool))
        if syndromes.shape[0] == 0:
            return np.zeros((0, self.H.num_observables), dtype=bool)
        uniq, inv = np.unique(syndromes, axis=0, return_inverse=True)
        e = self.decode_errors(uniq)
        pred = (e.astype(np.uint8) @ self.H.L.T.astype(np.uint8)) % 2
        return pred.astype(bool)[np.asarray(inv).reshape(-1)]

    def decode(self, syndrome: np.ndarray) -> np.ndarray:
        e = self.decode_errors(np.asarray(syndrome, dtype=bool)[None, :])[0]
        return ((self.H.L.astype(np.uint8) @ e.astype(np.uint8)) % 2).astype(bool)


def bposd_decode(H: CheckMatrix, events, variant: str = "batch", max_iters: int = 50,
                 osd_order: int = 0, decoder: Optional[BPOSD] = None) -> np.ndarray:
    """Decode one shot or a table of shots with BP-OSD.

    ``variant="parity_check"`` decodes shot by shot against ``H``;
    ``variant="batch"`` decodes the distinct syndromes of the table in one
    vectorised BP pass.  Both give the same predictions.
    """
    if variant not in ("parity_check", "batch"):
        raise ValueError(f"unknown variant {variant!r}")
    dec = decoder or BPOSD(H, max_iters=max_iters, osd_order=osd_order)
    events = np.asarray(events, dtype=bool)
    single = events.ndim == 1
    table = events[None, :] if single else events
    if table.shape[1] != H.num_detectors:
        raise ValueError(f"events have {table.shape[1]} bits but H has {H.num_detectors} rows")
    if variant == "batch":
        out = dec.decode_batch(table)
    else:
        out = np.zeros((table.shape[0], H.num_observables), dtype=bool)
        for s in range(table.shape[0]):
            if table[s].any():
                out[s] = dec.decode(table[s])
    return out[0] if single else out
