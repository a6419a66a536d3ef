"""CHP stabilizer tableau with packed sign lanes.

The tableau keeps one shared X/Z matrix and stores the sign of every row as
a vector of uint64 *lanes*.  Pauli noise and measurement outcomes only ever
change signs, never the X/Z part, so the same matrix can serve many
purposes at once:

* ``mode="shots"``: lane bit ``s`` is the sign in Monte-Carlo shot ``s``.
  Random measurement outcomes are fresh random bits per shot.
* ``mode="symbolic"``: lane bit ``j`` is the coefficient of the GF(2)
  variable ``j``; bit 0 is the constant term and each random measurement
  introduces a new variable.  A measurement outcome is then an affine form
  over the random choices, which is how detector determinism is checked.

Rowsum's phase correction depends only on the X/Z parts, so it is the same
constant for every lane.
"""
from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from .. import gates
from ..circuit import Circuit
from . import bits
from .rng import uniforms


class NonCliffordError(ValueError):
    """Raised for instructions the stabilizer simulator cannot apply."""


def _phase_sum(x1, z1, x2, z2) -> np.ndarray:
    """Sum over qubits of the CHP ``g`` function, reduced mod 4, per row of x2/z2."""
    x1 = x1.astype(np.int8)
    z1 = z1.astype(np.int8)
    x2 = x2.astype(np.int8)
    z2 = z2.astype(np.int8)
    g = (x1 & z1) * (z2 - x2) + (x1 & (1 - z1)) * z2 * (2 * x2 - 1) + ((1 - x1) & z1) * x2 * (1 - 2 * z2)
    return g.sum(axis=-1, dtype=np.int64) % 4


class Tableau:
    """Stabilizer state of ``n`` qubits, initialised to ``|0...0>``.

    Parameters
    ----------
    num_qubits : int
    num_lanes : int
        Number of sign bits per row (shots, or symbolic variables + 1).
    mode : {"shots", "symbolic"}
    seed : int, optional
        Only used in shots mode for random measurement outcomes.
    """

    def __init__(self, num_qubits: int, num_lanes: int = 1, mode: str = "shots", seed: Optional[int] = None):
        if mode not in ("shots", "symbolic"):
            raise ValueError(f"unknown mode {mode!r}")
        n = int(num_qubits)
        self.n = n
        self.mode = mode
        self.num_lanes = int(num_lanes)
        self.words = bits.num_words(self.num_lanes)
        self.x = np.zeros((2 * n + 1, n), dtype=bool)
        self.z = np.zeros((2 * n + 1, n), dtype=bool)
        idx = np.arange(n)
        self.x[idx, idx] = True
        self.z[n + idx, idx] = True
        self.r = np.zeros((2 * n + 1, self.words), dtype=np.uint64)
        if mode == "shots":
            self.one = bits.pack(np.ones(self.num_lanes, dtype=bool))
        else:
            self.one = np.zeros(self.words, dtype=np.uint64)
            self.one[0] = np.uint64(1)
        self._next_var = 1
        self._rng = np.random.default_rng(seed)

    # -- randomness --------------------------------------------------------

    def fresh(self) -> np.ndarray:
        """Lane vector for a uniformly random measurement outcome."""
        if self.mode == "shots":
            return bits.pack(self._rng.random(self.num_lanes) < 0.5)
        j = self._next_var
        if j >= self.words * 64:
            raise RuntimeError("symbolic tableau ran out of variable lanes")
        out = np.zeros(self.words, dtype=np.uint64)
        out[j // 64] = np.uint64(1) << np.uint64(j % 64)
        self._next_var += 1
        return out

    @property
    def num_variables(self) -> int:
        return self._next_var - 1

    # -- primitive gates ---------------------------------------------------

    def h(self, a: int) -> None:
        xa, za = self.x[:, a].copy(), self.z[:, a].copy()
        flip = xa & za
        if flip.any():
            self.r[flip] ^= self.one
        self.x[:, a], self.z[:, a] = za, xa

    def s(self, a: int) -> None:
        xa, za = self.x[:, a], self.z[:, a]
        flip = xa & za
        if flip.any():
            self.r[flip] ^= self.one
        self.z[:, a] = za ^ xa

    def cx(self, a: int, b: int) -> None:
        xa, za, xb, zb = self.x[:, a], self.z[:, a], self.x[:, b], self.z[:, b]
        flip = xa & zb & ~(xb ^ za)
        if flip.any():
            self.r[flip] ^= self.one
        self.x[:, b] = xb ^ xa
        self.z[:, a] = za ^ zb

    def apply_gate(self, name: str, targets: Sequence[int], params: Sequence[float] = ()) -> None:
        """Apply one unitary gate application to ``targets``."""
        if name not in gates.UNITARY_GATES:
            raise NonCliffordError(f"{name!r} is not a supported Clifford gate")
        for prim, local in gates.decompose(name, params):
            q = [targets[i] for i in local]
            if prim == "H":
                self.h(q[0])
            elif prim == "S":
                self.s(q[0])
            else:
                self.cx(q[0], q[1])

    # -- Pauli sign flips --------------------------------------------------

    def apply_pauli(self, a: int, letter: str, mask: np.ndarray) -> None:
        """Apply ``letter`` on qubit ``a`` in the lanes set in ``mask``."""
        if letter == "I":
            return
        n2 = 2 * self.n
        if letter == "X":
            rows = self.z[:n2, a]
        elif letter == "Z":
            rows = self.x[:n2, a]
        elif letter == "Y":
            rows = self.x[:n2, a] ^ self.z[:n2, a]
        else:
            raise ValueError(f"bad Pauli letter {letter!r}")
        if rows.any():
            self.r[:n2][rows] ^= mask

    # -- measurement -------------------------------------------------------

    def _rowsum(self, targets: np.ndarray, i: int) -> None:
        """Row ``h`` <- row ``h`` * row ``i`` for every ``h`` in ``targets``."""
        if targets.size == 0:
            return
        c = _phase_sum(self.x[i], self.z[i], self.x[targets], self.z[targets])
        self.r[targets] ^= self.r[i]
        odd = (c // 2).astype(bool)
        if odd.any():
            self.r[targets[odd]] ^= self.one
        self.x[targets] ^= self.x[i]
        self.z[targets] ^= self.z[i]

    def peek_deterministic(self, a: int) -> bool:
        return not self.x[self.n:2 * self.n, a].any()

    def measure(self, a: int) -> np.ndarray:
        """Z-basis measurement of qubit ``a``; returns the outcome lanes."""
        n = self.n
        stab = np.flatnonzero(self.x[n:2 * n, a])
        if stab.size:
            p = n + int(stab[0])
            rows = np.flatnonzero(self.x[:2 * n, a])
            rows = rows[rows != p]
            self._rowsum(rows, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, a] = True
            self.r[p] = self.fresh()
            return self.r[p].copy()
        s = 2 * n
        self.x[s] = False
        self.z[s] = False
        self.r[s] = 0
        for i in np.flatnonzero(self.x[:n, a]):
            self._rowsum(np.array([s]), int(i) + n)
        return self.r[s].copy()

    def reset(self, a: int) -> None:
        """Reset to |0>: measure, then flip back where the outcome was 1."""
        out = self.measure(a)
        self.apply_pauli(a, "X", out)

    # -- inspection ----------------------------------------------------------

    def symplectic_ok(self) -> bool:
        """Rows form a symplectic basis (destabilizer i pairs with stabilizer i)."""
        n = self.n
        x = self.x[:2 * n].astype(np.int64)
        z = self.z[:2 * n].astype(np.int64)
        form = (x @ z.T + z @ x.T) % 2
        want = np.zeros((2 * n, 2 * n), dtype=np.int64)
        want[:n, n:] = np.eye(n, dtype=np.int64)
        want[n:, :n] = np.eye(n, dtype=np.int64)
        return bool(np.array_equal(form, want))

    def signs(self, lane: int = 0) -> np.ndarray:
        """Sign bits of all 2n rows in one lane."""
        w, b = divmod(lane, 64)
        return ((self.r[:2 * self.n, w] >> np.uint64(b)) & np.uint64(1)).astype(bool)

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "Tableau":
        """Tableau of the unitary part of ``circuit`` (single deterministic lane).

        Used for equivalence checks; rows ``0..n-1`` hold the images of
        ``X_q`` and rows ``n..2n-1`` the images of ``Z_q``.
        """
        t = cls(circuit.num_qubits, 1, mode="shots")
        for ins in circuit:
            if ins.kind == "gate":
                for grp in ins.groups():
                    t.apply_gate(ins.name, grp, ins.params)
            elif ins.kind in ("measure", "reset"):
                raise NonCliffordError("unitary tableau needs a circuit without measurements or resets")
        return t

    def images(self):
        """``(x, z, sign)`` of the 2n generator images."""
        n = self.n
        return self.x[:2 * n].copy(), self.z[:2 * n].copy(), self.signs(0)


def unitary_equal(a: Circuit, b: Circuit, in_perm: Optional[Sequence[int]] = None,
                  out_perm: Optional[Sequence[int]] = None, check_signs: bool = True) -> bool:
    """Whether ``b`` implements ``a`` up to qubit relabelings.

    ``in_perm[q]`` is the qubit of ``b`` that carries qubit ``q`` of ``a`` at
    the start, ``out_perm[q]`` at the end.  Both circuits must have the same
    qubit count.  Global phase is ignored.
    """
    n = a.num_qubits
    if b.num_qubits != n:
        raise ValueError("circuits must have the same number of qubits")
    in_perm = list(range(n)) if in_perm is None else list(in_perm)
    out_perm = list(range(n)) if out_perm is None else list(out_perm)
    ta, tb = Tableau.from_circuit(a), Tableau.from_circuit(b)
    xa, za, sa = ta.images()
    xb, zb, sb = tb.images()
    rows_b = [in_perm[q] for q in range(n)] + [n + in_perm[q] for q in range(n)]
    xb, zb, sb = xb[rows_b], zb[rows_b], sb[rows_b]
    # column out_perm[q] of b corresponds to column q of a
    xb, zb = xb[:, out_perm], zb[:, out_perm]
    if not (np.array_equal(xa, xb) and np.array_equal(za, zb)):
        return False
    return bool(not check_signs or np.array_equal(sa, sb))


def _apply_noise_mc(t: Tableau, ins, seed: int, stream: int, shot_start: int) -> None:
    comps = gates.noise_components(ins.name, ins.params)
    groups = ins.groups()
    u = uniforms(seed, stream, shot_start, t.num_lanes, len(groups))
    for g, grp in enumerate(groups):
        lo = 0.0
        for pauli, p in comps:
            if p <= 0:
                continue
            hit = (u[:, g] >= lo) & (u[:, g] < lo + p)
            lo += p
            if not hit.any():
                continue
            mask = bits.pack(hit)
            for q, letter in zip(grp, pauli):
                t.apply_pauli(q, letter, mask)


_OWN_STREAMS = 1 << 48


def tableau_run(circuit: Circuit, seed: int = 0, shots: int = 1, shot_start: int = 0,
                share_noise: bool = False) -> np.ndarray:
    """Monte-Carlo tableau simulation.

    All shots share one tableau whose sign lanes are the shots.  By default
    noise is drawn from streams disjoint from the frame sampler's, so the two
    simulators are statistically independent.  With ``share_noise`` both use
    the same noise draws and their detector samples must agree shot by shot.

    Returns
    -------
    numpy.ndarray
        ``(shots, num_measurements)`` bool measurement record; for
        ``shots=1`` a 1-D array.
    """
    single = shots == 1
    t = Tableau(circuit.num_qubits, shots, mode="shots", seed=[int(seed), 0x5EED, int(shot_start)])
    record: List[np.ndarray] = []
    for pos, ins in enumerate(circuit):
        kind = ins.kind
        if kind == "gate":
            for grp in ins.groups():
                t.apply_gate(ins.name, grp, ins.params)
        elif kind == "noise":
            _apply_noise_mc(t, ins, seed, pos if share_noise else pos + _OWN_STREAMS, shot_start)
        elif kind == "measure":
            for q in ins.targets:
                out = t.measure(q)
                record.append(out)
                if ins.name == "MR":
                    t.apply_pauli(q, "X", out)
        elif kind == "reset":
            for q in ins.targets:
                t.reset(q)
    if record:
        rec = bits.unpack(np.stack(record), shots).T
    else:
        rec = np.zeros((shots, 0), dtype=bool)
    return rec[0] if single else rec


def symbolic_record(circuit: Circuit) -> np.ndarray:
    """Affine forms of every measurement of the noiseless circuit.

    Returns a ``(num_measurements, words)`` uint64 array.  Bit 0 of each
    form is the reference outcome (all random choices set to 0); any other
    set bit means the outcome depends on a random measurement.
    """
    c = circuit.without_noise()
    nvars = sum(len(i.targets) for i in c if i.kind in ("measure", "reset"))
    t = Tableau(c.num_qubits, nvars + 1, mode="symbolic")
    forms: List[np.ndarray] = []
    for ins in c:
        kind = ins.kind
        if kind == "gate":
            for grp in ins.groups():
                t.apply_gate(ins.name, grp, ins.params)
        elif kind == "measure":
            for q in ins.targets:
                out = t.measure(q)
                forms.append(out)
                if ins.name == "MR":
                    t.apply_pauli(q, "X", out)
        elif kind == "reset":
            for q in ins.targets:
                t.reset(q)
    if not forms:
        return np.zeros((0, t.words), dtype=np.uint64)
    return np.stack(forms)


class NondeterministicError(ValueError):
    """A detector or observable is not deterministic in the noiseless circuit."""


def reference_sample(circuit: Circuit, check: bool = True):
    """Noiseless reference record plus detector/observable reference values.

    Returns
    -------
    (record, det_ref, obs_ref) : tuple of bool arrays
    """
    forms = symbolic_record(circuit)
    record = (forms[:, 0] & np.uint64(1)).astype(bool) if len(forms) else np.zeros(0, dtype=bool)
    dets, obs = circuit.detector_records()
    words = forms.shape[1] if len(forms) else 1

    def combine(recs, label):
        acc = np.zeros(words, dtype=np.uint64)
        for r in recs:
            acc ^= forms[r]
        rnd = acc.copy()
        rnd[0] &= ~np.uint64(1)
        if check and rnd.any():
            raise NondeterministicError(f"{label} is not deterministic in the noiseless circuit")
        return bool(acc[0] & np.uint64(1))

    det_ref = np.array([combine(d, f"detector D{i}") for i, d in enumerate(dets)], dtype=bool)
    obs_ref = np.array(
        [combine(obs.get(k, []), f"observable L{k}") for k in range(circuit.num_observables)], dtype=bool
    )
    return record, det_ref, obs_ref


def tableau_sample_detectors(circuit: Circuit, shots: int, seed: int = 0, share_noise: bool = False):
    """Detector and observable flips from tableau Monte-Carlo (oracle path)."""
    rec = tableau_run(circuit, seed=seed, shots=max(shots, 2), share_noise=share_noise)[:shots]
    _, det_ref, obs_ref = reference_sample(circuit)
    dets, obs = circuit.detector_records()
    D = np.zeros((shots, len(dets)), dtype=bool)
    for i, d in enumerate(dets):
        D[:, i] = np.logical_xor.reduce(rec[:, d], axis=1) if d else False
        D[:, i] ^= det_ref[i]
    O = np.zeros((shots, circuit.num_observables), dtype=bool)
    for k in range(circuit.num_observables):
        r = obs.get(k, [])
        if r:
            O[:, k] = np.logical_xor.reduce(rec[:, r], axis=1)
        O[:, k] ^= obs_ref[k]
    return D, O
