"""Gate-by-gate circuit-level noise injection.

Noise is inserted around each instruction of a clean circuit; TICKs delimit
moments, and qubits that sit idle inside their live window (first to last
operation) during a moment receive idle noise at its end.  Projecting the
noise channels out of the result gives back the input exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import gates
from .arch import Device
from .circuit import Circuit, Instruction
from .sim.dem import merge_probability

KINDS = ("uniform", "si1000", "device", "code_capacity")
IDLE_MODELS = ("none", "constant", "twirl")
SHUTTLE_MODELS = ("decoherence", "fixed")
DEFAULT_DURATIONS = {"1q": 0.025, "2q": 0.05, "measure": 0.5, "reset": 0.25}

_XX = gates.PAULI_PAIRS.index("XX")


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class PauliProbs:
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        if min(self.p_x, self.p_y, self.p_z) < 0 or self.total > 1 + 1e-12:
            raise NoiseError(f"invalid Pauli probabilities {self.as_tuple()}")

    @property
    def total(self) -> float:
        return self.p_x + self.p_y + self.p_z

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.p_x, self.p_y, self.p_z)


def twirl_idle(dt: float, t1: float, t2: float) -> PauliProbs:
    """Pauli-twirled amplitude and phase damping over ``dt``.

    ``p_x = p_y = (1 - exp(-dt/T1)) / 4`` and
    ``p_z = (1 + exp(-dt/T1) - 2 exp(-dt/T2)) / 4``.

    Raises
    ------
    NoiseError
        If ``T2 > 2 T1``, a time is nonpositive or ``dt < 0``.
    """
    if dt < 0:
        raise NoiseError("dt must be nonnegative")
    if t1 <= 0 or t2 <= 0:
        raise NoiseError("T1 and T2 must be positive")
    if t2 > 2 * t1:
        raise NoiseError(f"T2={t2} exceeds the physical bound 2*T1={2 * t1}")
    if dt == 0:
        return PauliProbs(0.0, 0.0, 0.0)
    e1 = math.exp(-dt / t1)
    e2 = math.exp(-dt / t2)
    pxy = (1 - e1) / 4
    pz = max((1 + e1 - 2 * e2) / 4, 0.0)
    return PauliProbs(pxy, pxy, pz)


def shuttle_error(distance: float, pitch: float, max_speed: float, t1: float, t2: float) -> PauliProbs:
    """Decoherence accumulated while moving ``distance`` sites and back."""
    if distance < 0 or pitch <= 0 or max_speed <= 0:
        raise NoiseError("distance must be nonnegative, pitch and speed positive")
    return twirl_idle(2.0 * distance * pitch / max_speed, t1, t2)


@dataclass(frozen=True)
class NoiseModel:
    """Per-context error rates.

    Attributes
    ----------
    kind : str
        ``uniform``, ``si1000``, ``device`` or ``code_capacity``.
    p : float
        Base probability the rates were derived from (informational).
    p_1q, p_2q, p_meas_flip, p_reset, p_idle, p_crosstalk, p_leakage : float
    p_idle_measure : float, optional
        Idle rate during moments containing a measurement or reset; defaults
        to ``p_idle``.
    durations : dict
        Gate durations in microseconds for ``1q``, ``2q``, ``measure`` and
        ``reset``.
    idle_model : {"none", "constant", "twirl"}
        ``constant`` applies ``DEPOLARIZE1(p_idle)`` once per moment;
        ``twirl`` derives a Pauli channel from the qubit's T1/T2 and the
        moment duration.
    shuttle_model : {"decoherence", "fixed"}
        Extra error on the moving qubit of a shuttle-link gate: twirled
        decoherence over the shuttle time, or ``DEPOLARIZE1(p_idle +
        p_crosstalk)``.
    inter_qpu_scale : float, optional
        Overrides the device's inter-QPU ``error_scale``.
    propagate_leakage : bool
        Leakage on a two-qubit gate flips both participants.
    t1, t2 : float
        Fallback coherence times for qubits without their own.
    """

    kind: str = "uniform"
    p: float = 0.0
    p_1q: float = 0.0
    p_2q: float = 0.0
    p_meas_flip: float = 0.0
    p_reset: float = 0.0
    p_idle: float = 0.0
    p_crosstalk: float = 0.0
    p_leakage: float = 0.0
    p_idle_measure: Optional[float] = None
    durations: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_DURATIONS))
    idle_model: str = "constant"
    shuttle_model: str = "decoherence"
    inter_qpu_scale: Optional[float] = None
    propagate_leakage: bool = True
    t1: float = math.inf
    t2: float = math.inf
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise NoiseError(f"unknown noise kind {self.kind!r}")
        if self.idle_model not in IDLE_MODELS:
            raise NoiseError(f"unknown idle model {self.idle_model!r}")
        if self.shuttle_model not in SHUTTLE_MODELS:
            raise NoiseError(f"unknown shuttle model {self.shuttle_model!r}")
        for k, v in self.rates().items():
            if not 0 <= v <= 1:
                raise NoiseError(f"{k}={v} outside [0, 1]")
        for k, v in self.durations.items():
            if not v > 0:
                raise NoiseError(f"duration {k}={v} must be positive")
        object.__setattr__(self, "durations", dict(self.durations))

    def rates(self) -> Dict[str, float]:
        out = {k: getattr(self, k) for k in
               ("p_1q", "p_2q", "p_meas_flip", "p_reset", "p_idle", "p_crosstalk", "p_leakage")}
        if self.p_idle_measure is not None:
            out["p_idle_measure"] = self.p_idle_measure
        return out

    @property
    def p_spam(self) -> float:
        return self.p_meas_flip + self.p_reset

    def scaled(self, factor: float) -> "NoiseModel":
        """All rates multiplied by ``factor`` (clamped to 1)."""
        kw = {k: min(v * factor, 1.0) for k, v in self.rates().items()}
        return replace(self, **kw)

    # -- constructors --------------------------------------------------------------

    @classmethod
    def uniform(cls, p: float) -> "NoiseModel":
        """Every gate, measurement, reset and idle moment at rate ``p``."""
        return cls("uniform", p, p, p, p, p, p, name=f"uniform({p:g})")

    @classmethod
    def code_capacity(cls, p: float) -> "NoiseModel":
        """Independent X flips at rate ``p`` on data qubits after initialisation."""
        return cls("code_capacity", p, idle_model="none", name=f"code_capacity({p:g})")

    @classmethod
    def preset(cls, name: str) -> "NoiseModel":
        table = _presets()
        if name not in table:
            raise NoiseError(f"unknown noise preset {name!r}; choose from {', '.join(sorted(table))}")
        d = table[name]
        r = d["rates"]
        return cls(
            "device",
            r["p_2q"],
            p_1q=r["p_1q"],
            p_2q=r["p_2q"],
            p_meas_flip=r["p_spam"] / 2,
            p_reset=r["p_spam"] / 2,
            p_idle=r["p_idle"],
            p_crosstalk=r["p_crosstalk"],
            p_leakage=r["p_leakage"],
            durations=d["durations"],
            idle_model=d["idle_model"],
            shuttle_model=d["shuttle_model"],
            name=name,
        )

    @classmethod
    def for_device(cls, device: Device) -> "NoiseModel":
        if device.noise is None:
            raise NoiseError(f"device {device.name!r} has no noise preset")
        return cls.preset(device.noise)

    # -- JSON ------------------------------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        out = {"kind": d.pop("kind"), "p": d.pop("p"), "name": d.pop("name"), "rates": {}, "durations": d.pop("durations"),
               "scales": {"inter_qpu": d.pop("inter_qpu_scale")}}
        for k in list(d):
            if k.startswith("p_"):
                out["rates"][k] = d.pop(k)
        for k in ("t1", "t2"):
            v = d.pop(k)
            out[k] = None if math.isinf(v) else v
        out.update(d)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModel":
        d = dict(d)
        kw = dict(d.pop("rates", {}))
        scales = d.pop("scales", {}) or {}
        kw["inter_qpu_scale"] = scales.get("inter_qpu")
        for k in ("t1", "t2"):
            v = d.pop(k, None)
            kw[k] = math.inf if v is None else float(v)
        kw.update(d)
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NoiseModel":
        return cls.from_dict(json.loads(text))


def si1000(p: float) -> NoiseModel:
    """Superconducting-inspired model, applied to every two-qubit gate.

    ``p_2q = p``, ``p_1q = p_idle = p/10``, ``p_meas_flip = 5p``,
    ``p_reset = 2p`` and ``2p`` idle noise during measure/reset moments.
    """
    if not 0 <= p <= 0.1:
        raise NoiseError("si1000 expects p in [0, 0.1]")
    return NoiseModel("si1000", p, p_1q=p / 10, p_2q=p, p_meas_flip=5 * p, p_reset=2 * p, p_idle=p / 10,
                      p_idle_measure=2 * p, name=f"si1000({p:g})")


_PRESET_CACHE: Dict[str, dict] = {}


def _presets() -> Dict[str, dict]:
    if not _PRESET_CACHE:
        text = resources.files("qecforge").joinpath("data/noise_presets.json").read_text()
        _PRESET_CACHE.update(json.loads(text))
    return _PRESET_CACHE


def preset_names() -> List[str]:
    return sorted(_presets())


# -- injection --------------------------------------------------------------------


class _Emitter:
    def __init__(self):
        self.out: List[Instruction] = []

    def add(self, name: str, targets: Sequence[int], params: Sequence[float] = ()) -> None:
        if targets:
            self.out.append(Instruction(name, tuple(int(t) for t in targets), tuple(float(x) for x in params)))

    def channel(self, name: str, p: float, targets: Sequence[int]) -> None:
        if p > 0 and targets:
            self.add(name, targets, (min(p, 1.0),))

    def pauli1(self, probs: PauliProbs, targets: Sequence[int]) -> None:
        if probs.total > 0 and targets:
            self.add("PAULI_CHANNEL_1", targets, probs.as_tuple())


def _qubit_times(device: Optional[Device], model: NoiseModel, q: int) -> Tuple[float, float]:
    if device is not None and q < device.num_qubits:
        qb = device.qubits[q]
        if qb.t1 is not None and qb.t2 is not None:
            return qb.t1, qb.t2
    return model.t1, model.t2


def _segments(c: Circuit) -> List[List[int]]:
    segs: List[List[int]] = [[]]
    for pos, ins in enumerate(c.instructions):
        if ins.name == "TICK":
            segs.append([])
        else:
            segs[-1].append(pos)
    return segs


def apply_noise(c: Circuit, model: NoiseModel, device: Optional[Device] = None, tracker=None,
                data_qubits: Optional[Sequence[int]] = None) -> Circuit:
    """Insert noise channels into a clean circuit.

    Parameters
    ----------
    c : Circuit
        Noiseless, with qubit indices on ``device`` (when given).
    model : NoiseModel
    device : Device, optional
        Supplies link classes and error scales, crosstalk neighbourhoods and
        per-qubit T1/T2.
    tracker : TrackerLog, optional
        Routing log of ``c``; used to check that it belongs to this circuit.
    data_qubits : sequence of int, optional
        Required for the ``code_capacity`` kind.

    Raises
    ------
    NoiseError
        Noisy input, tracker/circuit mismatch, or a two-qubit gate off the
        device graph.
    """
    if c.has_noise():
        raise NoiseError("input circuit already contains noise channels")
    if tracker is not None:
        if tracker.num_measurements != c.num_measurements:
            raise NoiseError(
                f"tracker/circuit mismatch: tracker saw {tracker.num_measurements} measurements, circuit has "
                f"{c.num_measurements}"
            )
        if c.num_qubits > tracker.num_physical:
            raise NoiseError("tracker/circuit mismatch: circuit uses more qubits than the tracked device")
    if device is not None and c.num_qubits > device.num_qubits:
        raise NoiseError(f"circuit needs {c.num_qubits} qubits, device has {device.num_qubits}")
    if model.kind == "code_capacity":
        return _code_capacity(c, model, data_qubits)

    em = _Emitter()
    near = device.neighbors(("local", "inter_qpu")) if device is not None and model.p_crosstalk > 0 else None
    segs = _segments(c)
    # live window per qubit, in segment indices
    first: Dict[int, int] = {}
    last: Dict[int, int] = {}
    for si, seg in enumerate(segs):
        for pos in seg:
            for q in c.instructions[pos].qubits:
                first.setdefault(q, si)
                last[q] = si
    dur = {**DEFAULT_DURATIONS, **model.durations}

    for si, seg in enumerate(segs):
        if si > 0:
            em.out.append(Instruction("TICK"))
        active = set()
        seg_time = 0.0
        has_mr = False
        for pos in seg:
            ins = c.instructions[pos]
            name = ins.name
            if ins.is_annotation:
                em.out.append(ins)
                continue
            qs = ins.qubits
            active.update(qs)
            if name in gates.MEASUREMENTS:
                has_mr = True
                em.channel("X_ERROR", model.p_meas_flip, qs)
                em.out.append(ins)
                t = dur["measure"]
                if name == "MR":
                    em.channel("X_ERROR", model.p_reset, qs)
                    t += dur["reset"]
                seg_time = max(seg_time, t)
            elif name in gates.RESETS:
                has_mr = True
                em.out.append(ins)
                em.channel("X_ERROR", model.p_reset, qs)
                seg_time = max(seg_time, dur["reset"])
            elif name in gates.TWO_QUBIT_GATES:
                em.out.append(ins)
                seg_time = max(seg_time, _two_qubit_noise(em, ins, model, device, near, dur, first))
            elif name in gates.ONE_QUBIT_GATES:
                em.out.append(ins)
                em.channel("DEPOLARIZE1", model.p_1q, qs)
                seg_time = max(seg_time, dur["1q"])
            else:
                raise NoiseError(f"cannot inject noise around {name}")
        idle = [q for q in sorted(first) if first[q] <= si <= last[q] and q not in active]
        if not idle:
            continue
        if not seg:
            seg_time = dur["1q"]  # an empty moment still lasts one gate slot
        if model.idle_model == "constant":
            pi = model.p_idle_measure if (has_mr and model.p_idle_measure is not None) else model.p_idle
            em.channel("DEPOLARIZE1", pi, idle)
        elif model.idle_model == "twirl":
            by_probs: Dict[Tuple[float, float, float], List[int]] = {}
            for q in idle:
                t1, t2 = _qubit_times(device, model, q)
                pp = twirl_idle(seg_time, t1, t2)
                by_probs.setdefault(pp.as_tuple(), []).append(q)
            for probs, qs in by_probs.items():
                em.pauli1(PauliProbs(*probs), qs)
    return Circuit(em.out, c.num_qubits)


def _two_qubit_noise(em: _Emitter, ins: Instruction, model: NoiseModel, device: Optional[Device],
                     near, dur, used) -> float:
    seg_time = 0.0
    by_p: Dict[float, List[int]] = {}
    extra: List[Tuple[str, Sequence[float], List[int]]] = []
    for a, b in ins.groups():
        scale = 1.0
        t = dur["2q"]
        if device is not None:
            e = device.edge(a, b)
            if e is None:
                raise NoiseError(f"{ins.name} {a} {b} is not on a device edge")
            scale = e.error_scale
            if e.link_class == "inter_qpu" and model.inter_qpu_scale is not None:
                scale = model.inter_qpu_scale
            t += e.duration
            if e.link_class == "shuttle":
                if model.shuttle_model == "fixed":
                    extra.append(("DEPOLARIZE1", (model.p_idle + model.p_crosstalk,), [a]))
                else:
                    t1, t2 = _qubit_times(device, model, a)
                    pp = twirl_idle(e.duration, t1, t2)
                    if pp.total > 0:
                        extra.append(("PAULI_CHANNEL_1", pp.as_tuple(), [a]))
        seg_time = max(seg_time, t)
        by_p.setdefault(min(model.p_2q * scale, 1.0), []).extend((a, b))
    for p, qs in by_p.items():
        em.channel("DEPOLARIZE2", p, qs)
    for name, params, qs in extra:
        if max(params) > 0:
            em.add(name, qs, params)
    if model.p_leakage > 0:
        if model.propagate_leakage:
            params = [0.0] * 15
            params[_XX] = merge_probability(model.p_leakage, model.p_leakage)
            em.add("PAULI_CHANNEL_2", ins.targets, params)
        else:
            em.channel("X_ERROR", model.p_leakage, ins.targets)
    if near is not None:
        for a, b in ins.groups():
            # unused device qubits carry no state, so they are skipped
            hit = sorted(q for q in (set(near[a]) | set(near[b])) - {a, b} if q in used)
            em.channel("DEPOLARIZE1", model.p_crosstalk, hit)
    return seg_time


def _code_capacity(c: Circuit, model: NoiseModel, data_qubits: Optional[Sequence[int]]) -> Circuit:
    if data_qubits is None:
        raise NoiseError("the code_capacity model needs the data qubits")
    pending = set(int(q) for q in data_qubits)
    out: List[Instruction] = []
    for ins in c.instructions:
        out.append(ins)
        if ins.name in gates.RESETS or ins.name == "MR":
            hit = [q for q in ins.qubits if q in pending]
            if hit and model.p > 0:
                out.append(Instruction("X_ERROR", tuple(hit), (model.p,)))
            pending.difference_update(hit)
    if pending:
        raise NoiseError(f"data qubits {sorted(pending)} are never initialised")
    return Circuit(out, c.num_qubits)
