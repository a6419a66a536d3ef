"""Circuit intermediate representation and its text format.

The text format is one instruction per line::

    NAME(param,param) target target ...

Targets are qubit indices or measurement-record back-references ``rec[-k]``.
``#`` starts a comment; blank lines are ignored.  Record references are
stored internally as negative integers (``rec[-3]`` is ``-3``) so the
target tuple of every instruction is a plain ``tuple[int, ...]``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from . import gates

KINDS = ("gate", "measure", "reset", "noise", "detector", "observable_include", "tick")

_KNOWN = gates.UNITARY_GATES | gates.MEASUREMENTS | gates.RESETS | gates.NOISE_CHANNELS | gates.ANNOTATIONS


class CircuitError(ValueError):
    """An instruction or circuit violates the IR invariants."""


class CircuitSyntaxError(CircuitError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def kind_of(name: str) -> str:
    if name in gates.UNITARY_GATES:
        return "gate"
    if name in gates.MEASUREMENTS:
        return "measure"
    if name in gates.RESETS:
        return "reset"
    if name in gates.NOISE_CHANNELS:
        return "noise"
    if name == "DETECTOR":
        return "detector"
    if name == "OBSERVABLE_INCLUDE":
        return "observable_include"
    if name == "TICK":
        return "tick"
    raise CircuitError(f"unknown instruction {name!r}")


@dataclass(frozen=True)
class Instruction:
    name: str
    targets: Tuple[int, ...] = ()
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        _validate_instruction(self)

    @property
    def kind(self) -> str:
        return kind_of(self.name)

    @property
    def is_annotation(self) -> bool:
        return self.name in gates.ANNOTATIONS

    @property
    def qubits(self) -> Tuple[int, ...]:
        """Qubit targets (empty for record-only annotations)."""
        if self.name in ("DETECTOR", "OBSERVABLE_INCLUDE", "TICK"):
            return ()
        return self.targets

    def groups(self) -> List[Tuple[int, ...]]:
        """Split targets into per-application groups (pairs for 2q ops)."""
        k = gates.arity(self.name)
        t = self.qubits
        return [t[i:i + k] for i in range(0, len(t), k)]

    def __str__(self) -> str:
        return format_instruction(self)


def _validate_instruction(ins: Instruction) -> None:
    name = ins.name
    if name not in _KNOWN:
        raise CircuitError(f"unknown instruction {name!r}")
    want = gates.PARAM_COUNT.get(name, 0)
    if want is not None and len(ins.params) != want:
        raise CircuitError(f"{name} takes {want} parameter(s), got {len(ins.params)}")
    if name in ("DETECTOR", "OBSERVABLE_INCLUDE"):
        if any(t >= 0 for t in ins.targets):
            raise CircuitError(f"{name} only takes rec[-k] targets")
    elif name == "TICK":
        if ins.targets:
            raise CircuitError("TICK takes no targets")
    else:
        if any(t < 0 for t in ins.targets):
            raise CircuitError(f"{name} takes qubit targets only")
        if not ins.targets:
            raise CircuitError(f"{name} needs at least one target")
    if gates.arity(name) == 2:
        if len(ins.targets) % 2:
            raise CircuitError(f"{name} needs an even number of targets")
        for a, b in ins.groups():
            if a == b:
                raise CircuitError(f"{name} applied to qubit {a} twice in one pair")
    if name in gates.NOISE_CHANNELS:
        for p in ins.params:
            if not (0.0 <= p <= 1.0) or math.isnan(p):
                raise CircuitError(f"{name} probability {p} outside [0, 1]")
        if sum(ins.params) > 1.0 + 1e-12:
            raise CircuitError(f"{name} probabilities sum to more than 1")
    if gates.is_quarter_turn(name):
        for k in ins.params:
            if k != int(k) or not 0 <= k <= 3:
                raise CircuitError(f"{name} params must be integers in 0..3 (multiples of pi/2), got {k}")
    if name == "OBSERVABLE_INCLUDE":
        k = ins.params[0]
        if k != int(k) or k < 0:
            raise CircuitError("OBSERVABLE_INCLUDE index must be a nonnegative integer")


class Circuit:
    """An immutable, validated instruction list over indexed qubits."""

    __slots__ = ("instructions", "num_qubits", "num_measurements", "num_detectors", "num_observables")

    def __init__(self, instructions: Iterable[Instruction] = (), num_qubits: Optional[int] = None):
        ins = tuple(instructions)
        used = max((max(i.qubits) for i in ins if i.qubits), default=-1) + 1
        if num_qubits is None:
            num_qubits = used
        elif num_qubits < used:
            raise CircuitError(f"qubit index {used - 1} out of range for {num_qubits} qubits")
        n_meas = n_det = 0
        n_obs = 0
        for pos, i in enumerate(ins):
            if i.name in gates.MEASUREMENTS:
                n_meas += len(i.targets)
            elif i.name in ("DETECTOR", "OBSERVABLE_INCLUDE"):
                for t in i.targets:
                    if -t > n_meas:
                        raise CircuitError(
                            f"instruction {pos} ({i.name}) references rec[{t}] but only {n_meas} measurements precede it"
                        )
                if i.name == "DETECTOR":
                    n_det += 1
                else:
                    n_obs = max(n_obs, int(i.params[0]) + 1)
        object.__setattr__(self, "instructions", ins)
        object.__setattr__(self, "num_qubits", int(num_qubits))
        object.__setattr__(self, "num_measurements", n_meas)
        object.__setattr__(self, "num_detectors", n_det)
        object.__setattr__(self, "num_observables", n_obs)

    def __setattr__(self, key, value):
        raise AttributeError("Circuit is immutable")

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    def __getitem__(self, i):
        return self.instructions[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.num_qubits == other.num_qubits and self.instructions == other.instructions

    def __hash__(self):
        return hash((self.num_qubits, self.instructions))

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(self.instructions + other.instructions, max(self.num_qubits, other.num_qubits))

    def __repr__(self) -> str:
        return (
            f"Circuit(num_qubits={self.num_qubits}, instructions={len(self)}, "
            f"measurements={self.num_measurements}, detectors={self.num_detectors}, "
            f"observables={self.num_observables})"
        )

    def __str__(self) -> str:
        return emit_circuit(self)

    # -- derived views -------------------------------------------------

    def count(self, *names: str) -> int:
        """Number of gate applications (per target group) with the given names."""
        total = 0
        for ins in self.instructions:
            if ins.name in names:
                total += len(ins.groups())
        return total

    def gate_count(self) -> int:
        return sum(len(i.groups()) for i in self.instructions if i.kind == "gate")

    def two_qubit_gate_count(self) -> int:
        return sum(len(i.groups()) for i in self.instructions if i.name in gates.TWO_QUBIT_GATES)

    def used_qubits(self) -> List[int]:
        return sorted({q for i in self.instructions for q in i.qubits})

    def has_noise(self) -> bool:
        return any(i.kind == "noise" for i in self.instructions)

    def without_noise(self) -> "Circuit":
        return Circuit([i for i in self.instructions if i.kind != "noise"], self.num_qubits)

    def without_ticks(self) -> "Circuit":
        return Circuit([i for i in self.instructions if i.name != "TICK"], self.num_qubits)

    def layers(self) -> List[List[Instruction]]:
        """Instructions grouped between TICKs (TICKs themselves dropped)."""
        out: List[List[Instruction]] = [[]]
        for ins in self.instructions:
            if ins.name == "TICK":
                out.append([])
            else:
                out[-1].append(ins)
        return out

    def relabel(self, mapping: Sequence[int], num_qubits: Optional[int] = None) -> "Circuit":
        """Rename qubit ``q`` to ``mapping[q]``."""
        out = []
        for ins in self.instructions:
            if ins.qubits:
                ins = Instruction(ins.name, tuple(mapping[q] for q in ins.targets), ins.params)
            out.append(ins)
        return Circuit(out, num_qubits)

    def compact(self) -> Tuple["Circuit", List[int]]:
        """Drop untouched qubits; returns the circuit and the kept qubit list."""
        used = self.used_qubits()
        index = {q: i for i, q in enumerate(used)}
        mapping = [index.get(q, -1) for q in range(self.num_qubits)]
        return self.relabel(mapping, len(used)), used

    def measurement_owners(self) -> List[int]:
        """Qubit measured by each measurement record, in record order."""
        return [q for i in self.instructions if i.name in gates.MEASUREMENTS for q in i.targets]

    def detector_records(self) -> Tuple[List[List[int]], Dict[int, List[int]]]:
        """Absolute record indices of every detector and every observable."""
        dets: List[List[int]] = []
        obs: Dict[int, List[int]] = {}
        m = 0
        for ins in self.instructions:
            if ins.name in gates.MEASUREMENTS:
                m += len(ins.targets)
            elif ins.name == "DETECTOR":
                dets.append([m + t for t in ins.targets])
            elif ins.name == "OBSERVABLE_INCLUDE":
                obs.setdefault(int(ins.params[0]), []).extend(m + t for t in ins.targets)
        return dets, obs


# -- scheduling ------------------------------------------------------------


def layerize(circuit: Circuit) -> Circuit:
    """Reschedule into as-soon-as-possible moments separated by TICKs.

    Each target group (a pair for two-qubit gates) is scheduled on its own,
    so a multi-target instruction never holds back its independent parts;
    groups landing in the same moment are merged back.  Operations keep
    their per-qubit order.  Measurements keep their global order and
    annotations stay between the same measurements, so every ``rec[-k]``
    keeps pointing at the same record.
    """
    qubit_moment: Dict[int, int] = {}
    last_meas = 0
    placed: List[Tuple[int, int, Instruction]] = []
    for ins in circuit.instructions:
        if ins.name == "TICK":
            continue
        if ins.is_annotation:
            placed.append((last_meas, len(placed), ins))
            continue
        for grp in ins.groups():
            moment = max((qubit_moment.get(q, -1) + 1 for q in grp), default=0)
            if ins.name in gates.MEASUREMENTS:
                moment = max(moment, last_meas)
                last_meas = moment
            for q in grp:
                qubit_moment[q] = moment
            placed.append((moment, len(placed), Instruction(ins.name, tuple(grp), ins.params)))
    placed.sort(key=lambda t: (t[0], t[1]))
    out: List[Instruction] = []
    current = 0
    for moment, _, ins in placed:
        while current < moment:
            out.append(Instruction("TICK"))
            current += 1
        prev = out[-1] if out else None
        if (prev is not None and not ins.is_annotation and prev.name == ins.name and prev.params == ins.params
                and not set(prev.qubits) & set(ins.qubits)):
            out[-1] = Instruction(prev.name, prev.targets + ins.targets, prev.params)
        else:
            out.append(ins)
    return Circuit(out, circuit.num_qubits)


# -- text format -------------------------------------------------------------

_LINE_RE = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\((?P<params>[^)]*)\))?(?P<rest>.*)$")
_REC_RE = re.compile(r"^rec\[(-\d+)\]$")


def _fmt_number(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def format_instruction(ins: Instruction) -> str:
    head = ins.name
    if ins.params:
        head += "(" + ",".join(_fmt_number(p) for p in ins.params) + ")"
    if ins.name in ("DETECTOR", "OBSERVABLE_INCLUDE"):
        tail = [f"rec[{t}]" for t in ins.targets]
    else:
        tail = [str(t) for t in ins.targets]
    return " ".join([head] + tail)


def emit_circuit(c: Circuit) -> str:
    """Canonical text: single spaces, shortest round-trip floats, trailing newline."""
    if not c.instructions:
        return ""
    return "\n".join(format_instruction(i) for i in c.instructions) + "\n"


def parse_circuit(text: str, num_qubits: Optional[int] = None) -> Circuit:
    out: List[Instruction] = []
    n_meas = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        m = _LINE_RE.match(stripped)
        if not m:
            raise CircuitSyntaxError(f"cannot parse {stripped!r}", lineno, col0)
        name = m.group("name")
        if name not in _KNOWN:
            raise CircuitSyntaxError(f"unknown instruction {name!r}", lineno, col0)
        params: List[float] = []
        if m.group("params") is not None:
            ptxt = m.group("params").strip()
            if ptxt:
                for chunk in ptxt.split(","):
                    try:
                        params.append(float(chunk))
                    except ValueError:
                        col = col0 + stripped.index("(") + 1
                        raise CircuitSyntaxError(f"bad parameter {chunk.strip()!r}", lineno, col) from None
        rest = m.group("rest")
        if rest and not rest[0].isspace():
            raise CircuitSyntaxError(f"unexpected {rest.strip()!r}", lineno, col0 + m.start("rest"))
        targets: List[int] = []
        offset = col0 + m.start("rest")
        for tok_m in re.finditer(r"\S+", rest):
            tok = tok_m.group(0)
            col = offset + tok_m.start()
            rec = _REC_RE.match(tok)
            if rec:
                k = int(rec.group(1))
                if k >= 0:
                    raise CircuitSyntaxError(f"record reference {tok} must be negative", lineno, col)
                targets.append(k)
            elif tok.isdigit():
                targets.append(int(tok))
            else:
                raise CircuitSyntaxError(f"bad target {tok!r}", lineno, col)
        try:
            ins = Instruction(name, tuple(targets), tuple(params))
        except CircuitError as e:
            raise CircuitSyntaxError(str(e), lineno, col0) from None
        if name in gates.MEASUREMENTS:
            n_meas += len(targets)
        elif any(-t > n_meas for t in ins.targets if t < 0):
            raise CircuitSyntaxError(f"record reference reaches before the first measurement ({n_meas} so far)", lineno, col0)
        out.append(ins)
    try:
        return Circuit(out, num_qubits)
    except CircuitError as e:
        raise CircuitError(str(e)) from None


def normalize_text(text: str) -> str:
    """Canonical form of circuit text (what ``emit_circuit(parse_circuit(text))`` gives)."""
    return emit_circuit(parse_circuit(text))


def _odd_parity(records: Iterable[int]) -> List[int]:
    seen: Dict[int, int] = {}
    for r in records:
        seen[r] = seen.get(r, 0) ^ 1
    return sorted(r for r, odd in seen.items() if odd)


class CircuitBuilder:
    """Mutable helper used by generators and compiler passes."""

    def __init__(self):
        self.instructions: List[Instruction] = []
        self.num_measurements = 0

    def append(self, name: str, targets: Sequence[int] = (), params: Sequence[float] = ()) -> None:
        if name not in ("TICK",) and name not in ("DETECTOR", "OBSERVABLE_INCLUDE") and not targets:
            return
        self.instructions.append(Instruction(name, tuple(targets), tuple(params)))
        if name in gates.MEASUREMENTS:
            self.num_measurements += len(targets)

    def measure(self, name: str, qubits: Sequence[int]) -> List[int]:
        """Append a measurement and return the absolute record indices it creates."""
        start = self.num_measurements
        self.append(name, qubits)
        return list(range(start, start + len(qubits)))

    def detector(self, records: Iterable[int], coords: Sequence[float] = ()) -> None:
        recs = _odd_parity(records)
        self.append("DETECTOR", [r - self.num_measurements for r in recs], coords)

    def observable(self, index: int, records: Iterable[int]) -> None:
        self.append("OBSERVABLE_INCLUDE", [r - self.num_measurements for r in _odd_parity(records)], (index,))

    def tick(self) -> None:
        if self.instructions and self.instructions[-1].name != "TICK":
            self.instructions.append(Instruction("TICK"))

    def build(self, num_qubits: Optional[int] = None) -> Circuit:
        ins = list(self.instructions)
        while ins and ins[-1].name == "TICK":
            ins.pop()
        return Circuit(ins, num_qubits)
