"""Repetition-protected idle qubit versus a bare idle qubit."""
from __future__ import annotations

from ..circuit import Circuit, CircuitBuilder, Instruction

# moments of the protected gadget: reset, encode (2), extract (2), measure ancillas, measure data
GADGET_MOMENTS = 7


def estimate_repetition_overhead(p_idle: float, p_gate: float, p_meas: float) -> float:
    """First-order error probability of the protected gadget, ``5 p_idle + 6 p_gate + 2 p_meas``.

    Clamped to ``[0, 1]``.
    """
    for p in (p_idle, p_gate, p_meas):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
    return min(1.0, max(0.0, 5 * p_idle + 6 * p_gate + 2 * p_meas))


def protected_idle_circuit() -> Circuit:
    """Qubit 0 encoded in a 3-qubit bit-flip code with one round of extraction.

    Qubits 1 and 2 are code qubits, 3 and 4 are syndrome ancillas.  The
    observable is the final value of qubit 0; detectors compare the round's
    syndrome with its initial value and with the final data readout.
    """
    b = CircuitBuilder()
    b.append("R", [0, 1, 2, 3, 4])
    b.tick()
    b.append("CX", [0, 1])
    b.tick()
    b.append("CX", [0, 2])
    b.tick()
    b.append("CX", [0, 3, 1, 4])
    b.tick()
    b.append("CX", [1, 3, 2, 4])
    b.tick()
    s = b.measure("M", [3, 4])
    b.detector([s[0]])
    b.detector([s[1]])
    b.tick()
    d = b.measure("M", [0, 1, 2])
    b.detector([s[0], d[0], d[1]])
    b.detector([s[1], d[1], d[2]])
    b.observable(0, [d[0]])
    return b.build()


def unprotected_idle_circuit(moments: int = GADGET_MOMENTS) -> Circuit:
    """A single qubit reset, left idle, and measured, spanning ``moments`` moments."""
    if moments < 2:
        raise ValueError("need at least the reset and measurement moments")
    ins = [Instruction("R", (0,))] + [Instruction("TICK")] * (moments - 1)
    ins += [Instruction("M", (0,)), Instruction("OBSERVABLE_INCLUDE", (-1,), (0,))]
    return Circuit(ins, 1)
