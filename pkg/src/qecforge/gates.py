"""Gate alphabet shared by every stage of the pipeline.

Every unitary gate is defined by a decomposition into the three CHP
primitives ``H``, ``S`` and ``CX``.  Simulators, the detector-error-model
compiler and the translator all consume these decompositions, so a new gate
only has to be described once.  Global phases are not tracked.
"""
from __future__ import annotations

from typing import List, Sequence, Tuple

# (primitive name, local target positions)
Primitive = Tuple[str, Tuple[int, ...]]

ONE_QUBIT_GATES = frozenset(
    ["I", "X", "Y", "Z", "H", "S", "S_DAG", "SX", "SX_DAG", "SQRT_Y", "SQRT_Y_DAG", "RZ", "U1Q"]
)
TWO_QUBIT_GATES = frozenset(["CX", "CZ", "SWAP", "RZZ"])
UNITARY_GATES = ONE_QUBIT_GATES | TWO_QUBIT_GATES

MEASUREMENTS = frozenset(["M", "MR"])
RESETS = frozenset(["R"])

NOISE_CHANNELS = frozenset(
    ["DEPOLARIZE1", "DEPOLARIZE2", "X_ERROR", "Y_ERROR", "Z_ERROR", "PAULI_CHANNEL_1", "PAULI_CHANNEL_2"]
)
TWO_QUBIT_NOISE = frozenset(["DEPOLARIZE2", "PAULI_CHANNEL_2"])

ANNOTATIONS = frozenset(["DETECTOR", "OBSERVABLE_INCLUDE", "TICK"])

# number of params each name takes; None means "any number" (detector coordinates)
PARAM_COUNT = {
    "RZ": 1,
    "RZZ": 1,
    "U1Q": 2,
    "DEPOLARIZE1": 1,
    "DEPOLARIZE2": 1,
    "X_ERROR": 1,
    "Y_ERROR": 1,
    "Z_ERROR": 1,
    "PAULI_CHANNEL_1": 3,
    "PAULI_CHANNEL_2": 15,
    "OBSERVABLE_INCLUDE": 1,
    "DETECTOR": None,
}

# Pauli order of PAULI_CHANNEL_2 params: first letter acts on the first target
PAULI_PAIRS = [a + b for a in "IXYZ" for b in "IXYZ"][1:]

_QUARTER_TURN_GATES = frozenset(["RZ", "RZZ", "U1Q"])


def arity(name: str) -> int:
    """Number of qubits one application of ``name`` acts on."""
    if name in TWO_QUBIT_GATES or name in TWO_QUBIT_NOISE:
        return 2
    return 1


def is_quarter_turn(name: str) -> bool:
    """Gates whose integer params count multiples of pi/2."""
    return name in _QUARTER_TURN_GATES


def _s(k: int, q: int = 0) -> List[Primitive]:
    return [("S", (q,))] * (k % 4)


def _rx(k: int, q: int = 0) -> List[Primitive]:
    k %= 4
    if k == 0:
        return []
    return [("H", (q,))] + _s(k, q) + [("H", (q,))]


def decompose(name: str, params: Sequence[float] = ()) -> List[Primitive]:
    """Decompose one gate application into H/S/CX primitives.

    The returned list is in application order and uses local target
    positions (0, or 0 and 1).
    """
    if name == "I":
        return []
    if name == "Z":
        return _s(2)
    if name == "X":
        return _rx(2)
    if name == "Y":
        return _s(2) + _rx(2)
    if name == "H":
        return [("H", (0,))]
    if name == "S":
        return _s(1)
    if name == "S_DAG":
        return _s(3)
    if name == "SX":
        return _rx(1)
    if name == "SX_DAG":
        return _rx(3)
    if name == "SQRT_Y":
        return _s(2) + [("H", (0,))]
    if name == "SQRT_Y_DAG":
        return [("H", (0,))] + _s(2)
    if name == "RZ":
        return _s(int(params[0]))
    if name == "U1Q":
        theta, phi = int(params[0]), int(params[1])
        return _s(-phi) + _rx(theta) + _s(phi)
    if name == "CX":
        return [("CX", (0, 1))]
    if name == "CZ":
        return [("H", (1,)), ("CX", (0, 1)), ("H", (1,))]
    if name == "SWAP":
        return [("CX", (0, 1)), ("CX", (1, 0)), ("CX", (0, 1))]
    if name == "RZZ":
        return [("CX", (0, 1))] + _s(int(params[0]), 1) + [("CX", (0, 1))]
    raise ValueError(f"{name!r} is not a unitary gate")


def inverse(name: str, params: Sequence[float] = ()) -> Tuple[str, Tuple[float, ...]]:
    """Name and params of the inverse gate."""
    pairs = {"S": "S_DAG", "S_DAG": "S", "SX": "SX_DAG", "SX_DAG": "SX", "SQRT_Y": "SQRT_Y_DAG", "SQRT_Y_DAG": "SQRT_Y"}
    if name in pairs:
        return pairs[name], ()
    if name in ("RZ", "RZZ"):
        return name, (float((-int(params[0])) % 4),)
    if name == "U1Q":
        return name, (float((-int(params[0])) % 4), float(int(params[1]) % 4))
    if name in UNITARY_GATES:
        return name, tuple(params)
    raise ValueError(f"{name!r} is not a unitary gate")


def noise_components(name: str, params: Sequence[float]) -> List[Tuple[str, float]]:
    """Mutually exclusive Pauli outcomes of a noise channel.

    Returns ``(pauli, probability)`` pairs where ``pauli`` is a string over
    ``IXYZ`` with one letter per target of a single application.
    """
    if name == "X_ERROR":
        return [("X", params[0])]
    if name == "Y_ERROR":
        return [("Y", params[0])]
    if name == "Z_ERROR":
        return [("Z", params[0])]
    if name == "DEPOLARIZE1":
        return [(p, params[0] / 3) for p in "XYZ"]
    if name == "PAULI_CHANNEL_1":
        return list(zip("XYZ", params))
    if name == "DEPOLARIZE2":
        return [(p, params[0] / 15) for p in PAULI_PAIRS]
    if name == "PAULI_CHANNEL_2":
        return list(zip(PAULI_PAIRS, params))
    raise ValueError(f"{name!r} is not a noise channel")
