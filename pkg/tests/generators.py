"""Random instance generators shared by the property and acceptance tests."""
from __future__ import annotations

from typing import List, Sequence

import numpy as np

from qecforge.circuit import Circuit, Instruction
from qecforge.sim import DetectorErrorModel, ErrorMechanism

ONE_Q = ("H", "S", "S_DAG", "X", "Y", "Z", "SX", "SX_DAG", "SQRT_Y", "SQRT_Y_DAG")
TWO_Q = ("CX", "CZ", "SWAP")
INVERSE = {"S": "S_DAG", "S_DAG": "S", "SX": "SX_DAG", "SX_DAG": "SX", "SQRT_Y": "SQRT_Y_DAG",
           "SQRT_Y_DAG": "SQRT_Y"}
CHANNELS = ("X_ERROR", "Y_ERROR", "Z_ERROR", "DEPOLARIZE1", "DEPOLARIZE2")


def random_unitary_circuit(rng: np.random.Generator, n: int, m: int, quarter_turns: bool = True) -> Circuit:
    """``m`` random Clifford gates on ``n`` qubits, RZ/RZZ/U1Q included when ``quarter_turns``."""
    ins = []
    for _ in range(m):
        if n < 2 or rng.random() < 0.5:
            names = ONE_Q + (("RZ", "U1Q") if quarter_turns else ())
            name = names[rng.integers(len(names))]
            params = {"RZ": (int(rng.integers(4)),), "U1Q": (int(rng.integers(4)), int(rng.integers(4)))}.get(name, ())
            ins.append(Instruction(name, (int(rng.integers(n)),), params))
        else:
            names = TWO_Q + (("RZZ",) if quarter_turns else ())
            name = names[rng.integers(len(names))]
            a, b = rng.choice(n, 2, replace=False)
            params = (int(rng.integers(4)),) if name == "RZZ" else ()
            ins.append(Instruction(name, (int(a), int(b)), params))
    return Circuit(ins, n)


def _inverse(ins: Sequence[Instruction]) -> List[Instruction]:
    return [Instruction(INVERSE.get(i.name, i.name), i.targets) for i in reversed(ins)]


def _noisy_block(rng: np.random.Generator, n: int, depth: int, p_max: float) -> List[Instruction]:
    gates = list(random_unitary_circuit(rng, n, depth, quarter_turns=False))
    out = []
    for g in gates:
        out.append(g)
        if rng.random() < 0.5:
            name = CHANNELS[rng.integers(len(CHANNELS))]
            p = float(rng.uniform(0.005, p_max))
            if name == "DEPOLARIZE2" and n >= 2:
                a, b = rng.choice(n, 2, replace=False)
                out.append(Instruction(name, (int(a), int(b)), (p,)))
            elif name != "DEPOLARIZE2":
                out.append(Instruction(name, (int(rng.integers(n)),), (p,)))
    clean = [i for i in out if i.name not in CHANNELS]
    return out + _inverse(clean)


def random_noisy_circuit(rng: np.random.Generator, n: int, depth: int = 12, p_max: float = 0.08) -> Circuit:
    """Two noisy compute/uncompute blocks, each read out into deterministic detectors.

    The first readout is a measure-reset, so the second block starts from a
    fresh register; a cross-round parity detector and one observable are
    added on top of the per-qubit detectors.
    """
    ins = [Instruction("R", tuple(range(n)))]
    ins += _noisy_block(rng, n, depth, p_max)
    ins.append(Instruction("MR", tuple(range(n))))
    ins += [Instruction("DETECTOR", (-(n - q),)) for q in range(n)]
    ins += _noisy_block(rng, n, depth, p_max)
    ins.append(Instruction("M", tuple(range(n))))
    ins += [Instruction("DETECTOR", (-(n - q),)) for q in range(n)]
    ins.append(Instruction("DETECTOR", (-n, -2 * n)))
    ins.append(Instruction("OBSERVABLE_INCLUDE", (-1,), (0,)))
    return Circuit(ins, n)


def random_graphlike_dem(rng: np.random.Generator, max_detectors: int = 12, max_mechanisms: int = 24,
                         p_range=(0.01, 0.3)) -> DetectorErrorModel:
    """A random DEM whose mechanisms each flip one or two detectors, with distinct symptoms."""
    D = int(rng.integers(2, max_detectors + 1))
    cap = 2 * (D + D * (D - 1) // 2)
    N = int(rng.integers(D, min(max_mechanisms, cap) + 1))
    seen, mechs = set(), []
    while len(mechs) < N:
        k = int(rng.integers(1, 3))
        dets = tuple(sorted(rng.choice(D, k, replace=False).tolist()))
        obs = (0,) if rng.random() < 0.3 else ()
        if (dets, obs) in seen:
            continue
        seen.add((dets, obs))
        mechs.append(ErrorMechanism(float(rng.uniform(*p_range)), dets, obs))
    return DetectorErrorModel(mechs, D, 1)


def syndrome_int(bits: Sequence[bool]) -> int:
    return int(sum(1 << i for i in np.flatnonzero(bits)))
