import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qecforge.circuit import (Circuit, CircuitBuilder, CircuitError, CircuitSyntaxError, Instruction, emit_circuit,
                              layerize, normalize_text, parse_circuit)
from qecforge.codes import CodeSpec, generate_memory

from generators import random_noisy_circuit, random_unitary_circuit


def test_minimal_program():
    c = parse_circuit("H 0\nM 0")
    assert (c.num_qubits, len(c), c.num_measurements) == (1, 2, 1)
    assert emit_circuit(c) == "H 0\nM 0\n"


def test_single_detector_program():
    c = parse_circuit("X_ERROR(0.25) 0\nM 0\nDETECTOR rec[-1]")
    assert c.num_detectors == 1
    assert c.has_noise()


def test_depolarize2_formatting():
    c = Circuit([Instruction("CX", (0, 1)), Instruction("DEPOLARIZE2", (0, 1), (0.004,))])
    assert "DEPOLARIZE2(0.004) 0 1" in emit_circuit(c).splitlines()


def test_comments_and_blank_lines_ignored():
    c = parse_circuit("# header\n\nH 0  # trailing\n\nM 0\n")
    assert emit_circuit(c) == "H 0\nM 0\n"


@pytest.mark.parametrize("text, line", [
    ("H 0\nFOO 1", 2),
    ("M 0\nX_ERROR(1.5) 0", 2),
    ("H 0\nM 0\nDETECTOR rec[-2]", 3),
    ("H x", 1),
    ("CX 0", 1),
])
def test_syntax_errors_report_line(text, line):
    with pytest.raises(CircuitSyntaxError) as info:
        parse_circuit(text)
    assert info.value.line == line
    assert info.value.column >= 1


@pytest.mark.parametrize("name, targets, params", [
    ("X_ERROR", (0,), (-0.1,)),
    ("RZ", (0,), (5,)),
    ("DETECTOR", (3,), ()),
    ("CX", (0, 1, 2), ()),
    ("BOGUS", (0,), ()),
])
def test_invalid_instructions_rejected(name, targets, params):
    with pytest.raises(CircuitError):
        Instruction(name, targets, params)


def test_record_before_first_measurement_rejected():
    with pytest.raises(CircuitError):
        Circuit([Instruction("DETECTOR", (-1,))])


def test_circuit_is_immutable():
    c = parse_circuit("H 0")
    with pytest.raises(AttributeError):
        c.num_qubits = 3


def test_derived_counts_match_scan():
    c = generate_memory(CodeSpec("surface", 3, rounds=2))
    text = emit_circuit(c)
    assert c.num_detectors == text.count("DETECTOR")
    assert c.num_measurements == sum(len(i.targets) for i in c if i.name in ("M", "MR"))


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_parse_emit_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    c = random_noisy_circuit(rng, n, depth=6)
    text = emit_circuit(c)
    assert parse_circuit(text, c.num_qubits) == c
    assert emit_circuit(parse_circuit(text)) == text


@given(st.integers(0, 2**32 - 1))
def test_emit_of_parse_is_normalization(seed):
    rng = np.random.default_rng(seed)
    text = emit_circuit(random_unitary_circuit(rng, 4, 10))
    messy = "\n".join("  " + line.replace(" ", "   ") + "   # c" for line in text.splitlines()) + "\n\n"
    assert emit_circuit(parse_circuit(messy)) == normalize_text(messy) == text


@pytest.mark.parametrize("family, kw", [("repetition", {"distance": 3}), ("surface", {"distance": 3}),
                                        ("bacon_shor", {"distance": 3}), ("steane", {"level": 1})])
def test_generator_round_trip(family, kw):
    c = generate_memory(CodeSpec(family, rounds=2, **kw))
    assert parse_circuit(emit_circuit(c), c.num_qubits) == c


def test_builder_collapses_ticks_and_returns_records():
    b = CircuitBuilder()
    b.append("H", [0])
    b.tick()
    b.tick()
    assert b.measure("M", [0, 1]) == [0, 1]
    assert b.measure("M", [1]) == [2]
    b.detector([1, 2])
    c = b.build()
    assert sum(i.name == "TICK" for i in c) == 1
    assert emit_circuit(c).splitlines()[-1] == "DETECTOR rec[-2] rec[-1]"


@given(st.integers(0, 2**32 - 1))
def test_layerize_preserves_per_qubit_order(seed):
    rng = np.random.default_rng(seed)
    c = random_unitary_circuit(rng, 5, 20)
    out = layerize(c)

    def per_qubit(circ):
        seq = {q: [] for q in range(circ.num_qubits)}
        for ins in circ:
            for grp in ins.groups():
                for q in grp:
                    seq[q].append((ins.name, grp, ins.params))
        return seq

    assert per_qubit(out) == per_qubit(c)
    for layer in out.layers():
        used = [q for ins in layer for q in ins.qubits]
        assert len(used) == len(set(used))
