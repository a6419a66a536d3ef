import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qecforge.arch import Device, flamingo, make_topology, nighthawk
from qecforge.circuit import Circuit, emit_circuit, parse_circuit
from qecforge.codes import CodeSpec, build_layout, generate_memory
from qecforge.noise import (NoiseError, NoiseModel, PauliProbs, apply_noise, preset_names, shuttle_error, si1000,
                            twirl_idle)

from generators import random_unitary_circuit

times = st.floats(0.1, 1e4)


def test_twirl_examples():
    assert twirl_idle(0, 5, 5) == PauliProbs(0, 0, 0)
    pp = twirl_idle(1, 1, 1)
    expect = (1 - math.exp(-1)) / 4
    assert pp.as_tuple() == pytest.approx((expect,) * 3)
    assert expect == pytest.approx(0.158030, abs=1e-6)
    assert twirl_idle(1e6, 3, 2).as_tuple() == pytest.approx((0.25, 0.25, 0.25))


def test_twirl_rejects_unphysical_t2():
    with pytest.raises(NoiseError):
        twirl_idle(1, 1, 2.5)
    with pytest.raises(NoiseError):
        twirl_idle(-1, 1, 1)


@given(st.floats(0, 1e4), st.floats(0, 1e4), times, st.floats(0.01, 2.0))
def test_twirl_valid_and_monotone(dt1, dt2, t1, t2_ratio):
    t2 = t1 * t2_ratio
    a, b = sorted((dt1, dt2))
    pa, pb = twirl_idle(a, t1, t2), twirl_idle(b, t1, t2)
    assert min(pa.as_tuple()) >= 0 and pa.total <= 1
    assert pa.p_x <= pb.p_x + 1e-15
    # with T1 = T2 every component is nondecreasing in dt
    qa, qb = twirl_idle(a, t1, t1), twirl_idle(b, t1, t1)
    assert all(x <= y + 1e-15 for x, y in zip(qa.as_tuple(), qb.as_tuple()))


def test_shuttle_error_time_law():
    assert shuttle_error(0, 4, 0.55, 100, 100).total == 0
    assert shuttle_error(3, 4, 0.55, 100, 80) == twirl_idle(2 * 3 * 4 / 0.55, 100, 80)
    assert shuttle_error(6, 4, 0.55, 100, 80) == twirl_idle(2 * (2 * 3 * 4 / 0.55), 100, 80)


def test_uniform_cx_example():
    out = apply_noise(parse_circuit("CX 0 1"), NoiseModel.uniform(0.004))
    assert emit_circuit(out) == "CX 0 1\nDEPOLARIZE2(0.004) 0 1\n"


def test_empty_circuit():
    assert apply_noise(Circuit(), NoiseModel.uniform(0.01)) == Circuit()


def test_si1000_rates():
    m = si1000(0.004)
    assert (m.p_2q, m.p_meas_flip, m.p_reset) == pytest.approx((0.004, 0.02, 0.008))
    assert (m.p_1q, m.p_idle, m.p_idle_measure) == pytest.approx((0.0004, 0.0004, 0.008))
    assert all(v == 0 for v in si1000(0).rates().values())
    with pytest.raises(NoiseError):
        si1000(0.2)


def test_si1000_applies_to_every_two_qubit_gate():
    out = apply_noise(parse_circuit("CX 0 1\nCZ 1 2\nSWAP 0 2"), si1000(0.002))
    assert out.count("DEPOLARIZE2") == 3


def test_si1000_idle_during_measurement_window():
    out = apply_noise(parse_circuit("H 0 1\nTICK\nM 0\nTICK\nH 0 1"), si1000(0.002))
    text = emit_circuit(out)
    assert "DEPOLARIZE1(0.004) 1" in text


def test_willow_table_rates():
    m = NoiseModel.preset("willow")
    assert (m.p_1q, m.p_2q, m.p_spam, m.p_idle, m.p_crosstalk, m.p_leakage) == pytest.approx(
        (6.2e-4, 2.8e-3, 9.5e-3, 9.0e-3, 5.5e-4, 2.5e-4))


def test_apollo_uses_fixed_shuttle_error():
    assert NoiseModel.preset("apollo").shuttle_model == "fixed"


def test_presets_listed():
    assert set(preset_names()) >= {"willow", "apollo", "flamingo", "nighthawk", "infleqtion"}
    with pytest.raises(NoiseError):
        NoiseModel.preset("nope")


def test_rates_validated():
    with pytest.raises(NoiseError):
        NoiseModel(p_1q=1.5)
    with pytest.raises(NoiseError):
        NoiseModel(durations={"1q": 0})


@given(st.integers(0, 2**32 - 1), st.sampled_from(["uniform", "si1000", "willow", "zero"]))
def test_projecting_out_noise_recovers_input(seed, kind):
    rng = np.random.default_rng(seed)
    c = random_unitary_circuit(rng, 4, 15, quarter_turns=False)
    model = {"uniform": NoiseModel.uniform(0.01), "si1000": si1000(0.003), "zero": NoiseModel.uniform(0.0),
             "willow": NoiseModel.preset("willow")}[kind]
    out = apply_noise(c, model, make_topology("complete", 4))
    assert out.without_noise() == c
    if kind == "zero":
        assert out == c


def test_memory_circuit_noise_projection():
    c = generate_memory(CodeSpec("surface", 3, rounds=2))
    out = apply_noise(c, si1000(0.001))
    assert out.without_noise() == c
    assert out.num_detectors == c.num_detectors


def test_noisy_input_rejected():
    with pytest.raises(NoiseError):
        apply_noise(parse_circuit("X_ERROR(0.1) 0"), NoiseModel.uniform(0.1))


def test_gate_off_device_rejected():
    with pytest.raises(NoiseError):
        apply_noise(parse_circuit("CX 0 2"), NoiseModel.uniform(0.01), make_topology("line", 3))


def test_measure_and_reset_flips_placed_correctly():
    out = emit_circuit(apply_noise(parse_circuit("R 0\nTICK\nM 0"), NoiseModel.uniform(0.01))).splitlines()
    assert out == ["R 0", "X_ERROR(0.01) 0", "TICK", "X_ERROR(0.01) 0", "M 0"]


def test_constant_idle_once_per_tick():
    out = apply_noise(parse_circuit("H 0 1\nTICK\nH 0\nTICK\nH 0 1"), NoiseModel.uniform(0.01))
    idles = [i for i in out if i.name == "DEPOLARIZE1" and 1 in i.targets]
    # two gates on qubit 1 plus one idle moment
    assert len(idles) == 3


def test_twirled_idle_uses_qubit_times():
    d = Device.from_dict({"qubits": [{"id": 0, "x": 0, "y": 0, "t1": 50, "t2": 50},
                                     {"id": 1, "x": 1, "y": 0, "t1": 50, "t2": 50}],
                          "edges": [{"a": 0, "b": 1}], "gateset": "stim_clifford"})
    m = NoiseModel("device", idle_model="twirl", durations={"1q": 0.5, "2q": 1.0, "measure": 1, "reset": 1})
    out = apply_noise(parse_circuit("H 0 1\nTICK\nH 0\nTICK\nH 0 1"), m, d)
    ch = [i for i in out if i.name == "PAULI_CHANNEL_1"]
    assert len(ch) == 1 and ch[0].targets == (1,)
    assert ch[0].params == pytest.approx(twirl_idle(0.5, 50, 50).as_tuple())


def test_crosstalk_on_neighbours():
    m = NoiseModel("device", p_crosstalk=0.001, idle_model="none")
    c = parse_circuit("H 0 1 2 3\nTICK\nCX 1 2")
    out = apply_noise(c, m, make_topology("line", 4))
    hit = [i for i in out if i.name == "DEPOLARIZE1"]
    assert [i.targets for i in hit] == [(0, 3)]


def test_leakage_propagates_to_partner():
    m = NoiseModel("device", p_leakage=0.01, idle_model="none")
    on = [i for i in apply_noise(parse_circuit("CX 0 1"), m) if i.name.startswith("PAULI")]
    assert len(on) == 1 and on[0].name == "PAULI_CHANNEL_2"
    assert sum(on[0].params) == pytest.approx(2 * 0.01 * 0.99)
    off = apply_noise(parse_circuit("CX 0 1"), NoiseModel("device", p_leakage=0.01, idle_model="none",
                                                           propagate_leakage=False))
    assert [i.name for i in off] == ["CX", "X_ERROR"]


def _inter_intra_rates(device, model):
    inter = next(e for e in device.edges if e.link_class == "inter_qpu")
    intra = next(e for e in device.edges if e.link_class == "local")
    text = f"CX {inter.a} {inter.b}\nTICK\nCX {intra.a} {intra.b}"
    out = [i for i in apply_noise(parse_circuit(text), model, device) if i.name == "DEPOLARIZE2"]
    return out[0].params[0], out[1].params[0]


def test_inter_qpu_scale_applied():
    m = NoiseModel("device", p_2q=0.002, idle_model="none")
    inter, intra = _inter_intra_rates(flamingo(tile_rows=3, tile_cols=3, inter_links=2), m)
    assert (inter, intra) == pytest.approx((0.02, 0.002))


def test_nighthawk_inter_equals_intra():
    m = NoiseModel("device", p_2q=0.002, idle_model="none")
    inter, intra = _inter_intra_rates(nighthawk(tile_rows=3, tile_cols=3), m)
    assert inter == intra == pytest.approx(0.002)


def test_tracker_mismatch_rejected():
    from qecforge.transpile import transpile
    dev = make_topology("line", 3)
    res = transpile(parse_circuit("CX 0 2\nM 0 1 2"), dev, "trivial", routing="basic")
    apply_noise(res.circuit, NoiseModel.uniform(0.01), dev, res.tracker)
    with pytest.raises(NoiseError):
        apply_noise(parse_circuit("CX 0 1\nM 0"), NoiseModel.uniform(0.01), dev, res.tracker)


def test_code_capacity_flips_data_once():
    spec = CodeSpec("surface", 3, rounds=2)
    c = generate_memory(spec)
    data = build_layout(spec).data_qubits
    out = apply_noise(c, NoiseModel.code_capacity(0.05), data_qubits=data)
    flips = [i for i in out if i.name == "X_ERROR"]
    assert sorted(q for i in flips for q in i.targets) == sorted(data)
    with pytest.raises(NoiseError):
        apply_noise(c, NoiseModel.code_capacity(0.05))


def test_model_json_round_trip():
    for m in (si1000(0.002), NoiseModel.preset("willow"), NoiseModel.uniform(0.01), NoiseModel.code_capacity(0.1)):
        assert NoiseModel.from_json(m.to_json()) == m
        assert set(m.to_dict()) >= {"kind", "p", "rates", "durations", "scales"}
