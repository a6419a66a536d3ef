import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qecforge.arch import add_shuttling, device_preset, make_topology
from qecforge.circuit import Circuit, parse_circuit
from qecforge.codes import CodeSpec, generate_memory
from qecforge.sim.tableau import unitary_equal
from qecforge.transpile import (GATESETS, LayoutError, TranslationError, get_gateset, layout, overhead_metrics,
                                route, translate, transpile)

from generators import random_unitary_circuit

DEVICES = {"line": lambda: make_topology("line", 6), "grid": lambda: make_topology("grid", 3, 3),
           "heavy_hex": lambda: make_topology("heavy_hex", 2, 3), "cuboid": lambda: make_topology("cuboid", 2, 2, 2)}


def _padded(c: Circuit, n: int) -> Circuit:
    return Circuit(c.instructions, n)


def _native(c: Circuit, g) -> bool:
    return all(i.is_annotation or i.name in g.gate_names or i.name in ("M", "MR", "R") for i in c)


def test_trivial_layout_is_identity():
    lay = layout(parse_circuit("CX 0 3"), make_topology("grid", 3, 3), "trivial")
    assert tuple(lay) == (0, 1, 2, 3)


def test_dense_layout_picks_a_block():
    lay = layout(parse_circuit("CX 0 1\nCX 2 3"), make_topology("grid", 3, 3), "dense")
    g = make_topology("grid", 3, 3).graph()
    phys = lay.logical_to_physical
    assert len(set(phys)) == 4
    # a 2x2 block: 4 induced edges, the maximum any 4-subset of the grid reaches
    assert g.subgraph(phys).number_of_edges() == 4


def test_layout_too_large():
    with pytest.raises(LayoutError):
        layout(parse_circuit("CX 0 9"), make_topology("grid", 3, 3), "dense")


def test_line_distance_two_needs_one_swap():
    res = transpile(parse_circuit("CX 0 2"), make_topology("line", 3), "trivial", routing="basic",
                    gateset="stim_clifford")
    assert res.swaps.swaps_inserted == 1
    assert res.circuit.count("CX") == 4
    assert res.metrics.pct == pytest.approx(300.0)


@pytest.mark.parametrize("strategy", ["basic", "stochastic", "sabre"])
def test_complete_graph_needs_no_swaps(strategy):
    c = generate_memory(CodeSpec("surface", 3, rounds=2))
    res = transpile(c, make_topology("complete", c.num_qubits), "trivial", routing=strategy)
    assert res.swaps.swaps_inserted == 0


@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(DEVICES)), st.sampled_from(["basic", "stochastic", "sabre"]),
       st.sampled_from(["trivial", "dense", "sabre"]), st.sampled_from(sorted(GATESETS)))
def test_routing_valid_and_semantics_preserved(seed, dev_name, routing, lay, gateset):
    rng = np.random.default_rng(seed)
    dev = DEVICES[dev_name]()
    c = random_unitary_circuit(rng, int(rng.integers(2, 6)), 20)
    res = transpile(c, dev, lay, routing=routing, gateset=gateset, seed=seed % 1000)
    out = res.circuit
    for ins in out:
        for grp in ins.groups():
            if len(grp) == 2 and not ins.is_annotation:
                assert dev.has_edge(*grp)
    assert _native(out, get_gateset(gateset))
    t = res.tracker
    assert t.replay() == t.final
    assert unitary_equal(_padded(c, dev.num_qubits), _padded(out, dev.num_qubits), t.initial, t.final)


def test_tracker_snapshots_compose():
    res = transpile(generate_memory(CodeSpec("surface", 3, rounds=1)), make_topology("grid", 4, 5), "trivial",
                    routing="sabre")
    t = res.tracker
    assert len(t.snapshots) == len(t.swaps) == res.swaps.swaps_inserted > 0
    l2p = list(t.initial)
    for (_, p, q), snap in zip(t.swaps, t.snapshots):
        a, b = l2p.index(p), l2p.index(q)
        l2p[a], l2p[b] = q, p
        assert l2p == list(snap)


def test_routing_is_deterministic_per_seed():
    c = generate_memory(CodeSpec("surface", 3, rounds=2))
    dev = make_topology("grid", 5, 5)
    for strat in ("stochastic", "sabre"):
        a = transpile(c, dev, "sabre", routing=strat, seed=4)
        b = transpile(c, dev, "sabre", routing=strat, seed=4)
        assert a.circuit == b.circuit and a.tracker == b.tracker


def test_measurements_and_detectors_survive_routing():
    c = generate_memory(CodeSpec("repetition", 3, rounds=2))
    res = transpile(c, make_topology("line", 5), "trivial", routing="sabre", gateset="heron")
    assert res.circuit.num_measurements == c.num_measurements
    assert res.circuit.num_detectors == c.num_detectors
    assert res.tracker.num_measurements == c.num_measurements


def test_disconnected_device_rejected():
    from qecforge.arch import Device
    from qecforge.transpile import RoutingError
    d = Device.from_dict({"qubits": [{"id": i, "x": i, "y": 0} for i in range(4)],
                          "edges": [{"a": 0, "b": 1}, {"a": 2, "b": 3}]})
    with pytest.raises(RoutingError):
        route(parse_circuit("CX 0 2"), d, [0, 1, 2, 3], "basic")


def test_shuttle_links_count_as_edges():
    dev = add_shuttling(make_topology("grid", 2, 3))
    res = transpile(parse_circuit("CX 0 5"), dev, "trivial", routing="sabre")
    assert res.swaps.swaps_inserted == 0


def test_cx_on_heron():
    out = translate(parse_circuit("CX 0 1"), "heron")
    assert out.count("CZ") == 1 and out.count("CX") == 0
    assert _native(out, get_gateset("heron"))
    assert unitary_equal(parse_circuit("CX 0 1"), out)


@pytest.mark.parametrize("g", ["heron", "h2"])
def test_swap_is_three_entanglers(g):
    out = translate(parse_circuit("SWAP 0 1"), g)
    assert out.two_qubit_gate_count() == 3
    assert unitary_equal(parse_circuit("SWAP 0 1"), out)


@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(GATESETS)), st.booleans())
def test_translate_equivalent_and_idempotent(seed, g, opt):
    c = random_unitary_circuit(np.random.default_rng(seed), 4, 25)
    once = translate(c, g, opt)
    assert _native(once, get_gateset(g))
    assert unitary_equal(c, _padded(once, c.num_qubits))
    assert translate(once, g, opt).gate_count() == once.gate_count()


def test_optimize_cancels_adjacent_inverses():
    c = parse_circuit("H 0\nH 0\nCX 0 1\nCX 0 1\nS 1")
    assert translate(c, "stim_clifford", optimize=True).gate_count() == 1


def test_translate_rejects_non_clifford_angle():
    with pytest.raises((TranslationError, ValueError)):
        translate(parse_circuit("RZ(0.3) 0"), "heron")


def test_overhead_examples():
    c = parse_circuit("CX 0 1\n" * 100)
    assert overhead_metrics(c, c, 0).pct == 0.0
    after = parse_circuit("CX 0 1\n" * 130)
    m = overhead_metrics(c, after, 10)
    assert (m.extra_2q, m.pct) == (30, pytest.approx(30.0))


def test_translation_metric_definition():
    c = parse_circuit("CX 0 1")
    out = translate(c, "heron")
    m = overhead_metrics(c, out, 0)
    assert m.gates_added_per_original == pytest.approx(out.gate_count() - 1)


def test_sabre_layout_not_worse_than_trivial():
    c = generate_memory(CodeSpec("surface", 3, rounds=3))
    g = make_topology("grid", 5, 5)
    triv = [transpile(c, g, "trivial", routing="sabre", seed=s).swaps.swaps_inserted for s in range(20)]
    sab = [transpile(c, g, "sabre", routing="sabre", seed=s).swaps.swaps_inserted for s in range(20)]
    assert np.median(sab) <= np.median(triv)


def test_steane_routes_worse_on_grid_than_cube():
    c = generate_memory(CodeSpec("steane", level=1, rounds=2))
    assert c.two_qubit_gate_count() == 48

    def median_extra(dev):
        return np.median([transpile(c, dev, "sabre", routing="sabre", seed=s).metrics.extra_2q for s in range(10)])

    grid, cube = median_extra(make_topology("grid", 5, 5)), median_extra(make_topology("cuboid", 3, 3, 3))
    assert grid > cube > 0


def test_presets_route_surface_code():
    c = generate_memory(CodeSpec("surface", 3, rounds=1))
    for name in ("willow_x3", "apollo_768"):
        dev = device_preset(name)
        res = transpile(c, dev, "dense", routing="sabre")
        assert _native(res.circuit, get_gateset(dev.gateset))
