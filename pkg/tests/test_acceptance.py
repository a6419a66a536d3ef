"""Acceptance criteria 1-10, each printing one PASS/FAIL line."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from qecforge.arch import make_topology
from qecforge.bench import ExperimentConfig, estimate_repetition_overhead, run_experiment, to_csv
from qecforge.circuit import Circuit
from qecforge.codes import CodeSpec, build_layout, encoding_rate, generate_memory, max_distance
from qecforge.decode import BPOSD, Decoder, ExactTables, MatchingGraph, logical_error_rate
from qecforge.noise import NoiseError, NoiseModel, apply_noise, twirl_idle
from qecforge.sim import compile_dem, frame_sample, tableau_sample_detectors
from qecforge.sim.tableau import unitary_equal
from qecforge.transpile import GATESETS, transpile, translate

from generators import random_graphlike_dem, random_noisy_circuit, random_unitary_circuit, syndrome_int
from oracles import sigma_budget, verdict, z_scores

pytestmark = pytest.mark.acceptance

DEM_SEEDS = range(200)
DEM_P = (0.01, 0.1)


def _dem(seed):
    return random_graphlike_dem(np.random.default_rng(seed), 12, 24, p_range=DEM_P)


def _all_syndromes(D):
    s = np.arange(1 << D)
    return ((s[:, None] >> np.arange(D)) & 1).astype(bool)


def test_1_repetition_code_capacity():
    start, lines, ok = time.perf_counter(), [], True
    spec = CodeSpec("repetition", 3, rounds=1)
    for p in (0.05, 0.1):
        shots = 100_000
        c = apply_noise(generate_memory(spec), NoiseModel.code_capacity(p), data_qubits=build_layout(spec).data_qubits)
        det, obs = frame_sample(c, shots, seed=int(p * 1000))
        r = logical_error_rate(Decoder(compile_dem(c), "mwpm").decode_batch(det), obs)
        expect = 3 * p**2 - 2 * p**3
        sigma = math.sqrt(expect * (1 - expect) / shots)
        ok &= abs(r.rate - expect) <= 3 * sigma
        lines.append(f"p={p}: {r.rate:.5f} vs {expect:.5f}, {(r.rate - expect) / sigma:+.2f} sigma")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10
    assert verdict("1", ok, "; ".join(lines) + f"; {elapsed:.1f} s")


def _surface(d, p, shots=100_000):
    return run_experiment(ExperimentConfig(code={"family": "surface", "distance": d},
                                           device={"topology": "complete", "dims": [60]},
                                           noise={"kind": "si1000", "p": p}, decoder={"kind": "mwpm"},
                                           shots=shots, seed=d))


def test_2_subthreshold_suppression():
    start = time.perf_counter()
    r3, r5 = _surface(3, 0.001), _surface(5, 0.001)
    gap = (r3.logical_error_rate - r5.logical_error_rate) / math.hypot(r3.stderr, r5.stderr)
    elapsed = time.perf_counter() - start
    ok = gap > 3 and elapsed < 120
    h3, h5 = _surface(3, 0.008, 2000), _surface(5, 0.008, 2000)
    print(f"p=0.008 report (not asserted): d3 {h3.logical_error_rate:.4f}, d5 {h5.logical_error_rate:.4f}")
    assert verdict("2", ok, f"d3 {r3.logical_error_rate:.5f}, d5 {r5.logical_error_rate:.5f}, "
                             f"{gap:.1f} sigma apart; {elapsed:.1f} s")


def test_3a_matching_weight_equals_brute_force():
    checked = bad = 0
    for seed in DEM_SEEDS:
        dem = _dem(seed)
        best = ExactTables.build(dem.check_matrix()).syndrome_min_weight()
        bits = _all_syndromes(dem.num_detectors)
        # exact DP below the limit, blossom at exact_limit=0
        graphs = [MatchingGraph.from_dem(dem), MatchingGraph.from_dem(dem, exact_limit=0)]
        for s in range(len(bits)):
            for g in graphs:
                _, w = g.decode_with_weight(bits[s])
                checked += 1
                same = (w == pytest.approx(best[s], abs=1e-9)) if np.isfinite(best[s]) else not np.isfinite(w)
                bad += not same
    assert verdict("3a", bad == 0, f"{checked - bad}/{checked} syndrome weights match over {len(DEM_SEEDS)} DEMs")


@pytest.mark.xfail(strict=True, reason="OSD-0 is not maximum likelihood on every unique-optimum syndrome")
def test_3b_osd0_matches_ml_prediction():
    total = bad = 0
    for seed in DEM_SEEDS:
        dem = _dem(seed)
        H = dem.check_matrix()
        tables = ExactTables.build(H)
        det, _, _ = dem.sample(256, seed=seed)
        det = np.unique(det, axis=0)
        det = det[det.any(axis=1)]
        if not len(det):
            continue
        pred = BPOSD(H, osd_order=0).decode_batch(det)
        for e, p in zip(det, pred):
            obs, unique = tables.ml_error_prediction(syndrome_int(e))
            if unique:
                total += 1
                bad += int(p[0]) != obs
    assert verdict("3b", bad == 0, f"{total - bad}/{total} unique-optimum syndromes agree with ML")


def test_4_frame_matches_tableau():
    rng = np.random.default_rng(0)
    z, exact = [], True
    for i in range(50):
        c = random_noisy_circuit(rng, int(rng.integers(1, 13)))
        fd, fo = frame_sample(c, 100_000, seed=2 * i)
        td, to = tableau_sample_detectors(c, 100_000, seed=2 * i + 1)
        z.append(z_scores(np.hstack([fd, fo]), np.hstack([td, to])))
        sd, so = frame_sample(c, 500, seed=i, batch_size=64)
        ud, uo = tableau_sample_detectors(c, 500, seed=i, share_noise=True)
        exact &= np.array_equal(sd, ud) and np.array_equal(so, uo)
    z = np.concatenate(z)
    over, budget = int(np.sum(np.abs(z) > 3)), sigma_budget(len(z))
    assert verdict("4", over <= budget and exact,
                   f"{over}/{len(z)} marginals beyond 3 sigma (budget {budget}); shared-noise runs identical: {exact}")


DEVICES_8 = [lambda: make_topology("line", 8), lambda: make_topology("grid", 3, 3),
             lambda: make_topology("heavy_hex", 3, 3), lambda: make_topology("cuboid", 2, 2, 2)]


def test_5_transpiler_soundness():
    failures, runs = [], 0
    for lay in ("trivial", "dense", "sabre"):
        for routing in ("basic", "stochastic", "sabre"):
            for g in sorted(GATESETS):
                for i in range(100):
                    rng = np.random.default_rng(i)
                    dev = DEVICES_8[i % len(DEVICES_8)]()
                    c = random_unitary_circuit(rng, int(rng.integers(2, 9)), 20)
                    res = transpile(c, dev, lay, routing=routing, gateset=g, seed=i)
                    out, t = res.circuit, res.tracker
                    runs += 1
                    on_edges = all(dev.has_edge(*grp) for ins in out if not ins.is_annotation
                                   for grp in ins.groups() if len(grp) == 2)
                    n = dev.num_qubits
                    same = unitary_equal(Circuit(c.instructions, n), Circuit(out.instructions, n), t.initial, t.final)
                    three = (out.two_qubit_gate_count()
                             == translate(c, g).two_qubit_gate_count() + 3 * res.swaps.swaps_inserted)
                    if not (on_edges and same and three):
                        failures.append((lay, routing, g, i))
    memory = generate_memory(CodeSpec("surface", 3, rounds=2))
    zero = all(transpile(memory, make_topology("complete", 20), lay, routing=r).swaps.swaps_inserted == 0
               for lay in ("trivial", "dense", "sabre") for r in ("basic", "stochastic", "sabre"))
    assert verdict("5", not failures and zero,
                   f"{runs - len(failures)}/{runs} routed circuits sound; complete graphs swap-free: {zero}")


def test_6_encoding_rate_formulas():
    checks = []
    for d in range(3, 16, 2):
        checks += [(encoding_rate("surface", d), Fraction(1, 2 * d * d - 1)),
                   (encoding_rate("bacon_shor", d), Fraction(1, d * d)),
                   (encoding_rate("color", d), Fraction(4, (3 * d - 1) ** 2)),
                   (encoding_rate("heavy_hex", d), Fraction(2, 5 * d * d - 2 * d - 1))]
    checks.append((encoding_rate(CodeSpec("gross")), Fraction(1, 24)))
    checks += [(encoding_rate("steane", level=m), Fraction(1, 2 * 7**m)) for m in (1, 2, 3)]
    ok = all(isinstance(a, Fraction) and a == b for a, b in checks)
    assert verdict("6", ok, f"{len(checks)} exact rational rates")


def test_7_max_distance():
    got = {b: max_distance("surface", b) for b in (60, 40, 20)}
    assert verdict("7", got == {60: 5, 40: 3, 20: 3}, str(got))


def _idle(kind, p, shots=100_000):
    return run_experiment(ExperimentConfig(experiment=f"idle_{kind}", noise={"kind": "uniform", "p": p},
                                           shots=shots, seed=8))


def test_8_protected_idle_gadget():
    prot, bare = _idle("protected", 0.004), _idle("unprotected", 0.004)
    ok = prot.raw_error_rate > bare.raw_error_rate
    ratios = []
    for p in (0.001, 0.004, 0.01):
        ratios.append(_idle("protected", p).raw_error_rate / estimate_repetition_overhead(p, p, p))
    ok &= all(0.5 <= r <= 2 for r in ratios)
    assert verdict("8", ok, f"p=0.004 protected {prot.raw_error_rate:.4f} > bare {bare.raw_error_rate:.4f}; "
                             f"measured / formula = {', '.join(f'{r:.2f}' for r in ratios)}")


def test_9_twirl_properties():
    rng = np.random.default_rng(9)
    ok = True
    for _ in range(2000):
        t1 = float(rng.uniform(1, 500))
        t2 = float(rng.uniform(0.01, 2)) * t1
        p = twirl_idle(float(rng.exponential(t1)), t1, t2).as_tuple()
        ok &= min(p) >= 0 and sum(p) <= 0.75 + 1e-12
    ok &= twirl_idle(0.0, 50, 70).as_tuple() == (0, 0, 0)
    ok &= np.allclose(twirl_idle(1e9, 50, 70).as_tuple(), (0.25, 0.25, 0.25))
    try:
        twirl_idle(1.0, 10, 21)
        ok = False
    except NoiseError:
        pass
    assert verdict("9", bool(ok), "nonnegative, total <= 3/4, limits at 0 and infinity, T2 > 2 T1 rejected")


def test_10_determinism():
    configs = [
        ExperimentConfig(code={"family": "repetition", "distance": 3, "rounds": 3},
                         device={"topology": "grid", "dims": [3, 3]},
                         transpile={"layout": "sabre", "routing": "stochastic"},
                         noise={"kind": "uniform", "p": 0.01}, shots=20_000, seed=3, repetitions=2),
        ExperimentConfig(code={"family": "surface", "distance": 3}, device={"topology": "grid", "dims": [5, 5]},
                         noise={"kind": "si1000", "p": 0.004}, decoder={"kind": "bposd", "osd_order": 2},
                         shots=3000, seed=4),
        ExperimentConfig(experiment="idle_protected", noise={"kind": "uniform", "p": 0.004}, shots=50_000, seed=5),
    ]
    ok = all(len({to_csv([run_experiment(c, threads=t)]) for t in (1, 4, 1, 3)}) == 1 for c in configs)
    assert verdict("10", ok, f"{len(configs)} configs byte-identical across reruns and thread counts")
