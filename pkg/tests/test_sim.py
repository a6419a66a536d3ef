import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qecforge.circuit import parse_circuit
from qecforge.codes import CodeSpec, generate_memory
from qecforge.noise import NoiseModel, apply_noise, si1000
from qecforge.sim import (DemError, DetectorErrorModel, ErrorMechanism, NondeterministicError, Tableau, compile_dem,
                          frame_sample, from_b8, from_csv, merge_probability, read_table, tableau_run,
                          tableau_sample_detectors, to_b8, to_csv, write_table)

from generators import random_noisy_circuit, random_unitary_circuit
from oracles import within_3sigma, z_against, z_scores

FORCED = "R 0\nX_ERROR(1) 0\nM 0\nDETECTOR rec[-1]"


def _rep3(p=0.01, rounds=1):
    return apply_noise(generate_memory(CodeSpec("repetition", 3, rounds=rounds)), NoiseModel.uniform(p))


def test_h_measure_is_uniform():
    rec = tableau_run(parse_circuit("H 0\nM 0"), seed=3, shots=10_000)
    assert abs(rec.mean() - 0.5) < 3 * math.sqrt(0.25 / 10_000)


def test_x_measure_always_one():
    assert tableau_run(parse_circuit("X 0\nM 0"), shots=500).all()


def test_bell_pair_records_equal():
    rec = tableau_run(parse_circuit("H 0\nCX 0 1\nM 0\nM 1"), seed=1, shots=2000)
    assert np.array_equal(rec[:, 0], rec[:, 1])
    assert 0 < rec[:, 0].mean() < 1


def test_deterministic_outcomes_independent_of_seed():
    c = parse_circuit("X 0\nH 1\nCX 1 2\nH 1\nM 0 1 2")
    assert all(np.array_equal(tableau_run(c, seed=s)[[0]], [True]) for s in range(20))


def test_non_unitary_tableau_rejected():
    from qecforge.sim import NonCliffordError
    with pytest.raises(NonCliffordError):
        Tableau.from_circuit(parse_circuit("H 0\nM 0"))


@given(st.integers(0, 2**32 - 1))
def test_symplectic_invariant_after_every_gate(seed):
    c = random_unitary_circuit(np.random.default_rng(seed), 5, 30)
    t = Tableau(5)
    for ins in c:
        for grp in ins.groups():
            t.apply_gate(ins.name, grp, ins.params)
            assert t.symplectic_ok()


def test_zero_noise_frames_are_zero():
    c = generate_memory(CodeSpec("surface", 3, rounds=2))
    det, obs = frame_sample(c, 1000, seed=2)
    assert not det.any() and not obs.any()


def test_forced_flip_fires_every_shot():
    det, _ = frame_sample(parse_circuit(FORCED), 300)
    assert det.all()
    tdet, _ = tableau_sample_detectors(parse_circuit(FORCED), 300)
    assert tdet.all()


def test_nondeterministic_detector_rejected():
    with pytest.raises(NondeterministicError):
        frame_sample(parse_circuit("H 0\nM 0\nDETECTOR rec[-1]"), 10)
    with pytest.raises(NondeterministicError):
        compile_dem(parse_circuit("H 0\nM 0\nDETECTOR rec[-1]"))


@pytest.mark.parametrize("batch, threads", [(1, 1), (7, 1), (64, 4), (1000, 3), (3000, 1)])
def test_results_independent_of_batching(batch, threads):
    c = apply_noise(generate_memory(CodeSpec("surface", 3, rounds=2)), si1000(0.005))
    ref = frame_sample(c, 3000, seed=11, batch_size=256, threads=1)
    got = frame_sample(c, 3000, seed=11, batch_size=batch, threads=threads)
    assert all(np.array_equal(a, b) for a, b in zip(ref, got))


def test_seeds_give_different_samples():
    c = _rep3(0.05)
    a, _ = frame_sample(c, 2000, seed=1)
    b, _ = frame_sample(c, 2000, seed=2)
    assert not np.array_equal(a, b)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_shared_noise_frame_equals_tableau(seed, n):
    c = random_noisy_circuit(np.random.default_rng(seed), n, depth=8, p_max=0.2)
    fd, fo = frame_sample(c, 200, seed=seed % 997, batch_size=64)
    td, to = tableau_sample_detectors(c, 200, seed=seed % 997, share_noise=True)
    assert np.array_equal(fd, td) and np.array_equal(fo, to)


def test_repetition_frame_matches_tableau_statistics():
    c = _rep3(0.02, rounds=3)
    shots = 100_000
    fd, fo = frame_sample(c, shots, seed=5)
    td, to = tableau_sample_detectors(c, shots, seed=6)
    assert within_3sigma(z_scores(np.hstack([fd, fo]), np.hstack([td, to])))


def test_dem_single_mechanism():
    dem = compile_dem(parse_circuit("R 0\nX_ERROR(0.1) 0\nM 0\nDETECTOR rec[-1]"))
    assert list(dem.mechanisms) == [ErrorMechanism(0.1, (0,), ())]


def test_dem_merges_identical_symptoms():
    dem = compile_dem(parse_circuit("R 0\nX_ERROR(0.1) 0\nX_ERROR(0.1) 0\nM 0\nDETECTOR rec[-1]"))
    assert len(dem.mechanisms) == 1
    assert dem.mechanisms[0].p == pytest.approx(0.18)
    assert merge_probability(0.1, 0.1) == pytest.approx(0.1 + 0.1 - 2 * 0.01)


def test_depolarize1_components_at_third():
    dem = compile_dem(parse_circuit("R 0\nDEPOLARIZE1(0.3) 0\nM 0\nDETECTOR rec[-1]"))
    # X and Y flip the detector, Z does not
    assert dem.mechanisms[0].p == pytest.approx(merge_probability(0.1, 0.1))


def test_correlated_channel_needs_approximation():
    c = parse_circuit("R 0 1\nDEPOLARIZE2(0.15) 0 1\nM 0 1\nDETECTOR rec[-1]\nDETECTOR rec[-2]")
    with pytest.raises(DemError):
        compile_dem(c)
    dem = compile_dem(c, approximate_disjoint=True)
    # 15 components at 0.01 landing on the three nonempty symptoms
    probs = sorted(m.p for m in dem.mechanisms)
    four = 0.0
    for _ in range(4):
        four = merge_probability(four, 0.01)
    assert probs == pytest.approx([four] * 3)


def test_large_probability_is_folded():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        dem = compile_dem(parse_circuit("R 0\nX_ERROR(0.7) 0\nM 0\nDETECTOR rec[-1]"))
    assert dem.mechanisms[0].p == pytest.approx(0.3)
    assert any(issubclass(x.category, RuntimeWarning) for x in w)


@pytest.mark.parametrize("build", [lambda: _rep3(0.01), lambda: _rep3(0.03, rounds=3),
                                   lambda: apply_noise(generate_memory(CodeSpec("surface", 3, rounds=2)),
                                                       si1000(0.004))])
def test_dem_invariants(build):
    dem = compile_dem(build(), approximate_disjoint=True)
    symptoms = [m.symptom for m in dem.mechanisms]
    assert len(symptoms) == len(set(symptoms))
    assert all(0 < m.p <= 0.5 for m in dem.mechanisms)


def test_dem_marginals_match_frame_sampling():
    c = _rep3(0.01)
    dem = compile_dem(c, approximate_disjoint=True)
    shots = 100_000
    det, _ = frame_sample(c, shots, seed=9)
    assert within_3sigma(z_against(det.mean(axis=0), dem.detector_marginals(), shots))


def test_dem_sampling_matches_circuit_correlations():
    c = apply_noise(generate_memory(CodeSpec("repetition", 3, rounds=2)), NoiseModel.uniform(0.02))
    dem = compile_dem(c, approximate_disjoint=True)
    shots = 100_000
    cd, co = frame_sample(c, shots, seed=4)
    dd, do, _ = dem.sample(shots, seed=4)
    a, b = np.hstack([cd, co]), np.hstack([dd, do])
    iu = np.triu_indices(a.shape[1], 1)
    pairs_a = (a[:, iu[0]] & a[:, iu[1]])
    pairs_b = (b[:, iu[0]] & b[:, iu[1]])
    assert within_3sigma(z_scores(a, b))
    assert within_3sigma(z_scores(pairs_a, pairs_b))


def test_dem_text_round_trip():
    c = apply_noise(generate_memory(CodeSpec("surface", 3, rounds=2)), si1000(0.004))
    dem = compile_dem(c, approximate_disjoint=True)
    text = dem.to_text()
    assert " ^ " in text
    back = DetectorErrorModel.from_text(text)
    assert back.to_text() == text
    assert (back.num_detectors, back.num_observables) == (dem.num_detectors, dem.num_observables)
    assert sorted(m.symptom for m in back.mechanisms) == sorted(m.symptom for m in dem.mechanisms)


def test_dem_text_examples():
    dem = DetectorErrorModel.from_text("# comment\nerror(0.125) D3 D7 L0\ndetector D9\n")
    assert dem.num_detectors == 10 and dem.num_observables == 1
    assert dem.mechanisms[0].symptom == ((3, 7), (0,))
    with pytest.raises(DemError):
        DetectorErrorModel.from_text("error(0.1) Q3")


def test_dem_check_matrix():
    dem = DetectorErrorModel([ErrorMechanism(0.1, (0,), ()), ErrorMechanism(0.2, (0, 1), (0,))], 2, 1)
    cm = dem.check_matrix()
    assert cm.H.tolist() == [[1, 1], [0, 1]]
    assert cm.L.tolist() == [[0, 1]]
    assert cm.priors.tolist() == [0.1, 0.2]


@given(st.integers(1, 40), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_b8_and_csv_round_trip(rows, cols, seed):
    t = np.random.default_rng(seed).random((rows, cols)) < 0.4
    assert np.array_equal(from_b8(to_b8(t), cols), t)
    assert np.array_equal(from_csv(to_csv(t)), t)


def test_b8_bit_order():
    t = np.zeros((2, 10), dtype=bool)
    t[0, 0] = t[0, 9] = t[1, 3] = True
    assert to_b8(t) == bytes([0b00000001, 0b00000010, 0b00001000, 0])


def test_table_files(tmp_path):
    t = np.random.default_rng(0).random((50, 13)) < 0.5
    for fmt in ("b8", "csv"):
        path = tmp_path / f"t.{fmt}"
        write_table(path, t, fmt)
        assert np.array_equal(read_table(path, 13, fmt), t)
