"""End-to-end pipeline: generate, transpile, noise, DEM, sample, decode, rate."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..arch import Device, device_preset, flamingo, make_topology, nighthawk, sample_qubit_quality
from ..circuit import Circuit
from ..codes import CodeSpec, build_layout, memory_circuit
from ..decode import Decoder
from ..noise import NoiseModel, apply_noise, si1000
from ..sim import compile_dem, frame_sample
from ..transpile import overhead_metrics, transpile
from .config import ExperimentConfig
from .gadget import protected_idle_circuit, unprotected_idle_circuit

STAGES = ("generate", "device", "transpile", "noise", "dem", "sample", "decode")
PARITY_CHECK_FAMILIES = ("bacon_shor", "steane_concat")


class StageError(RuntimeError):
    """A pipeline failure, attributed to the stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of one config, aggregated over its repetitions.

    ``raw_error_rate`` is the fraction of shots in which any detector or
    observable deviates from its noiseless value; the gadget comparison
    uses it as the "any fault reached the register" rate.
    """

    name: str
    config_hash: str
    experiment: str
    code: str
    distance: int
    rounds: int
    device: str
    noise: str
    decoder: str
    variant: str
    shots: int
    failures: int
    logical_error_rate: float
    stderr: float
    raw_error_rate: float
    swaps_inserted: float
    pct_2q_overhead: float
    gates_added_per_original: float
    num_qubits: int
    num_detectors: int
    num_mechanisms: int
    repetitions: int
    seed: int
    sample_seeds: Tuple[int, ...]
    transpile_seeds: Tuple[int, ...]
    version: str
    wall_time_s: float = 0.0
    config: Dict[str, Any] = field(default_factory=dict, compare=False)


def sample_seed(seed: int, rep: int) -> int:
    """Sampling seed of repetition ``rep``."""
    return int(np.random.SeedSequence([int(seed), int(rep)]).generate_state(1)[0])


def build_device(spec: Optional[Dict[str, Any]]) -> Optional[Device]:
    if spec is None:
        return None
    if "topology" in spec:
        dev = make_topology(spec["topology"], *spec.get("dims", ()))
    else:
        name = spec["preset"].lower()
        params = spec.get("params") or {}
        if params and name == "flamingo":
            dev = flamingo(**params)
        elif params and name == "nighthawk":
            dev = nighthawk(**params)
        elif params:
            raise ValueError(f"preset {name!r} takes no params")
        else:
            dev = device_preset(name, spec.get("shuttling"))
    if spec.get("qpus") is not None:
        keep = [q.index for q in dev.qubits if dev.qpus[q.index] in set(spec["qpus"])]
        dev = dev.subdevice(keep)
    if spec.get("gateset"):
        dev = dev.with_gateset(spec["gateset"])
    if spec.get("inter_qpu_scale") is not None:
        dev = dev.with_error_scale("inter_qpu", float(spec["inter_qpu_scale"]))
    q = spec.get("quality")
    if q:
        dev = sample_qubit_quality(dev, float(q.get("mean", 330.14)), float(q.get("std", 0.0)),
                                   int(q.get("seed", 0)), q.get("mean_t1"))
    return dev


def build_noise(spec: Dict[str, Any], device: Optional[Device]) -> NoiseModel:
    spec = dict(spec)
    kind = spec.pop("kind", None)
    preset = spec.pop("preset", None)
    p = spec.pop("p", None)
    if preset is not None:
        model = NoiseModel.preset(preset)
    elif kind == "device":
        if device is None:
            raise ValueError("device noise needs a device")
        model = NoiseModel.for_device(device)
    elif kind == "si1000":
        model = si1000(float(p))
    elif kind == "uniform":
        model = NoiseModel.uniform(float(p))
    elif kind == "code_capacity":
        model = NoiseModel.code_capacity(float(p))
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    return replace(model, **spec) if spec else model


def default_variant(family: str) -> str:
    return "parity_check" if family in PARITY_CHECK_FAMILIES else "batch"


def _stage(name: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except StageError:
        raise
    except Exception as e:  # noqa: BLE001 - re-raised with the stage attached
        raise StageError(name, e) from e


def _generate(cfg: ExperimentConfig):
    """Circuit, data qubits, and (code label, distance, rounds)."""
    if cfg.experiment == "idle_protected":
        return protected_idle_circuit(), [0, 1, 2], ("repetition_gadget", 3, 1)
    if cfg.experiment == "idle_unprotected":
        return unprotected_idle_circuit(), [0], ("unprotected", 1, 1)
    code = dict(cfg.code)
    for k in ("bb_a", "bb_b"):
        if k in code:
            code[k] = tuple(tuple(t) for t in code[k])
    spec = CodeSpec(**code)
    lay = build_layout(spec)
    return memory_circuit(lay, spec.rounds), list(range(lay.num_data)), (spec.family, spec.distance, spec.rounds)


def run_experiment(cfg: ExperimentConfig, threads: Optional[int] = None) -> ExperimentResult:
    """Run one configuration through the whole pipeline.

    Each repetition transpiles afresh with seed ``transpile.seed + r`` and
    samples with its own derived seed; failures and shots are pooled.

    Raises
    ------
    StageError
        Wrapping the first failure, with its stage name.
    """
    t0 = time.perf_counter()
    circ, data, (family, distance, rounds) = _stage("generate", _generate, cfg)
    device = _stage("device", build_device, cfg.device)
    model = _stage("noise", build_noise, cfg.noise, device)
    tcfg = dict(cfg.transpile)
    dec_cfg = dict(cfg.decoder)
    kind = dec_cfg.get("kind", "mwpm")
    variant = (dec_cfg.get("variant") or default_variant(family)).replace("-", "_")
    base_tseed = int(tcfg.get("seed", 0))
    failures = shots = raw = 0
    swaps, pcts, added = [], [], []
    sseeds, tseeds = [], []
    dets = mechs = nq = 0
    for r in range(cfg.repetitions):
        tseed = base_tseed + r
        if device is not None:
            res = _stage("transpile", transpile, circ, device, tcfg.get("layout", "trivial"),
                         tcfg.get("routing", "sabre"), tcfg.get("gateset"), bool(tcfg.get("optimize", False)), tseed)
            routed, tracker = res.circuit, res.tracker
            phys_data = [res.layout[q] for q in data]
            m = res.metrics
        else:
            routed, tracker, phys_data = circ, None, data
            m = overhead_metrics(circ, circ, 0)
        swaps.append(m.swaps_inserted)
        pcts.append(m.pct)
        added.append(m.gates_added_per_original)
        noisy = _stage("noise", apply_noise, routed, model, device, tracker, phys_data)
        noisy, _ = noisy.compact()
        nq = noisy.num_qubits
        dem = _stage("dem", compile_dem, noisy, approximate_disjoint=True)
        dets, mechs = dem.num_detectors, len(dem.mechanisms)
        s = sample_seed(cfg.seed, r)
        d, o = _stage("sample", frame_sample, noisy, int(cfg.shots), s, threads=threads)
        decoder = _stage("decode", Decoder, dem, kind, variant, int(dec_cfg.get("osd_order", 0)),
                         int(dec_cfg.get("max_iters", 50)))
        pred = _stage("decode", decoder.decode_batch, d)
        failures += int(np.any(pred != o, axis=1).sum())
        raw += int((d.any(axis=1) | o.any(axis=1)).sum())
        shots += int(cfg.shots)
        sseeds.append(s)
        tseeds.append(tseed)
    rate = failures / shots
    return ExperimentResult(
        name=cfg.name, config_hash=cfg.config_hash, experiment=cfg.experiment, code=family,
        distance=int(distance), rounds=int(rounds), device=device.name if device is not None else "ideal",
        noise=model.name or model.kind, decoder=kind, variant=variant, shots=shots, failures=failures,
        logical_error_rate=rate, stderr=math.sqrt(rate * (1 - rate) / shots), raw_error_rate=raw / shots,
        swaps_inserted=float(np.mean(swaps)), pct_2q_overhead=float(np.mean(pcts)),
        gates_added_per_original=float(np.mean(added)), num_qubits=nq, num_detectors=dets, num_mechanisms=mechs,
        repetitions=cfg.repetitions, seed=cfg.seed, sample_seeds=tuple(sseeds), transpile_seeds=tuple(tseeds),
        version=__version__, wall_time_s=time.perf_counter() - t0, config=cfg.to_dict(),
    )


def _run_one(args) -> Tuple[Optional[ExperimentResult], Optional[str]]:
    cfg, threads = args
    try:
        return run_experiment(cfg, threads), None
    except StageError as e:
        return None, str(e)


def run_sweep(configs: List[ExperimentConfig], workers: int = 1,
              threads: Optional[int] = None) -> List[Tuple[ExperimentConfig, Optional[ExperimentResult], Optional[str]]]:
    """Run configs, in parallel processes when ``workers > 1``.

    Returns ``(config, result, error)`` triples in input order; a failing
    config yields ``result=None`` and its stage-attributed message.
    """
    jobs = [(c, threads) for c in configs]
    if workers > 1 and len(configs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            outs = list(ex.map(_run_one, jobs))
    else:
        outs = [_run_one(j) for j in jobs]
    return [(c, r, e) for c, (r, e) in zip(configs, outs)]
