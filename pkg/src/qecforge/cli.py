"""Command-line interface: ``qecforge generate | transpile | noise | dem | sample | decode | run``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

from . import __version__
from .arch import Device, device_preset, make_topology
from .circuit import emit_circuit, parse_circuit


def _read_circuit(path: str):
    return parse_circuit(Path(path).read_text())


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_device(spec: str) -> Device:
    """``preset:NAME[:shuttle]``, ``KIND:DIMS`` (e.g. ``grid:5x5``), a preset name, or a JSON file."""
    if spec.endswith(".json"):
        return Device.from_json(Path(spec).read_text())
    parts = spec.split(":")
    if parts[0] == "preset":
        return device_preset(parts[1], True if parts[2:] == ["shuttle"] else None)
    if len(parts) == 2:
        dims = [int(x) for x in parts[1].split("x")]
        return make_topology(parts[0], *dims)
    return device_preset(spec)


def _cmd_generate(a) -> int:
    from .codes import CodeSpec, generate_memory
    spec = CodeSpec(a.family, a.distance, a.rounds, a.m1, a.m2, a.level)
    _write_text(a.output, emit_circuit(generate_memory(spec)))
    return 0


def _cmd_transpile(a) -> int:
    from .transpile import transpile
    dev = parse_device(a.device)
    res = transpile(_read_circuit(a.input), dev, a.layout, a.routing, a.gateset, a.optimize, a.seed)
    _write_text(a.output, emit_circuit(res.circuit))
    if a.tracker:
        Path(a.tracker).write_text(json.dumps(asdict(res.tracker)))
    metrics = dict(res.metrics.as_dict(), layout=list(res.layout))
    if a.metrics:
        Path(a.metrics).write_text(json.dumps(metrics, indent=2, sort_keys=True))
    else:
        print(json.dumps(res.metrics.as_dict(), sort_keys=True), file=sys.stderr)
    return 0


def _cmd_noise(a) -> int:
    from .bench.run import build_noise
    from .noise import apply_noise
    from .transpile import TrackerLog
    dev = parse_device(a.device) if a.device else None
    if a.model.startswith("preset:"):
        spec = {"preset": a.model.split(":", 1)[1]}
    else:
        spec = {"kind": a.model, "p": a.p}
    model = build_noise(spec, dev)
    tracker = None
    if a.tracker:
        d = json.loads(Path(a.tracker).read_text())
        tracker = TrackerLog(d["initial"], d["num_logical"], d["num_measurements"],
                             [tuple(s) for s in d["swaps"]], d["snapshots"])
    data = [int(x) for x in a.data_qubits.split(",")] if a.data_qubits else None
    _write_text(a.output, emit_circuit(apply_noise(_read_circuit(a.input), model, dev, tracker, data)))
    return 0


def _cmd_dem(a) -> int:
    from .sim import compile_dem
    dem = compile_dem(_read_circuit(a.input), approximate_disjoint=not a.exact)
    _write_text(a.output, dem.to_text())
    return 0


def _cmd_sample(a) -> int:
    from .sim import frame_sample, write_table
    dets, obs = frame_sample(_read_circuit(a.input), a.shots, a.seed, threads=a.threads)
    write_table(a.output, dets, a.format)
    if a.obs_out:
        write_table(a.obs_out, obs, a.format)
    return 0


def _cmd_decode(a) -> int:
    from .decode import Decoder, logical_error_rate
    from .sim import DetectorErrorModel, read_table, write_table
    dem = DetectorErrorModel.from_text(Path(a.dem).read_text())
    dets = read_table(a.dets, dem.num_detectors, a.format)
    dec = Decoder(dem, a.decoder, a.variant.replace("-", "_"), a.osd_order, a.max_iters)
    pred = dec.decode_batch(dets)
    if a.output:
        write_table(a.output, pred, a.format)
    if a.obs:
        actual = read_table(a.obs, dem.num_observables, a.format)
        r = logical_error_rate(pred, actual)
        print(json.dumps({"logical_error_rate": r.rate, "stderr": r.stderr, "failures": r.failures,
                          "shots": r.shots}))
    return 0


def _cmd_run(a) -> int:
    from .bench import load_configs, report, run_sweep
    configs = load_configs(json.loads(Path(a.config).read_text()))
    triples = run_sweep(configs, workers=a.workers, threads=a.threads)
    report(triples, a.out)
    failed = 0
    for cfg, res, err in triples:
        if res is None:
            failed += 1
            print(f"{cfg.name}: {err}", file=sys.stderr)
        else:
            print(f"{cfg.name}: LER {res.logical_error_rate:.6g} +- {res.stderr:.2g} ({res.failures}/{res.shots})")
    return 1 if failed == len(triples) and triples else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qecforge", description=__doc__)
    p.add_argument("--version", action="version", version=f"qecforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a noiseless memory circuit")
    g.add_argument("--family", required=True)
    g.add_argument("--distance", type=int)
    g.add_argument("--rounds", type=int)
    g.add_argument("--m1", type=int)
    g.add_argument("--m2", type=int)
    g.add_argument("--level", type=int)
    g.add_argument("-o", "--output")
    g.set_defaults(func=_cmd_generate)

    t = sub.add_parser("transpile", help="translate, place and route onto a device")
    t.add_argument("input")
    t.add_argument("--device", required=True, help="preset:NAME[:shuttle], KIND:DIMS (grid:5x5) or device.json")
    t.add_argument("--layout", default="trivial", choices=("trivial", "dense", "sabre"))
    t.add_argument("--routing", default="sabre", choices=("basic", "stochastic", "sabre"))
    t.add_argument("--gateset", choices=("stim_clifford", "heron", "h2"))
    t.add_argument("--optimize", action="store_true")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("-o", "--output")
    t.add_argument("--tracker", help="write the qubit tracker as JSON")
    t.add_argument("--metrics", help="write overhead metrics as JSON")
    t.set_defaults(func=_cmd_transpile)

    n = sub.add_parser("noise", help="insert noise channels")
    n.add_argument("input")
    n.add_argument("--model", default="uniform", help="uniform, si1000, code_capacity, device or preset:NAME")
    n.add_argument("--p", type=float, default=0.001)
    n.add_argument("--device")
    n.add_argument("--tracker")
    n.add_argument("--data-qubits", help="comma-separated, for code_capacity")
    n.add_argument("-o", "--output")
    n.set_defaults(func=_cmd_noise)

    d = sub.add_parser("dem", help="compile a detector error model")
    d.add_argument("input")
    d.add_argument("--exact", action="store_true", help="reject correlated two-qubit channels")
    d.add_argument("-o", "--output")
    d.set_defaults(func=_cmd_dem)

    s = sub.add_parser("sample", help="sample detector and observable flips")
    s.add_argument("input")
    s.add_argument("--shots", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int)
    s.add_argument("--format", default="b8", choices=("b8", "csv"))
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--obs-out")
    s.set_defaults(func=_cmd_sample)

    c = sub.add_parser("decode", help="decode detector samples")
    c.add_argument("--dem", required=True)
    c.add_argument("--dets", required=True)
    c.add_argument("--obs", help="actual observable flips; prints the logical error rate")
    c.add_argument("--decoder", default="mwpm", choices=("mwpm", "bposd"))
    c.add_argument("--variant", default="batch", choices=("parity-check", "batch", "parity_check"))
    c.add_argument("--osd-order", type=int, default=0)
    c.add_argument("--max-iters", type=int, default=50)
    c.add_argument("--format", default="b8", choices=("b8", "csv"))
    c.add_argument("-o", "--output")
    c.set_defaults(func=_cmd_decode)

    r = sub.add_parser("run", help="run an experiment sweep")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--threads", type=int)
    r.set_defaults(func=_cmd_run)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as e:
        print(f"qecforge {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
