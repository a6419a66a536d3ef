"""Bundled sweeps for the nine research questions, at desk scale."""
from __future__ import annotations

from typing import Callable, Dict, List, Optional

from .config import ExperimentConfig

DEFAULT_SHOTS = 100_000


def _cfg(name: str, **kw) -> ExperimentConfig:
    return ExperimentConfig(name=name, **kw)


def rq1(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Distance sweep on an all-to-all device."""
    out = []
    for fam, ds in (("repetition", (3, 5, 7)), ("rotated_surface", (3, 5)), ("bacon_shor", (3, 5))):
        for d in ds:
            for p in (0.002, 0.004, 0.008):
                out.append(_cfg(f"rq1-{fam}-d{d}-p{p}", code={"family": fam, "distance": d},
                                device={"topology": "complete", "dims": [80]},
                                noise={"kind": "uniform", "p": p}, shots=shots))
    return out


def rq2(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Grid versus cuboid versus complete connectivity."""
    devices = {"grid": {"topology": "grid", "dims": [8, 8]}, "cuboid": {"topology": "cuboid", "dims": [4, 4, 4]},
               "complete": {"topology": "complete", "dims": [64]}}
    codes = {"surface-d3": {"family": "rotated_surface", "distance": 3}, "steane-l1": {"family": "steane_concat", "level": 1}}
    return [_cfg(f"rq2-{cn}-{dn}", code=code, device=dev, transpile={"layout": "sabre", "routing": "sabre"},
                 noise={"kind": "uniform", "p": 0.002}, shots=shots, repetitions=3)
            for cn, code in codes.items() for dn, dev in devices.items()]


def rq3(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Spread of per-qubit coherence times, 60/120/180 us standard deviation."""
    return [_cfg(f"rq3-surface-d3-std{s}", code={"family": "rotated_surface", "distance": 3},
                 device={"topology": "grid", "dims": [6, 6], "gateset": "heron",
                         "quality": {"mean": 330.14, "std": s, "seed": 0}},
                 transpile={"layout": "sabre", "routing": "sabre"}, noise={"preset": "flamingo"}, shots=shots)
            for s in (0, 60, 120, 180)]


def rq4(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """One Flamingo tile versus three linked tiles, inter-tile links at 1x and 10x error."""
    tile = {"tile_rows": 6, "tile_cols": 7}
    out = []
    for d in (3, 5):
        code = {"family": "rotated_surface", "distance": d}
        if d == 3:
            out.append(_cfg(f"rq4-surface-d{d}-single", code=code,
                            device={"preset": "flamingo", "params": tile, "qpus": [0]},
                            transpile={"layout": "sabre", "routing": "sabre"}, noise={"preset": "flamingo"},
                            shots=shots))
        for scale in (1.0, 10.0):
            out.append(_cfg(f"rq4-surface-d{d}-full-x{scale:g}", code=code,
                            device={"preset": "flamingo", "params": tile, "inter_qpu_scale": scale},
                            transpile={"layout": "sabre", "routing": "sabre"}, noise={"preset": "flamingo"},
                            shots=shots))
    return out


def rq5(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Device presets, with and without shuttling where the technology allows it."""
    devices = [("willow_x3", None), ("flamingo", None), ("nighthawk", None), ("infleqtion_x16", False),
               ("infleqtion_x16", True), ("apollo_768", False), ("apollo_768", True)]
    out = []
    for name, sh in devices:
        dev = {"preset": name}
        tag = name
        if sh is not None:
            dev["shuttling"] = sh
            tag += "-shuttle" if sh else "-fixed"
        out.append(_cfg(f"rq5-surface-d3-{tag}", code={"family": "rotated_surface", "distance": 3}, device=dev,
                        transpile={"layout": "dense", "routing": "sabre"}, noise={"kind": "device"}, shots=shots))
    return out


def rq6(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Layout and routing strategies."""
    return [_cfg(f"rq6-surface-d3-{lay}-{rt}", code={"family": "rotated_surface", "distance": 3},
                 device={"topology": "grid", "dims": [5, 5]}, transpile={"layout": lay, "routing": rt},
                 noise={"kind": "uniform", "p": 0.002}, shots=shots, repetitions=3)
            for lay in ("trivial", "dense", "sabre") for rt in ("basic", "stochastic", "sabre")]


def rq7(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Native gate sets, with and without peephole optimisation."""
    return [_cfg(f"rq7-surface-d3-{g}-{'opt' if opt else 'plain'}", code={"family": "rotated_surface", "distance": 3},
                 device={"topology": "grid", "dims": [5, 5], "gateset": g},
                 transpile={"layout": "sabre", "routing": "sabre", "optimize": opt},
                 noise={"kind": "uniform", "p": 0.002}, shots=shots)
            for g in ("stim_clifford", "heron", "h2") for opt in (False, True)]


def rq8(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Matching versus BP-OSD in both variants across families."""
    codes = {"surface-d3": {"family": "rotated_surface", "distance": 3},
             "bacon-shor-d3": {"family": "bacon_shor", "distance": 3},
             "steane-l1": {"family": "steane_concat", "level": 1},
             "repetition-d5": {"family": "repetition", "distance": 5}}
    decoders = {"mwpm": {"kind": "mwpm"}, "bposd-batch": {"kind": "bposd", "variant": "batch"},
                "bposd-pcm": {"kind": "bposd", "variant": "parity_check"}}
    out = [_cfg(f"rq8-{cn}-{dn}", code=code, noise={"kind": "uniform", "p": 0.002}, decoder=dec, shots=shots)
           for cn, code in codes.items() for dn, dec in decoders.items()]
    # matching is not applicable to the gross code; the row records the decode-stage error
    for dn, dec in (("mwpm", {"kind": "mwpm"}), ("bposd-batch", {"kind": "bposd", "variant": "batch"})):
        out.append(_cfg(f"rq8-gross-r1-{dn}", code={"family": "bivariate_bicycle", "rounds": 1},
                        noise={"kind": "uniform", "p": 0.001}, decoder=dec, shots=max(1, shots // 100)))
    return out


def rq9(shots: int = DEFAULT_SHOTS) -> List[ExperimentConfig]:
    """Repetition-protected versus bare idle qubit."""
    return [_cfg(f"rq9-{kind}-p{p}", experiment=f"idle_{kind}", noise={"kind": "uniform", "p": p}, shots=shots)
            for p in (0.001, 0.004, 0.01) for kind in ("protected", "unprotected")]


PRESETS: Dict[str, Callable[..., List[ExperimentConfig]]] = {
    "rq1": rq1, "rq2": rq2, "rq3": rq3, "rq4": rq4, "rq5": rq5, "rq6": rq6, "rq7": rq7, "rq8": rq8, "rq9": rq9,
}


def preset_configs(name: str, shots: Optional[int] = None) -> List[ExperimentConfig]:
    key = name.lower()
    if key not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[key]() if shots is None else PRESETS[key](shots)
