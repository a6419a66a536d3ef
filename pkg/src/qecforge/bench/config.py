"""Declarative experiment configuration."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

EXPERIMENTS = ("memory", "idle_protected", "idle_unprotected")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One pipeline run.

    Attributes
    ----------
    name : str
    experiment : {"memory", "idle_protected", "idle_unprotected"}
        A code memory experiment, or the repetition-protected and bare idle
        qubit gadgets.
    code : dict
        ``CodeSpec`` fields (``family``, ``distance``, ``rounds``, ...).
    device : dict, optional
        ``{"topology": kind, "dims": [...]}`` or ``{"preset": name,
        "shuttling": bool, "params": {...}}``, plus optional ``qpus`` (ids
        to keep), ``quality`` (``mean``, ``std``, ``seed``, ``scale``) and
        ``inter_qpu_scale``.  Omitted means no transpilation (ideal
        all-to-all).
    transpile : dict
        ``layout``, ``routing``, ``gateset`` (defaults to the device's),
        ``optimize``, ``seed``.
    noise : dict
        ``{"kind": "uniform" | "si1000" | "code_capacity", "p": ...}``,
        ``{"preset": name}`` or ``{"kind": "device"}`` (the device's preset),
        with optional field overrides such as ``idle_model``.
    decoder : dict
        ``kind`` (``mwpm`` or ``bposd``), ``variant`` (default per code
        family), ``osd_order``, ``max_iters``.
    shots : int
        Per repetition.
    seed : int
    repetitions : int
        Independent transpilation samples; transpile seeds are
        ``transpile.seed + r``.
    """

    name: str = "experiment"
    experiment: str = "memory"
    code: Dict[str, Any] = field(default_factory=lambda: {"family": "repetition", "distance": 3})
    device: Optional[Dict[str, Any]] = None
    transpile: Dict[str, Any] = field(default_factory=dict)
    noise: Dict[str, Any] = field(default_factory=lambda: {"kind": "uniform", "p": 0.0})
    decoder: Dict[str, Any] = field(default_factory=lambda: {"kind": "mwpm"})
    shots: int = 100_000
    seed: int = 0
    repetitions: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if int(self.shots) < 1:
            raise ConfigError("shots must be at least 1")
        if int(self.repetitions) < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.device is not None and not ("topology" in self.device or "preset" in self.device):
            raise ConfigError("device needs a 'topology' or a 'preset'")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)


def load_configs(data: Any) -> List[ExperimentConfig]:
    """Configs from parsed JSON.

    Accepts one config object, a list of them, ``{"configs": [...]}``, or
    ``{"preset": "rq1", "shots": N}`` for a bundled sweep.
    """
    if isinstance(data, list):
        return [ExperimentConfig.from_dict(d) for d in data]
    if not isinstance(data, dict):
        raise ConfigError("config JSON must be an object or a list")
    if "configs" in data:
        return load_configs(data["configs"])
    if "preset" in data and set(data) <= {"preset", "shots"}:
        from .presets import preset_configs
        try:
            return preset_configs(data["preset"], data.get("shots"))
        except KeyError as e:
            raise ConfigError(str(e)) from None
    return [ExperimentConfig.from_dict(data)]
