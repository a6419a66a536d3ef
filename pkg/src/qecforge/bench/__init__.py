"""Experiment configs, the end-to-end runner, presets and reports."""
from __future__ import annotations

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, load_configs
from .gadget import GADGET_MOMENTS, estimate_repetition_overhead, protected_idle_circuit, unprotected_idle_circuit
from .run import (STAGES, ExperimentResult, StageError, build_device, build_noise, default_variant, run_experiment,
                  run_sweep, sample_seed)
from .presets import PRESETS, preset_configs
from .report import CSV_FIELDS, report, to_csv, to_json, to_long_csv

__all__ = [
    "EXPERIMENTS", "ConfigError", "ExperimentConfig", "GADGET_MOMENTS", "estimate_repetition_overhead",
    "protected_idle_circuit", "unprotected_idle_circuit", "STAGES", "ExperimentResult", "StageError",
    "build_device", "build_noise", "default_variant", "run_experiment", "run_sweep", "sample_seed",
    "load_configs", "PRESETS", "preset_configs", "CSV_FIELDS", "report", "to_csv", "to_json", "to_long_csv",
]
