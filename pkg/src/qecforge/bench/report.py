"""CSV and JSON result tables."""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, fields
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .config import ExperimentConfig
from .run import ExperimentResult

# wall time is machine-dependent, so the CSV row leaves it out to stay byte-stable
CSV_FIELDS = tuple(f.name for f in fields(ExperimentResult) if f.name not in ("wall_time_s", "config")) + ("status",)
LONG_METRICS = ("logical_error_rate", "stderr", "raw_error_rate", "swaps_inserted", "pct_2q_overhead",
                "gates_added_per_original")

Entry = Union[ExperimentResult, Tuple[ExperimentConfig, Optional[ExperimentResult], Optional[str]]]


def _normalise(entries: Iterable[Entry]) -> List[Dict[str, Any]]:
    rows = []
    for e in entries:
        if isinstance(e, ExperimentResult):
            d = asdict(e)
            d["status"] = "ok"
        else:
            cfg, res, err = e
            if res is not None:
                d = asdict(res)
                d["status"] = "ok"
            else:
                d = {k: "" for k in CSV_FIELDS}
                d.update(name=cfg.name, config_hash=cfg.config_hash, experiment=cfg.experiment,
                         seed=cfg.seed, repetitions=cfg.repetitions, config=cfg.to_dict(), status=f"error: {err}")
        rows.append(d)
    return rows


def _cell(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(entries: Iterable[Entry]) -> str:
    """One row per config; header only for no entries."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for d in _normalise(entries):
        w.writerow([_cell(d.get(k, "")) for k in CSV_FIELDS])
    return buf.getvalue()


def to_long_csv(entries: Iterable[Entry]) -> str:
    """Plot-ready ``name, config_hash, metric, value`` rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("name", "config_hash", "metric", "value"))
    for d in _normalise(entries):
        if d["status"] != "ok":
            continue
        for m in LONG_METRICS:
            w.writerow((d["name"], d["config_hash"], m, _cell(d[m])))
    return buf.getvalue()


def to_json(entries: Iterable[Entry]) -> str:
    """Full records, including wall time and the config for re-running."""
    return json.dumps({"results": _normalise(entries)}, indent=2, sort_keys=True)


def report(entries: Sequence[Entry], out_dir: Optional[str] = None) -> Dict[str, str]:
    """Render ``results.csv``, ``results_long.csv`` and ``results.json``.

    Writes them into ``out_dir`` when given; returns the texts by file name.
    """
    entries = list(entries)
    texts = {"results.csv": to_csv(entries), "results_long.csv": to_long_csv(entries),
             "results.json": to_json(entries)}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in texts.items():
            with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as f:
                f.write(text)
    return texts
