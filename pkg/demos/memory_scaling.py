"""Logical error rate of rotated surface memories versus physical error rate.

Run with ``python demos/memory_scaling.py``; prints one row per (distance, p).
"""
from qecforge.bench import ExperimentConfig, run_experiment

for p in (0.001, 0.002, 0.004, 0.008):
    for d in (3, 5):
        cfg = ExperimentConfig(name=f"surface-d{d}-p{p}", code={"family": "surface", "distance": d},
                               device={"topology": "complete", "dims": [60]},
                               noise={"kind": "si1000", "p": p}, decoder={"kind": "mwpm"}, shots=20_000)
        r = run_experiment(cfg)
        print(f"d={d} p={p:<6} LER={r.logical_error_rate:.5f} +- {r.stderr:.5f}")
