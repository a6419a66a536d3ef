"""SWAP overhead of the Steane memory on a planar grid versus a cube.

Richer connectivity should need fewer inserted two-qubit gates.
"""
import numpy as np

from qecforge.arch import make_topology
from qecforge.codes import CodeSpec, generate_memory
from qecforge.transpile import transpile

circuit = generate_memory(CodeSpec("steane", level=1, rounds=2))
for dev in (make_topology("grid", 5, 5), make_topology("cuboid", 3, 3, 3), make_topology("complete", 13)):
    extra = [transpile(circuit, dev, "sabre", routing="sabre", seed=s).metrics for s in range(10)]
    print(f"{dev.name:<16} median extra 2q gates {np.median([m.extra_2q for m in extra]):6.1f}  "
          f"median overhead {np.median([m.pct for m in extra]):6.1f}%")
