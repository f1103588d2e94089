"""
Finite-size phase diagram from the fidelity surface
===================================================

Scans a grid of couplings, records the minimum neighbour fidelity and the
maximum Bures distance at every node, and prints the sector map with the
separatrix classes. Pass a configuration and an extent, e.g.

    python demos/02_phase_diagram.py lambda 4.0

A 21x21 grid takes a few minutes per configuration on one core.
"""

import os
import sys

import numpy as np

from gendicke import GridSpec, ModelParams, classify_separatrix, surface

cfg = sys.argv[1] if len(sys.argv) > 1 else "lambda"
extent = float(sys.argv[2]) if len(sys.argv) > 2 else 2.0
n = int(sys.argv[3]) if len(sys.argv) > 3 else 21

grid = GridSpec(0.0, extent, 0.0, extent, n)
surf = classify_separatrix(surface(ModelParams.preset(cfg), grid, jobs=os.cpu_count()))

# rows: first coupling increasing downward; columns: second coupling
print(f"{cfg}: sectors {sorted(surf.sectors_present())}, theta = {surf.theta:.4f}")
for row in surf.sector_map:
    print(" ".join(row))

mark = {"": ".", "discontinuous": "D", "stable_continuous": "s", "unstable_continuous": "U"}
print()
for row in surf.labels:
    print(" ".join(mark[c] for c in row))

# the same surface as a Bures-distance relief (x100)
print()
for row in surf.D_B_max:
    print(" ".join(f"{int(100 * v):3d}" for v in row))

for cls in ("stable_continuous", "unstable_continuous"):
    sel = surf.labels == cls
    if sel.any():
        print(cls, int(sel.sum()), "nodes, median D_B_max", np.median(surf.D_B_max[sel]),
              "in sectors", sorted(set(surf.sector_map[sel])))
