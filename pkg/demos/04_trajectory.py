"""
Walking across the separatrix
=============================

Follows a straight segment in the coupling plane and prints, per sample,
the sector, the fidelity with the previous sample and the negativity of both
field modes. Dips of the fidelity to zero mark parity changes. The same data
with one Wigner file per sample is written by ``gendicke trajectory``.
"""

import numpy as np

from gendicke import ModelParams, global_ground_state, reduce_density, wigner_field
from gendicke.transitions import state_fidelity

base = ModelParams.preset("lambda")
start, end = np.array([0.1, 0.1]), np.array([3.5, 2.5])

prev = None
for t in np.linspace(0, 1, 24):
    x = (1 - t) * start + t * end
    gs = global_ground_state(base.with_x(x))
    fid = state_fidelity(prev, gs) if prev is not None else float("nan")
    neg = [wigner_field(reduce_density(gs, m)).negativity_volume for m in (0, 1)]
    flag = "  <- parity change" if prev is not None and prev.sector is not gs.sector else ""
    print(f"x=({x[0]:.3f}, {x[1]:.3f}) {gs.sector.value}  F_prev={fid:.6f}  "
          f"neg13={neg[0]:.2e} neg23={neg[1]:.2e}{flag}")
    prev = gs
