"""
Wigner functions of the reduced field modes
===========================================

Reduces the Lambda ground state to each field mode and summarises the Wigner
function: normalisation, value at the origin, position-marginal peaks and
negative volume. Points run from the normal region into the collective one.
"""

import numpy as np

from gendicke import ModelParams, global_ground_state, reduce_density, wigner_field

base = ModelParams.preset("lambda")

for x in [(0.05, 0.05), (0.5, 1.5), (1.5, 0.5), (1.8, 0.3), (2.5, 0.3), (3.0, 2.4)]:
    gs = global_ground_state(base.with_x(x))
    print(f"x={x} sector={gs.sector.value}")
    for tag in ("13", "23"):
        rho = reduce_density(gs, tag)
        W = wigner_field(rho)
        peaks = np.round(W.peaks_q(), 2).tolist()
        print(f"  W{tag}: <n>={rho.mean_photons:.3f} purity={rho.purity:.4f} "
              f"int={W.integral:.8f} W(0,0)={W.value_at_origin():+.4f} "
              f"peaks q={peaks} negativity={W.negativity_volume:.2e}")

# a coarse picture of one field, rows q, columns p
W = wigner_field(reduce_density(global_ground_state(base.with_x((3.0, 0.3))), "13"),
                 np.linspace(-4, 4, 33), np.linspace(-3, 3, 25))
shade = " .:-=+*#"
top = W.W.max()
for row in W.W:
    print("".join("o" if v < 0 else shade[min(7, int(8 * v / top))] for v in row))
