"""
Ground state of one three-level atom in two cavity modes
=========================================================

Solves the Lambda configuration at a few coupling points and shows how the
truncation ladder converges and which parity sector wins.
"""

from gendicke import ModelParams, global_ground_state

# resonant Lambda parameters; x are couplings in units of the two-level critical value
base = ModelParams.preset("lambda")
print("critical couplings (13, 23):", base.critical_couplings)

for x in [(0.0, 0.0), (0.5, 0.5), (1.9, 0.2), (0.2, 1.9), (2.0, 2.0)]:
    gs = global_ground_state(base.with_x(x))
    ladder = " -> ".join(f"{k1}:{e:.10f}" for k1, _, e in gs.history)
    print(f"x={x}  E={gs.energy:+.10f}  sector={gs.sector.value}  dim={gs.basis.dim}")
    print(f"    truncation k1max:E  {ladder}")
    print(f"    1-F={gs.fidelity_gap:.1e}  per-sector", {s.value: round(e, 6) for s, e in gs.sector_energies.items()})
