"""Exact finite-size ground states, fidelity phase diagrams and field Wigner
functions of the three-level, two-mode generalised Dicke model."""

__version__ = "0.1.0"

from .model import AtomicConfiguration, ModelParams, critical_coupling, dipolar_strengths  # noqa: E402
from .hilbert import BasisState, ParitySector, SectorBasis, enumerate_sector, k_values, parity_of  # noqa: E402
from .hamiltonian import assemble  # noqa: E402
from .groundstate import GroundState, converge_sector, global_ground_state, lowest_eigenpair  # noqa: E402
from .transitions import (  # noqa: E402
    GridSpec,
    TransitionSurface,
    bures_distance,
    classify_separatrix,
    extremal_neighborhood,
    state_fidelity,
    surface,
)
from .wigner import negativity_volume, reduce_density, weyl_symbol, wigner_field  # noqa: E402
