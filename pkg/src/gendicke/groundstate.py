"""Ground states in each parity sector and across the whole Hilbert space.

A sector ground state is computed on a ladder of truncations
(k1max, k2max) -> (k1max + 2, k2max + 2) until the squared overlap between the
two last eigenvectors satisfies ``1 - F <= tol_fidelity``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .hamiltonian import assemble, assemble_dense, coupling_derivative
from .hilbert import SECTORS, ParitySector, SectorBasis, embed, enumerate_sector
from .model import ModelParams

__all__ = [
    "SolverError",
    "TruncationError",
    "GroundState",
    "lowest_eigenpair",
    "converge_sector",
    "global_ground_state",
    "hellmann_feynman",
    "DEFAULT_K_START",
    "DEFAULT_K_CEILING",
    "TOL_FIDELITY",
    "TOL_RESIDUAL",
]

log = logging.getLogger(__name__)

DEFAULT_K_START = (8, 8)
DEFAULT_K_CEILING = 120
TOL_FIDELITY = 1e-10
TOL_RESIDUAL = 1e-12
# below this dimension a dense solve is both faster and more accurate
DENSE_LIMIT = 700
# relative gap under which the lowest level is treated as degenerate
DEGENERACY_TOL = 1e-9
ENERGY_TIE = 1e-12


class SolverError(RuntimeError):
    """The eigensolver failed to reach the requested residual."""

    def __init__(self, message, residual=math.inf):
        super().__init__(message)
        self.residual = residual


class TruncationError(RuntimeError):
    """The truncation ladder hit its ceiling before converging."""

    def __init__(self, message, fidelity_gap=math.nan):
        super().__init__(message)
        self.fidelity_gap = fidelity_gap


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: float
    coeffs: np.ndarray = field(repr=False)
    basis: SectorBasis = field(repr=False)
    sector: ParitySector
    k1max: int
    k2max: int
    residual: float
    fidelity_gap: float
    params: ModelParams = field(repr=False, default=None)
    history: tuple = field(repr=False, default=())
    sector_energies: "dict | None" = field(repr=False, default=None)

    @property
    def energy_change(self) -> float:
        """|E(k + 2) - E(k)| between the two last truncations."""
        if len(self.history) < 2:
            return 0.0
        return abs(self.history[-1][2] - self.history[-2][2])

    def to_record(self) -> dict:
        rec = {
            "config": self.params.config.value if self.params else None,
            "x": list(self.params.x) if self.params else None,
            "energy": self.energy,
            "sector": self.sector.value,
            "k1max": self.k1max,
            "k2max": self.k2max,
            "dim": self.basis.dim,
            "fidelity_gap": self.fidelity_gap,
            "energy_change": self.energy_change,
            "residual": self.residual,
        }
        if self.sector_energies is not None:
            rec["sector_energies"] = {s.value: e for s, e in self.sector_energies.items()}
        return rec


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _residual(H, value, vector) -> float:
    return float(np.linalg.norm(H @ vector - value * vector))


def _low_spectrum(H, n: int, v0=None, method="auto"):
    """Lowest ``n`` eigenpairs (ascending) of a real symmetric matrix."""
    dim = H.shape[0]
    n = min(n, dim)
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if method == "lanczos" and n >= dim - 1:
        method = "dense"
    if method == "dense" or (method == "auto" and dim <= DENSE_LIMIT):
        dense = H.toarray() if sp.issparse(H) else np.asarray(H, dtype=float)
        vals, vecs = la.eigh(dense, subset_by_index=[0, n - 1], driver="evr")
        return vals, vecs
    best = math.inf
    for ncv in (None, 4 * n + 40, 8 * n + 120):
        try:
            vals, vecs = sla.eigsh(H, k=n, which="SA", v0=v0, tol=0, ncv=ncv,
                                   maxiter=20 * dim)
        except sla.ArpackNoConvergence as exc:
            if len(exc.eigenvalues):
                best = min(best, _residual(H, exc.eigenvalues[0], exc.eigenvectors[:, 0]))
            continue
        order = np.argsort(vals)
        return vals[order], vecs[:, order]
    raise SolverError(f"Lanczos did not converge for dim={dim}", best)


def _polish(H, value, vector, tol, steps=3):
    """Shifted inverse iteration on a nearly converged eigenpair."""
    res = _residual(H, value, vector)
    if res <= tol:
        return value, vector, res
    dim = H.shape[0]
    for _ in range(steps):
        shift = value - max(res, 1e-14)
        try:
            if sp.issparse(H):
                w = sla.spsolve((H - shift * sp.identity(dim, format="csr")).tocsc(), vector)
            else:
                w = la.solve(H - shift * np.eye(dim), vector, assume_a="sym")
        except (la.LinAlgError, RuntimeError):
            break
        if not np.all(np.isfinite(w)):
            break
        w /= np.linalg.norm(w)
        value = float(w @ (H @ w))
        vector = w
        res = _residual(H, value, vector)
        if res <= tol:
            break
    return value, vector, res


def lowest_eigenpair(H, tol: float = TOL_RESIDUAL, v0=None,
                     method: str = "auto") -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and unit eigenvector of a real symmetric matrix.

    ``method`` is ``"dense"`` (LAPACK), ``"lanczos"`` (implicitly restarted
    Lanczos, ARPACK) or ``"auto"``, which picks dense below ``DENSE_LIMIT``.
    The eigenvector is normalised and its largest-magnitude entry is positive.
    Raises :class:`SolverError` if the residual ``|Hv - lambda v|`` cannot be
    brought below ``tol``.
    """
    value, vector, _, _ = _lowest(H, tol, v0, n=1, method=method)
    return value, vector


def _lowest(H, tol, v0, n=2, method="auto"):
    dim = H.shape[0]
    if dim < 1:
        raise ValueError("empty matrix")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    vals, vecs = _low_spectrum(H, n, v0, method)
    value, vector = float(vals[0]), vecs[:, 0]
    vector = vector / np.linalg.norm(vector)
    value, vector, res = _polish(H, value, vector, tol)
    if res > tol:
        raise SolverError(f"residual {res:.3e} above tolerance {tol:.1e} (dim={dim})", res)
    return value, _fix_sign(vector), vals, vecs


def _sector_solve(params, sector, k1, k2, tol, v0=None):
    basis = enumerate_sector(params.config, params.n_atoms, sector, k1, k2)
    if basis.dim == 0:
        return None
    H = assemble_dense(params, basis) if basis.dim <= DENSE_LIMIT else assemble(params, basis)
    value, vector, vals, vecs = _lowest(H, tol, v0, n=min(3, basis.dim))
    scale = max(1.0, abs(value))
    degenerate = vecs[:, np.abs(vals - value) <= DEGENERACY_TOL * scale]
    res = _residual(H, value, vector)
    return basis, value, vector, degenerate, res


def _fidelity(old, new) -> float:
    """Weight of the old ground state inside the new ground (eigen)space.

    Equal to |<old|new>|^2 when the new level is non-degenerate.
    """
    b_old, _, v_old, _, _ = old
    b_new, _, _, space, _ = new
    emb = embed(v_old, b_old, b_new)
    proj = space.T @ emb
    return float(min(1.0, proj @ proj))


def converge_sector(
    params: ModelParams,
    sector,
    k_start: tuple[int, int] = DEFAULT_K_START,
    k_ceiling: int = DEFAULT_K_CEILING,
    tol_fidelity: float = TOL_FIDELITY,
    tol_residual: float = TOL_RESIDUAL,
) -> GroundState:
    """Lowest state of one parity sector, converged in the truncation.

    Returns the state of the larger of the two last truncations. Raises
    :class:`TruncationError` when k1max or k2max would exceed ``k_ceiling``.
    """
    sector = ParitySector.parse(sector)
    k1, k2 = map(int, k_start)
    prev = None
    while prev is None:
        if max(k1, k2) > k_ceiling:
            raise TruncationError(f"sector {sector.value} is empty below the ceiling")
        prev = _sector_solve(params, sector, k1, k2, tol_residual)
        if prev is None:
            k1, k2 = k1 + 2, k2 + 2
    history = [(k1, k2, prev[1])]
    gap = math.nan
    while True:
        if max(k1, k2) + 2 > k_ceiling:
            raise TruncationError(
                f"sector {sector.value} not converged at k={k1},{k2} (1-F={gap:.3e})", gap)
        k1, k2 = k1 + 2, k2 + 2
        seed = embed(prev[2], prev[0], enumerate_sector(params.config, params.n_atoms,
                                                         sector, k1, k2))
        cur = _sector_solve(params, sector, k1, k2, tol_residual,
                            v0=seed if seed.any() else None)
        history.append((k1, k2, cur[1]))
        gap = max(0.0, 1.0 - _fidelity(prev, cur))
        if gap <= tol_fidelity:
            basis, value, vector, _, res = cur
            return GroundState(value, vector, basis, sector, k1, k2, res, gap,
                               params, tuple(history))
        prev = cur


def global_ground_state(
    params: ModelParams,
    k_start: tuple[int, int] = DEFAULT_K_START,
    k_ceiling: int = DEFAULT_K_CEILING,
    tol_fidelity: float = TOL_FIDELITY,
    tol_residual: float = TOL_RESIDUAL,
    sectors=SECTORS,
) -> GroundState:
    """Lowest-energy sector ground state.

    Energies within 1e-12 of each other are resolved in the order
    ee < eo < oe < oo. The per-sector energies are attached to the result.
    """
    results = {}
    for s in sectors:
        s = ParitySector.parse(s)
        results[s] = converge_sector(params, s, k_start, k_ceiling, tol_fidelity, tol_residual)
    emin = min(r.energy for r in results.values())
    best = min((s for s, r in results.items() if r.energy <= emin + ENERGY_TIE),
               key=lambda s: s.order)
    gs = results[best]
    energies = {s: results[s].energy for s in sorted(results, key=lambda s: s.order)}
    return GroundState(gs.energy, gs.coeffs, gs.basis, gs.sector, gs.k1max, gs.k2max,
                       gs.residual, gs.fidelity_gap, gs.params, gs.history, energies)


def hellmann_feynman(gs: GroundState, mode: int) -> float:
    """<psi| dH/dx_mode |psi> for a converged ground state."""
    dH = coupling_derivative(gs.params, gs.basis, mode)
    return float(gs.coeffs @ (dH @ gs.coeffs))
