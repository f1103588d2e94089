"""Fidelity and Bures-distance surfaces over the coupling plane.

For every node A of a regular grid the ground state is compared with the
ground states on a circle of radius eps about A (default 100 points,
eps = 0.9 * dx). The surface of minimum fidelity, and equivalently of maximum
Bures distance, locates the separatrix; nodes are then labelled as
discontinuous (parity change), stable-continuous or unstable-continuous.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .groundstate import DEFAULT_K_START, GroundState, global_ground_state
from .hilbert import ParitySector, overlap
from .model import ModelParams

__all__ = [
    "GridSpec",
    "Neighborhood",
    "TransitionSurface",
    "state_fidelity",
    "bures_distance",
    "extremal_neighborhood",
    "surface",
    "classify_separatrix",
    "boundary_nodes",
    "discontinuity_nodes",
    "DISCONTINUOUS",
    "STABLE",
    "UNSTABLE",
]

log = logging.getLogger(__name__)

DISCONTINUOUS = "discontinuous"
STABLE = "stable_continuous"
UNSTABLE = "unstable_continuous"
# fidelity below which two neighbouring ground states count as orthogonal
FIDELITY_ZERO = 1e-6


def state_fidelity(a: GroundState, b: GroundState) -> float:
    """|<a|b>|^2, matching basis labels across truncations; 0 across sectors."""
    if a.sector is not b.sector:
        return 0.0
    s = overlap(a.coeffs, a.basis, b.coeffs, b.basis)
    return float(min(1.0, s * s))


def bures_distance(F):
    """sqrt(2 (1 - sqrt(F))) for F in [0, 1] (scalar or array)."""
    F = np.asarray(F, dtype=float)
    if np.any(F < -1e-12) or np.any(F > 1 + 1e-12):
        raise ValueError(f"fidelity outside [0, 1]: {F}")
    D = np.sqrt(2.0 * (1.0 - np.sqrt(np.clip(F, 0.0, 1.0))))
    return float(D) if D.ndim == 0 else D


@dataclass(frozen=True)
class GridSpec:
    """Regular partition of [a_lo, a_hi] x [b_lo, b_hi] (a, b = active modes)."""

    a_lo: float
    a_hi: float
    b_lo: float
    b_hi: float
    n_a: int
    n_b: int = None

    def __post_init__(self):
        if self.n_b is None:
            object.__setattr__(self, "n_b", self.n_a)
        if not (self.a_lo < self.a_hi and self.b_lo < self.b_hi):
            raise ValueError("grid ranges need lo < hi")
        if self.n_a < 2 or self.n_b < 2:
            raise ValueError("need at least two points per axis")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """``a_lo,a_hi,b_lo,b_hi,n`` or ``a_lo,a_hi,b_lo,b_hi,n_a,n_b``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (5, 6):
            raise ValueError(f"grid spec needs 5 or 6 comma-separated values, got {text!r}")
        lo_hi = [float(p) for p in parts[:4]]
        counts = [int(p) for p in parts[4:]]
        return cls(*lo_hi, *counts)

    @property
    def xa(self) -> np.ndarray:
        return np.linspace(self.a_lo, self.a_hi, self.n_a)

    @property
    def xb(self) -> np.ndarray:
        return np.linspace(self.b_lo, self.b_hi, self.n_b)

    @property
    def dx(self) -> float:
        """Minimum distance between grid nodes."""
        return min((self.a_hi - self.a_lo) / (self.n_a - 1), (self.b_hi - self.b_lo) / (self.n_b - 1))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_a, self.n_b)

    def nodes(self) -> list[tuple[float, float]]:
        """Node coordinates in row-major order (x_a slow, x_b fast)."""
        return [(float(a), float(b)) for a in self.xa for b in self.xb]

    def clip(self, pts: np.ndarray) -> np.ndarray:
        out = np.array(pts, dtype=float)
        out[..., 0] = np.clip(out[..., 0], self.a_lo, self.a_hi)
        out[..., 1] = np.clip(out[..., 1], self.b_lo, self.b_hi)
        return out

    def __str__(self):
        return f"{self.a_lo!r},{self.a_hi!r},{self.b_lo!r},{self.b_hi!r},{self.n_a},{self.n_b}"


@dataclass(frozen=True)
class Neighborhood:
    F_min: float
    D_B_max: float
    direction: float
    fidelities: np.ndarray = field(repr=False)
    center: GroundState = field(repr=False, default=None)

    def __iter__(self):
        return iter((self.F_min, self.D_B_max, self.direction))


def circle_points(point, eps: float, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    angles = 2.0 * np.pi * np.arange(n_samples) / n_samples
    pts = np.asarray(point, dtype=float) + eps * np.column_stack([np.cos(angles), np.sin(angles)])
    return angles, pts


def extremal_neighborhood(
    point,
    eps: float,
    n_samples: int = 100,
    params_template: ModelParams = None,
    *,
    domain: "GridSpec | None" = None,
    center: "GroundState | None" = None,
    k_start=None,
) -> Neighborhood:
    """Minimum fidelity / maximum Bures distance on a circle about ``point``.

    Sample points outside ``domain`` (if given) are clipped onto it, and in any
    case onto x >= 0. ``direction`` is the angle of the extremal sample.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n_samples < 3:
        raise ValueError("need at least three samples")
    if params_template is None:
        raise ValueError("params_template is required")
    if center is None:
        center = global_ground_state(params_template.with_x(point))
    if k_start is None:
        k_start = (max(DEFAULT_K_START[0], center.k1max - 2), max(DEFAULT_K_START[1], center.k2max - 2))
    angles, pts = circle_points(point, eps, n_samples)
    if domain is not None:
        pts = domain.clip(pts)
    pts = np.maximum(pts, 0.0)
    fid = np.empty(n_samples)
    for i, xy in enumerate(pts):
        try:
            other = global_ground_state(params_template.with_x(xy), k_start=k_start)
        except Exception as exc:
            raise type(exc)(f"direction {i} (angle {angles[i]:.4f}): {exc}") from exc
        fid[i] = state_fidelity(center, other)
    i_min = int(np.argmin(fid))
    D = bures_distance(fid)
    i_max = int(np.argmax(D))
    return Neighborhood(float(fid[i_min]), float(D[i_max]), float(angles[i_min]), fid, center)


@dataclass
class TransitionSurface:
    """Fields are arrays of shape ``grid.shape`` indexed [i_a, i_b]."""

    grid: GridSpec
    params: ModelParams
    eps: float
    n_samples: int
    F_min: np.ndarray
    D_B_max: np.ndarray
    direction: np.ndarray
    sector_map: np.ndarray
    energy: np.ndarray
    fidelities: np.ndarray = field(repr=False)
    labels: np.ndarray = None
    theta: float = math.nan
    errors: dict = field(default_factory=dict)

    @property
    def separatrix(self) -> list[tuple[tuple[float, float], str]]:
        if self.labels is None:
            return []
        xa, xb = self.grid.xa, self.grid.xb
        return [((float(xa[i]), float(xb[j])), str(self.labels[i, j]))
                for i in range(self.grid.n_a) for j in range(self.grid.n_b)
                if self.labels[i, j]]

    def sectors_present(self) -> set[str]:
        return {s for s in self.sector_map.ravel() if s}


def _node_task(args):
    params, xy, eps, n_samples, grid = args
    try:
        nb = extremal_neighborhood(xy, eps, n_samples, params, domain=grid)
    except Exception as exc:  # recorded per node, never aborts the scan
        return None, f"{type(exc).__name__}: {exc}"
    return (nb.F_min, nb.D_B_max, nb.direction, nb.fidelities,
            nb.center.sector.value, nb.center.energy), None


def surface(
    params_template: ModelParams,
    grid: GridSpec,
    eps: "float | None" = None,
    n_samples: int = 100,
    jobs: "int | None" = 1,
) -> TransitionSurface:
    """Evaluate :func:`extremal_neighborhood` at every grid node.

    ``jobs`` worker processes share nothing; results are merged by node
    index, so the output does not depend on the worker count. ``jobs=None``
    uses all available CPUs.
    """
    eps = 0.9 * grid.dx if eps is None else float(eps)
    nodes = grid.nodes()
    tasks = [(params_template, xy, eps, n_samples, grid) for xy in nodes]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_node_task, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))
    else:
        results = [_node_task(t) for t in tasks]
    shape = grid.shape
    F_min = np.full(shape, np.nan)
    D_B = np.full(shape, np.nan)
    direction = np.full(shape, np.nan)
    energy = np.full(shape, np.nan)
    sectors = np.full(shape, "", dtype=object)
    fid = np.full(shape + (n_samples,), np.nan)
    errors = {}
    for idx, (res, err) in enumerate(results):
        ij = np.unravel_index(idx, shape)
        if res is None:
            errors[ij] = err
            log.warning("node %s failed: %s", nodes[idx], err)
            continue
        F_min[ij], D_B[ij], direction[ij], fid[ij], sectors[ij], energy[ij] = res
    return TransitionSurface(grid, params_template, eps, n_samples, F_min, D_B, direction,
                             sectors, energy, fid, errors=errors)


_AXES = ((1, 0), (0, 1))
_LATTICE_DIRS = ((1, 0), (1, 1), (0, 1), (-1, 1))


def boundary_nodes(surf: TransitionSurface) -> np.ndarray:
    """Nodes with a nearest grid neighbour in a different parity sector."""
    sec = surf.sector_map
    out = np.zeros(sec.shape, dtype=bool)
    for da, db in _AXES:
        a, b = sec[: sec.shape[0] - da, : sec.shape[1] - db], sec[da:, db:]
        diff = (a != b) & (a != "") & (b != "")
        out[: sec.shape[0] - da, : sec.shape[1] - db] |= diff
        out[da:, db:] |= diff
    return out


def _sample_toward(surf: TransitionSurface, angle: float) -> int:
    n = surf.n_samples
    return int(round(angle / (2 * np.pi) * n)) % n


def discontinuity_nodes(surf: TransitionSurface, fid_zero: float = FIDELITY_ZERO) -> np.ndarray:
    """Nodes where the fidelity surface itself drops to zero across a grid edge.

    An edge between nearest neighbours A, B is flagged when the circle sample
    of A pointing toward B, or that of B pointing toward A, has fidelity below
    ``fid_zero``; both endpoints are then discontinuity nodes. Uses only the
    sampled fidelities, not the sector labels.
    """
    fid = surf.fidelities
    na, nb = surf.grid.shape
    out = np.zeros((na, nb), dtype=bool)
    for da, db in _AXES:
        fwd = _sample_toward(surf, math.atan2(db, da))
        back = _sample_toward(surf, math.atan2(-db, -da))
        a = fid[: na - da, : nb - db, fwd]
        b = fid[da:, db:, back]
        flag = (a < fid_zero) | (b < fid_zero)
        out[: na - da, : nb - db] |= flag
        out[da:, db:] |= flag
    return out


def _ridge_nodes(surf: TransitionSurface, exclude: np.ndarray) -> np.ndarray:
    D = surf.D_B_max
    na, nb = D.shape
    ridge = np.zeros(D.shape, dtype=bool)
    for i in range(na):
        for j in range(nb):
            if exclude[i, j] or not np.isfinite(D[i, j]):
                continue
            ang = surf.direction[i, j] % np.pi
            step = _LATTICE_DIRS[int(round(ang / (np.pi / 4))) % 4]
            vals = []
            for sgn in (1, -1):
                ii, jj = i + sgn * step[0], j + sgn * step[1]
                if 0 <= ii < na and 0 <= jj < nb:
                    vals.append(D[ii, jj])
            if len(vals) == 2 and all(np.isfinite(vals)) and D[i, j] > max(vals):
                ridge[i, j] = True
    return ridge


def classify_separatrix(
    surf: TransitionSurface,
    theta: "float | None" = None,
    fid_zero: float = FIDELITY_ZERO,
) -> TransitionSurface:
    """Label separatrix nodes; returns a copy with ``labels`` and ``theta`` set.

    Sector-boundary nodes are discontinuous. Among the other nodes whose
    neighbourhood stays inside one sector (F_min >= fid_zero), strict local
    maxima of D_B_max along the extremal direction are continuous
    transitions: stable at or below ``theta``, unstable above it. By
    default ``theta`` is the median ridge value.
    """
    disc = boundary_nodes(surf)
    touching = ~(surf.F_min >= fid_zero)
    ridge = _ridge_nodes(surf, disc | touching)
    labels = np.full(surf.grid.shape, "", dtype=object)
    labels[disc] = DISCONTINUOUS
    ridge_vals = surf.D_B_max[ridge]
    if theta is None:
        theta = float(np.median(ridge_vals)) if ridge_vals.size else math.nan
    labels[ridge & (surf.D_B_max <= theta)] = STABLE
    labels[ridge & (surf.D_B_max > theta)] = UNSTABLE
    return replace(surf, labels=labels, theta=float(theta))
