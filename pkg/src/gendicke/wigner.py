"""Reduced single-mode density matrices and their Wigner functions.

Quadratures are dimensionless, z = q + i p, and a Wigner function is
normalised with respect to dq dp; the vacuum is exp(-(q^2 + p^2)) / pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .groundstate import GroundState

__all__ = [
    "ReducedDensity",
    "WignerField",
    "NumericalConsistencyError",
    "reduce_density",
    "laguerre",
    "weyl_symbol",
    "wigner_field",
    "negativity_volume",
    "default_grid",
    "DEFAULT_HALF_RANGE",
    "DEFAULT_POINTS",
]

DEFAULT_HALF_RANGE = 6.0
DEFAULT_POINTS = 241
IMAG_TOL = 1e-10
# populations below this do not count as occupied when sizing the grid
OCCUPATION_CUTOFF = 1e-12


class NumericalConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ReducedDensity:
    mode: str
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def purity(self) -> float:
        return float(np.real(np.sum(self.matrix * self.matrix.conj())))

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    @property
    def nu_max(self) -> int:
        """Largest photon number with population above the occupation cutoff."""
        occ = np.flatnonzero(self.populations > OCCUPATION_CUTOFF)
        return int(occ[-1]) if occ.size else 0

    @property
    def mean_photons(self) -> float:
        return float(np.arange(self.dim) @ self.populations)

    @classmethod
    def fock(cls, n: int, mode: str = "") -> "ReducedDensity":
        rho = np.zeros((n + 1, n + 1))
        rho[n, n] = 1.0
        return cls(mode, rho)

    @classmethod
    def pure(cls, amplitudes, mode: str = "") -> "ReducedDensity":
        psi = np.asarray(amplitudes)
        psi = psi / np.linalg.norm(psi)
        return cls(mode, np.outer(psi, psi.conj()))


def _mode_index(gs: GroundState, mode) -> int:
    tags = gs.basis.config.mode_tags
    if mode in (0, 1):
        return int(mode)
    tag = str(mode)
    if tag not in tags:
        raise ValueError(f"mode {mode!r} is not active in {gs.basis.config.value}; choose from {tags}")
    return tags.index(tag)


def reduce_density(gs: GroundState, mode) -> ReducedDensity:
    """Partial trace of |gs><gs| over the other mode and the atom.

    ``mode`` is a tag such as ``"13"`` or an active-mode index 0/1.
    """
    m = _mode_index(gs, mode)
    labels = gs.basis.labels
    c = np.asarray(gs.coeffs)
    nz = c != 0
    labels, c = labels[nz], c[nz]
    nu = labels[:, m]
    rest = np.delete(labels, m, axis=1)
    _, traced = np.unique(rest, axis=0, return_inverse=True)
    traced = traced.ravel()
    size = int(nu.max()) + 1 if nu.size else 1
    C = np.zeros((size, int(traced.max()) + 1 if traced.size else 1), dtype=c.dtype)
    C[nu, traced] = c
    rho = C @ C.conj().T
    return ReducedDensity(gs.basis.config.mode_tags[m], rho)


def laguerre(n_max: int, alpha: int, x: np.ndarray) -> np.ndarray:
    """Generalised Laguerre polynomials L_m^alpha(x) for m = 0..n_max.

    Three-term recurrence; returns an array of shape (n_max + 1,) + x.shape.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def _prefactor(n: int, m: int) -> float:
    # (-1)^m 2^((n-m)/2) sqrt(m!/n!) / pi with n >= m, in log space
    log_mag = 0.5 * ((n - m) * math.log(2.0) + math.lgamma(m + 1) - math.lgamma(n + 1))
    return (-1) ** m * math.exp(log_mag) / math.pi


def weyl_symbol(n: int, m: int, q, p):
    """Weyl symbol (Wigner function) of the Fock dyad |n><m| at (q, p)."""
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be non-negative")
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    hi, lo = max(n, m), min(n, m)
    d = hi - lo
    z = q - 1j * p if n >= m else q + 1j * p
    r2 = q * q + p * p
    L = laguerre(lo, d, 2.0 * r2)[lo]
    out = _prefactor(hi, lo) * z ** d * np.exp(-r2) * L
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class WignerField:
    mode: str
    q: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    imag_residue: float = 0.0
    nu_max: int = 0

    @property
    def dq(self) -> float:
        return float(self.q[1] - self.q[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    @property
    def cell_area(self) -> float:
        return self.dq * self.dp

    @property
    def integral(self) -> float:
        return float(self.W.sum() * self.cell_area)

    @property
    def negativity_volume(self) -> float:
        return negativity_volume(self)

    def marginal_q(self) -> np.ndarray:
        """Position distribution, integral of W over p."""
        return self.W.sum(axis=1) * self.dp

    def marginal_p(self) -> np.ndarray:
        return self.W.sum(axis=0) * self.dq

    def value_at_origin(self) -> float:
        i = int(np.argmin(np.abs(self.q)))
        j = int(np.argmin(np.abs(self.p)))
        return float(self.W[i, j])

    def peaks_q(self, rel_height: float = 0.05) -> np.ndarray:
        """q positions of local maxima of the position marginal."""
        P = self.marginal_q()
        thr = rel_height * P.max()
        inner = (P[1:-1] > P[:-2]) & (P[1:-1] >= P[2:]) & (P[1:-1] > thr)
        return self.q[1:-1][inner]


def default_grid(nu_max: int = 0, half_range: float = DEFAULT_HALF_RANGE,
                 points: int = DEFAULT_POINTS) -> np.ndarray:
    """Symmetric quadrature grid, widened to sqrt(2 nu_max) + 4 at fixed spacing."""
    step = 2 * half_range / (points - 1)
    need = math.sqrt(2 * nu_max) + 4.0
    if need > half_range:
        half = math.ceil(need / step) * step
        points = int(round(2 * half / step)) + 1
        half_range = half
    return np.linspace(-half_range, half_range, points)


def wigner_field(rho: ReducedDensity, qgrid=None, pgrid=None) -> WignerField:
    """W(q, p) = sum_nm rho_nm W_{|n><m|}(q, p) on the outer-product grid.

    Without explicit grids :func:`default_grid` is used, sized by the
    occupied photon numbers. ``W[i, j]`` is the value at (q[i], p[j]).
    """
    if qgrid is None:
        qgrid = default_grid(rho.nu_max)
    if pgrid is None:
        pgrid = default_grid(rho.nu_max)
    q = np.asarray(qgrid, dtype=float)
    p = np.asarray(pgrid, dtype=float)
    for g in (q, p):
        if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0):
            raise ValueError("quadrature grids must be strictly increasing 1-d arrays")
    R = rho.matrix
    M = R.shape[0] - 1
    Q, P = np.meshgrid(q, p, indexing="ij")
    r2 = Q * Q + P * P
    gauss = np.exp(-r2)
    x = 2.0 * r2
    zbar = Q - 1j * P
    total = np.zeros(Q.shape, dtype=complex)
    zpow = np.ones(Q.shape, dtype=complex)
    for d in range(M + 1):
        mmax = M - d
        upper = np.array([R[m + d, m] for m in range(mmax + 1)])
        lower = np.array([R[m, m + d] for m in range(mmax + 1)])
        if d and not (np.any(upper) or np.any(lower)):
            zpow = zpow * zbar
            continue
        L = laguerre(mmax, d, x)
        coef = np.array([_prefactor(m + d, m) for m in range(mmax + 1)])
        radial = np.tensordot(coef * upper, L, axes=1)
        total += radial * zpow
        if d:
            radial_c = np.tensordot(coef * lower, L, axes=1)
            total += radial_c * np.conj(zpow)
        zpow = zpow * zbar
    total *= gauss
    residue = float(np.max(np.abs(total.imag))) if total.size else 0.0
    if residue > IMAG_TOL:
        raise NumericalConsistencyError(f"Wigner function has imaginary residue {residue:.3e}")
    return WignerField(rho.mode, q, p, total.real.copy(), residue, rho.nu_max)


def negativity_volume(field: WignerField) -> float:
    """Integral of the negative part of W over the grid, (int |W| - int W) / 2."""
    return float(np.sum(np.maximum(0.0, -field.W)) * field.cell_area)
