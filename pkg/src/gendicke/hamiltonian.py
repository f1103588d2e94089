"""Sparse Hamiltonian of the generalised Dicke model on a sector basis.

    H = sum_jk Omega_jk a+_jk a_jk + sum_j omega_j A_jj
        - (1/sqrt(N_a)) sum_jk mu_jk (A_jk + A_kj)(a_jk + a+_jk)

The matter generators A_jk = b+_j b_k act on the totally symmetric U(3)
irrep, realised by three-mode boson occupations (n1, n2, n3). Counter-rotating
terms are kept. Matrix elements leaving the truncated basis are dropped.
"""

from __future__ import annotations

import functools
import math

import numpy as np
import scipy.sparse as sp

from .hilbert import SectorBasis
from .model import ModelParams

__all__ = [
    "matter_matrix_element",
    "diagonal_energy",
    "diagonal",
    "interaction",
    "assemble",
    "assemble_dense",
    "coupling_derivative",
    "write_coo",
]


def matter_matrix_element(j: int, k: int, n, n_prime) -> float:
    """<n'| A_jk |n> with A_jk = b+_j b_k (levels numbered 1..3)."""
    n, n_prime = tuple(n), tuple(n_prime)
    if j == k:
        return float(n[j - 1]) if n == n_prime else 0.0
    target = list(n)
    target[j - 1] += 1
    target[k - 1] -= 1
    if target[k - 1] < 0 or tuple(target) != n_prime:
        return 0.0
    return math.sqrt((n[j - 1] + 1) * n[k - 1])


def diagonal_energy(state, params: ModelParams) -> float:
    nu_a, nu_b, n1, n2, n3 = state
    Wa, Wb = params.Omega
    w1, w2, w3 = params.omega
    return Wa * nu_a + Wb * nu_b + w1 * n1 + w2 * n2 + w3 * n3


def diagonal(params: ModelParams, basis: SectorBasis) -> np.ndarray:
    weights = np.array(params.Omega + params.omega)
    return basis.labels @ weights


@functools.lru_cache(maxsize=256)
def interaction(basis: SectorBasis, mode: int) -> sp.csr_matrix:
    """Matrix of (A_jk + A_kj)(a_jk + a+_jk) for active mode 0 or 1 of the basis."""
    _check_mode(mode)
    j, k = basis.config.modes[mode]
    labels = basis.labels
    rows, cols, vals = [], [], []
    for lo, hi in ((j, k), (k, j)):
        # A_{lo,hi}: move one atom from level hi into level lo
        n_lo = labels[:, 1 + lo]
        n_hi = labels[:, 1 + hi]
        matter = np.sqrt((n_lo + 1) * n_hi.astype(float))
        for dnu in (+1, -1):
            nu = labels[:, mode]
            field = np.sqrt(nu + 1.0) if dnu > 0 else np.sqrt(nu.astype(float))
            amp = matter * field
            ok = amp > 0
            new = labels[ok].copy()
            new[:, mode] += dnu
            new[:, 1 + lo] += 1
            new[:, 1 + hi] -= 1
            pos = basis.lookup(new)
            hit = pos >= 0
            src = np.flatnonzero(ok)[hit]
            rows.append(pos[hit])
            cols.append(src)
            vals.append(amp[ok][hit])
    rows = np.concatenate(rows) if rows else np.zeros(0, int)
    cols = np.concatenate(cols) if cols else np.zeros(0, int)
    vals = np.concatenate(vals) if vals else np.zeros(0)
    out = sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
    out.sum_duplicates()
    return out


def _check_mode(mode):
    if mode not in (0, 1):
        raise ValueError(f"active mode index must be 0 or 1, got {mode}")


def _check_basis(params: ModelParams, basis: SectorBasis):
    if basis.config is not params.config or basis.n_atoms != params.n_atoms:
        raise ValueError(
            f"basis built for {basis.config.value} with N_a={basis.n_atoms}, "
            f"parameters are {params.config.value} with N_a={params.n_atoms}")


def assemble(params: ModelParams, basis: SectorBasis) -> sp.csr_matrix:
    """Real symmetric Hamiltonian matrix restricted to ``basis`` (CSR)."""
    _check_basis(params, basis)
    H = sp.diags(diagonal(params, basis), format="csr")
    scale = 1.0 / math.sqrt(params.n_atoms)
    for mode, mu in enumerate(params.mu):
        if mu != 0.0:
            H = H - (mu * scale) * interaction(basis, mode)
    return H.tocsr()


@functools.lru_cache(maxsize=256)
def _dense_interaction(basis: SectorBasis, mode: int) -> np.ndarray:
    out = interaction(basis, mode).toarray()
    out.setflags(write=False)
    return out


def assemble_dense(params: ModelParams, basis: SectorBasis) -> np.ndarray:
    """Same matrix as :func:`assemble`, as a dense array (for small bases)."""
    _check_basis(params, basis)
    H = np.zeros((basis.dim, basis.dim))
    scale = 1.0 / math.sqrt(params.n_atoms)
    for mode, mu in enumerate(params.mu):
        if mu != 0.0:
            H -= (mu * scale) * _dense_interaction(basis, mode)
    H[np.diag_indices_from(H)] += diagonal(params, basis)
    return H


def coupling_derivative(params: ModelParams, basis: SectorBasis, mode: int) -> sp.csr_matrix:
    """dH/dx for the dimensionless coupling of active mode ``mode``."""
    _check_basis(params, basis)
    _check_mode(mode)
    mu_c = params.critical_couplings[mode]
    return (-mu_c / math.sqrt(params.n_atoms)) * interaction(basis, mode)


def write_coo(H, path) -> None:
    """Write the upper triangle as ``row col value`` lines, sorted by (row, col)."""
    upper = sp.triu(sp.coo_matrix(H)).tocsr()
    upper.sort_indices()
    coo = upper.tocoo()
    with open(path, "w") as fh:
        fh.write(f"# dim {H.shape[0]}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v:.17g}\n")
