"""Truncated, parity-adapted product bases |nu_a, nu_b> x |n1, n2, n3>.

The two parity operators exp(i pi K_s) commute with the Hamiltonian, with

    K_s = sum_jk eta^(s)_jk nu_jk + sum_i lambda^(s)_i n_i

and the integer coefficients tabulated in ``K_COEFFICIENTS``. A sector basis
keeps the states whose (k1, k2) have the sector's parities and satisfy
k1 <= k1max, k2 <= k2max.
"""

from __future__ import annotations

import csv
import enum
import functools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import AtomicConfiguration

__all__ = [
    "BasisState",
    "ParitySector",
    "SectorBasis",
    "K_COEFFICIENTS",
    "k_values",
    "parity_of",
    "enumerate_sector",
    "enumerate_union",
    "embed",
    "overlap",
    "write_basis_csv",
]


class BasisState(NamedTuple):
    """Photon numbers of the two active modes and the three level populations."""

    nu_a: int
    nu_b: int
    n1: int
    n2: int
    n3: int

    @property
    def nu(self) -> tuple[int, int]:
        return (self.nu_a, self.nu_b)

    @property
    def n(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    @classmethod
    def of(cls, nu, n) -> "BasisState":
        return cls(int(nu[0]), int(nu[1]), int(n[0]), int(n[1]), int(n[2]))


class ParitySector(enum.Enum):
    EE = "ee"
    EO = "eo"
    OE = "oe"
    OO = "oo"

    @property
    def parities(self) -> tuple[int, int]:
        return tuple(0 if c == "e" else 1 for c in self.value)

    @property
    def order(self) -> int:
        return _SECTOR_ORDER[self]

    def __lt__(self, other):
        if not isinstance(other, ParitySector):
            return NotImplemented
        return self.order < other.order

    @classmethod
    def parse(cls, value) -> "ParitySector":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


SECTORS = (ParitySector.EE, ParitySector.EO, ParitySector.OE, ParitySector.OO)
_SECTOR_ORDER = {s: i for i, s in enumerate(SECTORS)}


# Rows: (eta_a, eta_b, lambda_1, lambda_2, lambda_3), with (a, b) the active
# modes in config order. The inactive mode has eta = 0 in every case.
K_COEFFICIENTS = {
    AtomicConfiguration.LAMBDA: ((1, 1, 0, 0, 1), (0, 1, 1, 0, 1)),
    AtomicConfiguration.XI: ((1, 1, 0, 1, 2), (0, 1, 0, 0, 1)),
    AtomicConfiguration.V: ((1, 1, 0, 1, 1), (0, 1, 0, 0, 1)),
}


def k_values(state, config: AtomicConfiguration) -> tuple[int, int]:
    """Eigenvalues (k1, k2) of K_1 and K_2 on a product basis state."""
    config = AtomicConfiguration.parse(config)
    labels = tuple(state)
    return tuple(int(sum(c * v for c, v in zip(row, labels)))
                 for row in K_COEFFICIENTS[config])


def parity_of(k1: int, k2: int) -> ParitySector:
    return SECTORS[2 * (k1 % 2) + (k2 % 2)]


def _label_keys(labels: np.ndarray, base: int) -> np.ndarray:
    keys = np.zeros(len(labels), dtype=np.int64)
    for col in range(labels.shape[1]):
        keys = keys * base + labels[:, col]
    return keys


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Ordered truncated basis of one parity sector.

    ``labels`` is an int array of shape (dim, 5) with columns
    (nu_a, nu_b, n1, n2, n3); ``k`` holds the matching (k1, k2).
    Ordering is lexicographic on (k1, k2, nu_a, nu_b, n1, n2).
    """

    config: AtomicConfiguration
    n_atoms: int
    sector: "ParitySector | None"
    k1max: int
    k2max: int
    labels: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)
    _keys: np.ndarray = field(repr=False)
    _order: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __len__(self):
        return self.dim

    @property
    def key_base(self) -> int:
        return _key_base(self.k1max, self.k2max, self.n_atoms)

    @functools.cached_property
    def states(self) -> tuple[BasisState, ...]:
        return tuple(BasisState(*map(int, row)) for row in self.labels)

    @functools.cached_property
    def index(self) -> dict[BasisState, int]:
        return {s: i for i, s in enumerate(self.states)}

    def lookup(self, labels: np.ndarray, base: "int | None" = None) -> np.ndarray:
        """Positions of the given label rows in this basis, -1 where absent."""
        labels = np.asarray(labels, dtype=np.int64).reshape(-1, 5)
        base = self.key_base if base is None else base
        out = np.full(len(labels), -1, dtype=np.int64)
        if self.dim == 0 or len(labels) == 0:
            return out
        inside = np.all(labels >= 0, axis=1) & np.all(labels < base, axis=1)
        if not inside.any():
            return out
        keys = _label_keys(labels[inside], base)
        mykeys = self._keys if base == self.key_base else _label_keys(self.labels, base)
        order = self._order if base == self.key_base else np.argsort(mykeys)
        sorted_keys = mykeys[order]
        pos = np.searchsorted(sorted_keys, keys)
        pos = np.minimum(pos, len(sorted_keys) - 1)
        hit = sorted_keys[pos] == keys
        found = np.where(hit, order[pos], -1)
        out[inside] = found
        return out


def _key_base(k1max: int, k2max: int, n_atoms: int) -> int:
    # strictly larger than any label value that can occur in either basis
    return max(k1max, k2max, n_atoms) + 4


def _build(config, n_atoms, sector, k1max, k2max) -> SectorBasis:
    N = int(n_atoms)
    nmax = max(int(k1max), 0)
    # every active mode enters K_1 with unit weight, so nu <= k1max
    nu = np.arange(nmax + 1)
    pops = np.array([(n1, n2, N - n1 - n2) for n1 in range(N + 1) for n2 in range(N + 1 - n1)],
                    dtype=np.int64)
    na, nb, ip = np.meshgrid(nu, nu, np.arange(len(pops)), indexing="ij")
    labels = np.column_stack([na.ravel(), nb.ravel(), pops[ip.ravel()]]).astype(np.int64)
    coeff = np.array(K_COEFFICIENTS[config], dtype=np.int64)
    k = labels @ coeff.T
    keep = (k[:, 0] <= k1max) & (k[:, 1] <= k2max)
    if sector is not None:
        p1, p2 = sector.parities
        keep &= (k[:, 0] % 2 == p1) & (k[:, 1] % 2 == p2)
    labels, k = labels[keep], k[keep]
    order = np.lexsort((labels[:, 3], labels[:, 2], labels[:, 1], labels[:, 0], k[:, 1], k[:, 0]))
    labels, k = labels[order], k[order]
    labels.setflags(write=False)
    k.setflags(write=False)
    base = _key_base(k1max, k2max, N)
    keys = _label_keys(labels, base)
    return SectorBasis(config, N, sector, int(k1max), int(k2max), labels, k,
                       keys, np.argsort(keys, kind="stable"))


@functools.lru_cache(maxsize=512)
def _cached(config, n_atoms, sector, k1max, k2max):
    return _build(config, n_atoms, sector, k1max, k2max)


def enumerate_sector(config, n_atoms: int, sector, k1max: int, k2max: int) -> SectorBasis:
    """All product states with k1 <= k1max, k2 <= k2max in the given parity sector.

    Results are cached; the returned basis is read-only and may be shared.
    """
    if k1max < 0 or k2max < 0:
        raise ValueError("truncation bounds must be non-negative")
    return _cached(AtomicConfiguration.parse(config), int(n_atoms),
                   ParitySector.parse(sector), int(k1max), int(k2max))


def enumerate_union(config, n_atoms: int, k1max: int, k2max: int) -> SectorBasis:
    """The k-bounded basis without the parity filter (all four sectors)."""
    if k1max < 0 or k2max < 0:
        raise ValueError("truncation bounds must be non-negative")
    return _cached(AtomicConfiguration.parse(config), int(n_atoms), None, int(k1max), int(k2max))


@functools.lru_cache(maxsize=2048)
def _matching(source: SectorBasis, target: SectorBasis) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i in source, j in target) of identical states."""
    if source.dim == 0 or target.dim == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    base = max(source.key_base, target.key_base)
    pos = target.lookup(source.labels, base)
    hit = np.flatnonzero(pos >= 0)
    return hit, pos[hit]


def embed(vector: np.ndarray, source: SectorBasis, target: SectorBasis) -> np.ndarray:
    """Coefficients of ``vector`` (over ``source``) re-expressed over ``target``.

    States missing from ``target`` are dropped; no renormalisation.
    """
    out = np.zeros(target.dim, dtype=np.result_type(vector, float))
    src, dst = _matching(source, target)
    out[dst] = np.asarray(vector)[src]
    return out


def overlap(vec_a: np.ndarray, basis_a: SectorBasis, vec_b: np.ndarray, basis_b: SectorBasis) -> float:
    """<a|b> by exact label matching between two (possibly different) bases."""
    if basis_a.config is not basis_b.config or basis_a.n_atoms != basis_b.n_atoms:
        raise ValueError("bases belong to different models")
    if (basis_a.sector is not None and basis_b.sector is not None
            and basis_a.sector is not basis_b.sector):
        return 0.0
    ia, ib = _matching(basis_a, basis_b)
    return float(np.dot(np.conj(np.asarray(vec_a)[ia]), np.asarray(vec_b)[ib]))


def write_basis_csv(basis: SectorBasis, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k1", "k2", "nu_a", "nu_b", "n1", "n2", "n3"])
        for (k1, k2), row in zip(basis.k, basis.labels):
            writer.writerow([int(k1), int(k2), *map(int, row)])
