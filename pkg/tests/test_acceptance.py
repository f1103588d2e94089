"""Acceptance criteria, one test (or group) per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion with the measured values.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest
import scipy.linalg as la

from gendicke.groundstate import global_ground_state, hellmann_feynman, lowest_eigenpair
from gendicke.hamiltonian import assemble
from gendicke.hilbert import SECTORS, embed, enumerate_sector, enumerate_union
from gendicke.model import ModelParams
from gendicke.transitions import (DISCONTINUOUS, STABLE, UNSTABLE, boundary_nodes,
                                  discontinuity_nodes, state_fidelity)
from gendicke.wigner import reduce_density, weyl_symbol, wigner_field

from oracles import projected_hamiltonian, two_level_ground_energy, wigner_dyad_integral

CONFIGS = ("xi", "lambda", "v")
EXPECTED_SECTORS = {"xi": {"ee", "oe"}, "lambda": {"ee", "eo", "oo"}, "v": {"ee"}}


def crit(n, title):
    return pytest.mark.criterion(str(n), title)


@crit(1, "zero coupling: E=0, vacuum densities, vacuum Wigner fields")
def test_zero_coupling(detail):
    worst_e = worst_w = 0.0
    slowest = 0.0
    for cfg in CONFIGS:
        t0 = time.perf_counter()
        gs = global_ground_state(ModelParams.preset(cfg))
        fields = []
        for mode in (0, 1):
            rho = reduce_density(gs, mode)
            np.testing.assert_array_equal(rho.matrix, [[1.0]])
            fields.append(wigner_field(rho))
        slowest = max(slowest, time.perf_counter() - t0)
        worst_e = max(worst_e, abs(gs.energy))
        for f in fields:
            Q, P = np.meshgrid(f.q, f.p, indexing="ij")
            worst_w = max(worst_w, np.max(np.abs(f.W - np.exp(-(Q**2 + P**2)) / math.pi)))
    detail(f"max|E|={worst_e:.1e}, max|W-W0|={worst_w:.1e}, slowest={slowest:.2f}s")
    assert worst_e <= 1e-12
    assert worst_w <= 1e-8
    assert slowest < 1.0


@crit(2, "truncation loop: 1-F<=1e-10, |dE|<=1e-8, <30 s per point")
@pytest.mark.parametrize("x", [(0.5, 0.5), (1.5, 1.5), (2.0, 2.0)])
def test_truncation_convergence(x, detail):
    t0 = time.perf_counter()
    gs = global_ground_state(ModelParams.preset("lambda", x=x))
    dt = time.perf_counter() - t0
    detail(f"x={x}: 1-F={gs.fidelity_gap:.1e}, dE={gs.energy_change:.1e}, "
           f"k={gs.k1max}, {dt:.2f}s")
    assert gs.fidelity_gap <= 1e-10
    assert gs.energy_change <= 1e-8
    assert dt < 30


def _random_points(cfg, n=5):
    seed = {"xi": 11, "lambda": 12, "v": 13}[cfg]
    return np.random.default_rng(seed).uniform(0.0, 2.0, size=(n, 2))


@crit(3, "sector Lanczos vs dense union-basis diagonalisation (k<=10)")
@pytest.mark.parametrize("cfg", CONFIGS)
def test_oracle_equivalence(cfg, detail):
    k = 10
    union = enumerate_union(cfg, 1, k, k)
    worst_e = worst_f = 0.0
    for x in _random_points(cfg):
        p = ModelParams.preset(cfg, x=x)
        vals, vecs = la.eigh(projected_hamiltonian(p, union.labels))
        best = None
        for s in SECTORS:
            b = enumerate_sector(cfg, 1, s, k, k)
            if b.dim == 0:
                continue
            e, v = lowest_eigenpair(assemble(p, b), method="lanczos")
            if best is None or e < best[0]:
                best = (e, v, b)
        e, v, b = best
        worst_e = max(worst_e, abs(e - vals[0]))
        worst_f = max(worst_f, 1 - (embed(v, b, union) @ vecs[:, 0]) ** 2)
    detail(f"{cfg}: max|dE|={worst_e:.1e}, max(1-|<a|b>|^2)={worst_f:.1e}")
    assert worst_e <= 1e-10
    assert worst_f <= 1e-10


@crit(4, "Lambda with x23=0 equals the two-level single-mode ground energy")
@pytest.mark.parametrize("x13", [0.5, 1.0, 2.0])
def test_two_level_reduction(x13, detail):
    p = ModelParams.preset("lambda", x=(x13, 0.0))
    gs = global_ground_state(p)
    mu = p.mu[0]
    ref = two_level_ground_energy(p.omega[2] - p.omega[0], p.Omega[0], mu)
    detail(f"x13={x13}: dE={abs(gs.energy - ref):.1e}")
    assert abs(gs.energy - ref) <= 1e-8


@crit(5, "Hellmann-Feynman: |dE/dx13 - <dH/dx13>| <= 1e-4, h=1e-3")
@pytest.mark.parametrize("x", [(0.5, 0.5), (1.0, 0.3), (0.3, 1.5)])
def test_hellmann_feynman(x, detail):
    p = ModelParams.preset("lambda", x=x)
    h = 1e-3
    gs = global_ground_state(p)
    up = global_ground_state(p.with_x((x[0] + h, x[1])))
    dn = global_ground_state(p.with_x((x[0] - h, x[1])))
    assert up.sector is gs.sector is dn.sector
    diff = abs((up.energy - dn.energy) / (2 * h) - hellmann_feynman(gs, 0))
    detail(f"x={x}: {diff:.1e}")
    assert diff <= 1e-4


@crit(6, "phase-diagram sectors on 21x21 [0,2]^2; cross-boundary fidelity < 1e-6")
@pytest.mark.parametrize("cfg", CONFIGS)
def test_sector_structure(cfg, phase_surfaces, detail):
    surf = phase_surfaces(cfg)
    elapsed = next(v for k, v in phase_surfaces.elapsed.items() if k[0] == cfg)
    present = surf.sectors_present()
    disc = surf.labels == DISCONTINUOUS
    sec = surf.sector_map
    xa, xb = surf.grid.xa, surf.grid.xb
    states = {}

    def gs_at(i, j):
        if (i, j) not in states:
            states[i, j] = global_ground_state(surf.params.with_x((xa[i], xb[j])))
        return states[i, j]
    worst = 0.0
    na, nb = sec.shape
    for i, j in itertools.product(range(na), range(nb)):
        for di, dj in ((1, 0), (0, 1)):
            ii, jj = i + di, j + dj
            if ii < na and jj < nb and sec[i, j] != sec[ii, jj]:
                assert disc[i, j] and disc[ii, jj]
                worst = max(worst, state_fidelity(gs_at(i, j), gs_at(ii, jj)))
    detail(f"{cfg}: sectors={sorted(present)}, discontinuous nodes={int(disc.sum())}, "
           f"max cross-boundary F={worst:.1e}, {elapsed:.0f}s on {os.cpu_count()} core(s)")
    assert surf.errors == {}
    assert present == EXPECTED_SECTORS[cfg]
    assert worst < 1e-6
    assert elapsed < 15 * 60


@crit(7, "D_B_max^2 = 2(1-sqrt F_min) and discontinuity nodes == sector boundary nodes")
@pytest.mark.parametrize("cfg", CONFIGS)
def test_bures_surface(cfg, phase_surfaces, detail):
    surf = phase_surfaces(cfg)
    err = float(np.max(np.abs(surf.D_B_max**2 - 2 * (1 - np.sqrt(surf.F_min)))))
    disc, bnd = discontinuity_nodes(surf), boundary_nodes(surf)
    detail(f"{cfg}: identity err={err:.1e}, |disc|={int(disc.sum())}, |boundary|={int(bnd.sum())}, "
           f"mismatched={int((disc != bnd).sum())}")
    assert err <= 1e-10
    np.testing.assert_array_equal(disc, bnd)


PROBES = [(0.0, 0.0), (0.5, 0.0), (0.0, -0.5), (1.0, 1.0), (-1.2, 0.4), (0.3, -1.7),
          (2.0, 0.5), (-0.8, -0.8), (1.5, -2.2)]


@crit(8, "Weyl symbol vs wavefunction quadrature, n,m<=6, 9 probes, 1e-8")
def test_weyl_oracle(detail):
    worst = 0.0
    for n, m in itertools.product(range(7), repeat=2):
        for q, p in PROBES:
            worst = max(worst, abs(weyl_symbol(n, m, q, p) - wigner_dyad_integral(n, m, q, p)))
    detail(f"max error={worst:.1e}")
    assert worst <= 1e-8


REGION_POINTS = [(0.05, 0.05), (0.5, 1.5), (1.5, 0.5), (1.8, 0.3), (0.2, 1.9), (1.9, 1.9)]


@crit(9, "Wigner normalisation 1+-1e-4 and imaginary residue < 1e-10 across Lambda regions")
def test_wigner_normalisation(detail):
    worst_n = worst_i = 0.0
    sectors = set()
    for x in REGION_POINTS:
        gs = global_ground_state(ModelParams.preset("lambda", x=x))
        sectors.add(gs.sector.value)
        for mode in (0, 1):
            f = wigner_field(reduce_density(gs, mode))
            worst_n = max(worst_n, abs(f.integral - 1))
            worst_i = max(worst_i, f.imag_residue)
            assert f.marginal_q().min() >= -1e-8
    detail(f"sectors={sorted(sectors)}, max|int W - 1|={worst_n:.1e}, max imag={worst_i:.1e}")
    assert sectors == {"ee", "eo", "oo"}
    assert worst_n <= 1e-4
    assert worst_i < 1e-10


def _fields(x):
    gs = global_ground_state(ModelParams.preset("lambda", x=x))
    return gs, [wigner_field(reduce_density(gs, m)) for m in (0, 1)]


@crit("10a", "deep normal region: negativity < 1e-6 for both modes")
def test_deep_normal_negativity(detail):
    _, fields = _fields((0.05, 0.05))
    neg = [f.negativity_volume for f in fields]
    detail(f"negativity 13={neg[0]:.1e}, 23={neg[1]:.1e}")
    assert max(neg) < 1e-6


@crit("10b", "Lambda (1.8,0.3): W13 bimodal, negativity > 1e-3; W23 negativity < 1e-6")
def test_collective_region(detail):
    _, (w13, w23) = _fields((1.8, 0.3))
    peaks = w13.peaks_q()
    detail(f"W13 peaks at q={np.round(peaks, 3).tolist()}, negativity 13={w13.negativity_volume:.2e}, "
           f"23={w23.negativity_volume:.1e}")
    assert len(peaks) == 2
    assert w23.negativity_volume < 1e-6
    assert w13.negativity_volume > 1e-3


@crit("10c", "W13(0,0) changes sign across the oo/eo boundary between adjacent nodes")
def test_origin_sign_change(phase_surfaces, detail):
    surf = phase_surfaces("lambda")
    sec = surf.sector_map
    xa, xb = surf.grid.xa, surf.grid.xb
    na, nb = sec.shape
    pairs = []
    for i, j in itertools.product(range(na), range(nb)):
        for di, dj in ((1, 0), (0, 1)):
            ii, jj = i + di, j + dj
            if ii < na and jj < nb and {sec[i, j], sec[ii, jj]} == {"oo", "eo"}:
                pairs.append(((xa[i], xb[j]), (xa[ii], xb[jj])))
    origin = {}

    def w0(x):
        if x not in origin:
            gs = global_ground_state(ModelParams.preset("lambda", x=x))
            rho = reduce_density(gs, "13")
            origin[x] = wigner_field(rho, [-0.1, 0.0, 0.1], [-0.1, 0.0, 0.1]).W[1, 1]
        return origin[x]
    flips = [pr for pr in pairs if np.sign(w0(pr[0])) != np.sign(w0(pr[1]))]
    vals = sorted(origin.values())
    detail(f"{len(pairs)} adjacent eo/oo pairs, {len(flips)} with a sign change, "
           f"W13(0,0) range [{vals[0]:.3f}, {vals[-1]:.3f}]" if vals else "no eo/oo pairs")
    assert pairs
    assert flips


@crit("10d", "median D_B_max of unstable ridge points exceeds that of stable ones")
@pytest.mark.parametrize("cfg", CONFIGS)
def test_ridge_ordering(cfg, phase_surfaces, detail):
    surf = phase_surfaces(cfg)
    st = surf.D_B_max[surf.labels == STABLE]
    un = surf.D_B_max[surf.labels == UNSTABLE]
    detail(f"{cfg}: {st.size} stable (median {np.median(st) if st.size else math.nan:.4f}), "
           f"{un.size} unstable (median {np.median(un) if un.size else math.nan:.4f})")
    assert st.size and un.size
    assert np.median(un) > np.median(st)
