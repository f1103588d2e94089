import itertools
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from gendicke.hamiltonian import (assemble, assemble_dense, coupling_derivative, diagonal,
                                  diagonal_energy, matter_matrix_element, write_coo)
from gendicke.hilbert import BasisState, SECTORS, enumerate_sector, enumerate_union
from gendicke.model import ModelParams

from oracles import full_hamiltonian, matter_space, projected_hamiltonian


@pytest.mark.parametrize("cfg,state,expected", [
    ("lambda", ((0, 0), (1, 0, 0)), 0.0),
    ("lambda", ((1, 0), (0, 0, 1)), 2.0),
    ("xi", ((2, 1), (0, 1, 0)), 1.5),
])
def test_diagonal_energy(cfg, state, expected):
    assert diagonal_energy(BasisState.of(*state), ModelParams.preset(cfg)) == pytest.approx(expected)


def test_single_excitation_element():
    p = ModelParams.preset("lambda", x=(2.0, 0.0))
    b = enumerate_sector("lambda", 1, "eo", 2, 2)
    i = b.index[BasisState.of((0, 0), (1, 0, 0))]
    j = b.index[BasisState.of((1, 0), (0, 0, 1))]
    H = assemble(p, b)
    assert H[i, j] == pytest.approx(-1.0)
    assert H[j, i] == pytest.approx(-1.0)


def test_matter_elements():
    assert matter_matrix_element(1, 3, (0, 0, 1), (1, 0, 0)) == 1.0
    assert matter_matrix_element(3, 3, (0, 0, 1), (0, 0, 1)) == 1.0
    assert matter_matrix_element(2, 1, (2, 0, 0), (1, 1, 0)) == pytest.approx(math.sqrt(2))


def _matter_matrix(j, k, pops):
    return np.array([[matter_matrix_element(j, k, n, m) for n in pops] for m in pops])


@pytest.mark.parametrize("N", [1, 2, 3])
def test_u3_commutators(N):
    pops = [n for n in itertools.product(range(N + 1), repeat=3) if sum(n) == N]
    A = {(j, k): _matter_matrix(j, k, pops) for j in (1, 2, 3) for k in (1, 2, 3)}
    eye = np.eye(len(pops))
    np.testing.assert_allclose(A[1, 1] + A[2, 2] + A[3, 3], N * eye)
    for (i, j), (k, l) in itertools.product(A, repeat=2):
        lhs = A[i, j] @ A[k, l] - A[k, l] @ A[i, j]
        rhs = (j == k) * A[i, l] - (i == l) * A[k, j]
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    np.testing.assert_allclose(A[1, 2] @ A[2, 1] - A[2, 1] @ A[1, 2], A[1, 1] - A[2, 2])


@pytest.mark.parametrize("N", [1, 2])
def test_matter_elements_match_boson_oracle(N):
    pops, A = matter_space(N)
    for (j, k), ref in A.items():
        np.testing.assert_allclose(_matter_matrix(j, k, pops), ref, atol=1e-14)


@pytest.mark.parametrize("cfg", ["lambda", "xi", "v"])
@pytest.mark.parametrize("N", [1, 2])
def test_assemble_matches_operator_oracle(cfg, N):
    p = ModelParams.preset(cfg, x=(0.5, 0.5) if cfg == "lambda" else (0.7, 1.3), n_atoms=N)
    for s in SECTORS:
        b = enumerate_sector(cfg, N, s, 5, 4)
        if b.dim == 0:
            continue
        ref = projected_hamiltonian(p, b.labels)
        np.testing.assert_allclose(assemble(p, b).toarray(), ref, atol=1e-13)
        np.testing.assert_allclose(assemble_dense(p, b), ref, atol=1e-13)


@pytest.mark.parametrize("cfg", ["lambda", "xi", "v"])
def test_parity_blocks_decouple(cfg):
    # the full operator has no element between different parity sectors
    p = ModelParams.preset(cfg, x=(1.1, 0.9))
    H, labels = full_hamiltonian(p, 5)
    from gendicke.hilbert import k_values, parity_of
    sector = np.array([parity_of(*k_values(l, cfg)).order for l in labels])
    cross = sector[:, None] != sector[None, :]
    assert np.max(np.abs(H[cross])) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["lambda", "xi", "v"]), st.sampled_from(SECTORS),
       st.floats(0, 3), st.floats(0, 3), st.integers(1, 3))
def test_symmetric_and_trace_identity(cfg, sector, a, b, N):
    p = ModelParams.preset(cfg, x=(a, b), n_atoms=N)
    basis = enumerate_sector(cfg, N, sector, 6, 5)
    H = assemble(p, basis)
    assert abs(H - H.T).max() == 0 if basis.dim else True
    np.testing.assert_array_equal(basis.labels[:, 2:].sum(axis=1), N)
    assert np.trace(H.toarray()) == pytest.approx(diagonal(p, basis).sum())


def test_coupling_derivative_is_linear_slope():
    p = ModelParams.preset("v", x=(0.4, 1.2))
    b = enumerate_sector("v", 1, "ee", 6, 6)
    h = 0.25
    for mode in (0, 1):
        x = list(p.x)
        x[mode] += h
        diff = (assemble(p.with_x(x), b) - assemble(p, b)) / h
        np.testing.assert_allclose(diff.toarray(), coupling_derivative(p, b, mode).toarray(),
                                   atol=1e-12)


def test_mismatched_basis():
    with pytest.raises(ValueError):
        assemble(ModelParams.preset("xi"), enumerate_sector("lambda", 1, "ee", 2, 2))


def test_write_coo(tmp_path):
    p = ModelParams.preset("lambda", x=(1.0, 1.0))
    b = enumerate_sector("lambda", 1, "ee", 3, 3)
    H = assemble(p, b)
    write_coo(H, tmp_path / "h.coo")
    lines = (tmp_path / "h.coo").read_text().splitlines()
    assert lines[0] == f"# dim {b.dim}"
    entries = [tuple(map(float, l.split())) for l in lines[1:]]
    assert all(r <= c for r, c, _ in entries)
    M = np.zeros((b.dim, b.dim))
    for r, c, v in entries:
        M[int(r), int(c)] = M[int(c), int(r)] = v
    np.testing.assert_array_equal(M, H.toarray())
