import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threshold_walks.errors import PreconditionError
from threshold_walks.graph_model import ThresholdGraph, laplacian_matrix
from threshold_walks.oracle import dense_laplacian, sym_eigen
from threshold_walks.spectral import DENSE_LIMIT, decompose, projector_apply

from conftest import connected_general, random_sequence


def expected_multiplicities(graph):
    """Level accounting: each clique block contributes k_i at D_{k_i}+1 and each
    null block l_i at D_{l_i}, minus one at level 1 for the part that has no
    block below it to balance against."""
    b = graph.blocks
    counts = {0: 1}
    for i in range(b.m):
        kc = b.k[i] - (1 if i == 0 else 0)
        lc = b.l[i] - (1 if i == 0 and b.k[0] == 0 else 0)
        if kc > 0:
            counts[b.degrees_k[i] + 1] = counts.get(b.degrees_k[i] + 1, 0) + kc
        if lc > 0:
            counts[b.degrees_l[i]] = counts.get(b.degrees_l[i], 0) + lc
    return counts


def oracle_multiplicities(graph):
    w, _ = sym_eigen(dense_laplacian(graph))
    vals, counts = np.unique(np.rint(w).astype(int), return_counts=True)
    assert np.abs(w - np.rint(w)).max() <= 1e-9
    return dict(zip(vals.tolist(), counts.tolist()))


def test_binary5_spectrum(binary5):
    dec = decompose(binary5)
    assert dec.multiplicities() == {5: 3, 3: 1, 0: 1}
    lams, _ = dec.dense()
    assert lams.sum() == 18 == laplacian_matrix(binary5).trace()


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_star_spectrum(n):
    star = ThresholdGraph.from_values([1] + [0] * (n - 1), 0.5)
    assert star.binary_split() == (1, n - 1)
    dec = decompose(star)
    assert dec.multiplicities() == {n: 1, 1: n - 2, 0: 1}
    assert dec.multiplicities() == oracle_multiplicities(star)


def test_uniform_zero_mode(binary5):
    dec = decompose(binary5)
    v = dec.vectors(0)
    assert v.shape == (5, 1)
    assert np.allclose(np.abs(v[:, 0]), 1 / np.sqrt(5), atol=1e-15)


def test_complete_graph_spectrum():
    g = ThresholdGraph.from_values([1.0] * 6, 0.5)
    assert decompose(g).multiplicities() == {6: 5, 0: 1}


def test_projector_e0_gives_mean():
    g = connected_general(4, 20)
    dec = decompose(g)
    psi = np.random.default_rng(0).standard_normal(20)
    assert np.allclose(projector_apply(dec, 0, psi), psi.mean(), atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_projectors_resolve_identity_and_are_idempotent(seed):
    g = connected_general(seed, 25)
    dec = decompose(g)
    e1 = np.zeros(g.n)
    e1[1] = 1.0
    total = sum(projector_apply(dec, lam, e1) for lam in dec.eigenvalues)
    assert np.abs(total - e1).max() <= 1e-13
    psi = np.random.default_rng(seed).standard_normal(g.n)
    for lam in dec.eigenvalues:
        once = projector_apply(dec, lam, psi)
        assert np.abs(projector_apply(dec, lam, once) - once).max() <= 1e-13


@pytest.mark.parametrize("seed", range(6))
def test_projectors_match_oracle_eigenvectors(seed):
    g = connected_general(seed, 32)
    dec = decompose(g)
    w, v = sym_eigen(dense_laplacian(g))
    psi = np.random.default_rng(100 + seed).standard_normal((g.n, 2))
    for lam in dec.eigenvalues:
        cols = v[:, np.abs(w - lam) < 1e-6]
        dense = cols @ cols.T
        assert np.abs(projector_apply(dec, lam, psi) - dense @ psi).max() <= 1e-10
        assert np.abs(dec.projector_column(lam, 3) - dense[:, 3]).max() <= 1e-10


def test_projector_unknown_eigenvalue(binary5):
    with pytest.raises(ValueError):
        projector_apply(decompose(binary5), 4, np.ones(5))


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 200), st.integers(0, 2**32 - 1), st.booleans())
def test_completeness_and_orthonormality(n, seed, clique_bottom):
    rng = np.random.default_rng(seed)
    bits = random_sequence(rng, n)
    bits[0] = bits[1] = int(clique_bottom)
    g = ThresholdGraph.from_creation_sequence(bits)
    dec = decompose(g, check=True)
    assert sum(dec.multiplicities().values()) == n
    assert dec.multiplicities() == expected_multiplicities(g)
    lams, vecs = dec.dense()
    lap = laplacian_matrix(g)
    assert np.abs(lap @ vecs - vecs * lams).max() <= 1e-10
    gram = vecs.T @ vecs
    assert np.abs(gram - np.eye(n)).max() <= 1e-10
    cross = np.abs(gram[lams[:, None] != lams[None, :]])
    assert cross.size == 0 or cross.max() <= 1e-12
    assert lams.sum() == lap.trace()


@pytest.mark.parametrize("k1_zero", [True, False])
def test_level_one_rows_follow_bottom_block(k1_zero):
    rng = np.random.default_rng(5)
    for _ in range(20):
        bits = random_sequence(rng, 30)
        bits[0] = bits[1] = 0 if k1_zero else 1
        g = ThresholdGraph.from_creation_sequence(bits)
        assert (g.blocks.k[0] == 0) == k1_zero
        mult = decompose(g).multiplicities()
        assert mult == oracle_multiplicities(g) == expected_multiplicities(g)
        top = g.blocks.degrees_k[0] + 1
        if not k1_zero and g.blocks.k[0] >= 2:
            assert mult[top] >= g.blocks.k[0] - 1
        else:
            assert g.blocks.k[0] == 0


def test_disconnected_graph_is_rejected(fig1):
    with pytest.raises(PreconditionError):
        decompose(fig1)


def test_dense_vectors_are_bounded():
    bits = [1] * (DENSE_LIMIT + 1)
    dec = decompose(ThresholdGraph.from_creation_sequence(bits), check=False)
    with pytest.raises(ValueError):
        dec.vectors(DENSE_LIMIT + 1)
    # implicit projectors still work past the dense limit
    col = dec.projector_column(0, 7)
    assert np.allclose(col, 1 / (DENSE_LIMIT + 1))
