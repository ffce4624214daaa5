import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhistories.histories import (DecoherenceMatrix, HistoryTree,
                                  ProjectiveDecomposition, coarse_grain,
                                  decoherence_matrix, extend_all,
                                  extend_branch, real_embed)
from qhistories.linalg import (HamiltonianFlow, RandomStream, hermitian_eig,
                               sample_gue, sample_unit_vector)


def _random_decomposition(dim, t, rng, blocks=None):
    H = sample_gue(dim, 1.0, rng)
    _, V = hermitian_eig(H)
    if blocks is None:
        blocks = [[i] for i in range(dim)]
    projs = []
    for block in blocks:
        P = sum(np.outer(V[:, i], V[:, i].conj()) for i in block)
        projs.append(P)
    return ProjectiveDecomposition(t, projs)


def test_decomposition_validation():
    P = np.diag([1.0, 0.0]).astype(complex)
    ProjectiveDecomposition(0.0, [P, np.eye(2) - P])
    with pytest.raises(ValueError, match="identity"):
        ProjectiveDecomposition(0.0, [P])
    with pytest.raises(ValueError, match="orthogonal"):
        ProjectiveDecomposition(0.0, [np.diag([1.0, 1.0, 0.0]),
                                      np.diag([0.0, 1.0, 1.0])])
    with pytest.raises(ValueError, match="idempotent"):
        ProjectiveDecomposition(0.0, [0.5 * np.eye(2), 0.5 * np.eye(2)])
    with pytest.raises(ValueError, match="Hermitian"):
        ProjectiveDecomposition(0.0, [np.array([[1, 1], [0, 0]]),
                                      np.array([[0, -1], [0, 1]])])


@settings(deadline=None, max_examples=15)
@given(seed=st.integers(0, 10**6), dim=st.integers(2, 5),
       depth=st.integers(1, 3))
def test_tree_probabilities_sum_to_one(seed, dim, depth):
    rng = RandomStream(seed, "tree")
    psi = sample_unit_vector(dim, "complex", rng.stream("psi"))
    H = sample_gue(dim, 1.0, rng.stream("H"))
    flow = HamiltonianFlow(H)
    tree = HistoryTree(initial_state=psi, evolution=flow.unitary)
    for level in range(depth):
        dec = _random_decomposition(dim, float(level + 1),
                                    rng.stream(f"dec{level}"))
        tree = extend_all(tree, dec)
    probs = [np.linalg.norm(tree.path_state(p)) ** 2 for p in tree.leaves()]
    assert len(probs) == dim ** depth
    assert abs(sum(probs) - 1.0) < 1e-10


def test_heisenberg_projection():
    dim = 3
    rng = RandomStream(9, "heis")
    psi = sample_unit_vector(dim, "complex", rng.stream("psi"))
    H = sample_gue(dim, 1.0, rng.stream("H"))
    flow = HamiltonianFlow(H)
    dec = _random_decomposition(dim, 0.7, rng.stream("dec"))
    tree = extend_all(HistoryTree(initial_state=psi, evolution=flow.unitary),
                      dec)
    U = flow.unitary(0.7)
    for i, leaf in enumerate(tree.leaves()):
        want = U.conj().T @ dec.projectors[i] @ U @ psi
        assert np.linalg.norm(tree.path_state(leaf) - want) < 1e-12


def test_decoherence_matrix_definition():
    dim = 4
    rng = RandomStream(11, "dm")
    psi = sample_unit_vector(dim, "complex", rng.stream("psi"))
    tree = extend_all(HistoryTree(initial_state=psi, evolution=None),
                      _random_decomposition(dim, 1.0, rng.stream("dec")))
    D = decoherence_matrix(tree)
    states = [tree.path_state(p) for p in tree.leaves()]
    for a in range(dim):
        for b in range(dim):
            assert abs(D.entries[a, b] - np.vdot(states[b], states[a])) < 1e-12
    assert abs(D.entries.sum() - 1.0) < 1e-10
    assert np.max(np.abs(D.entries - D.entries.conj().T)) < 1e-12


def test_coarse_grain_sums_blocks():
    D = DecoherenceMatrix(np.arange(16).reshape(4, 4).astype(complex),
                          list(range(4)))
    C = coarse_grain(D, [[0, 1], [2, 3]])
    assert C.entries[0, 0] == 0 + 1 + 4 + 5
    assert C.entries[1, 0] == 8 + 9 + 12 + 13
    assert abs(C.entries.sum() - D.entries.sum()) < 1e-12
    with pytest.raises(ValueError):
        coarse_grain(D, [[0, 1], [2]])
    with pytest.raises(ValueError):
        coarse_grain(D, [[0, 1], [1, 2, 3]])


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(0, 10**6), dim=st.integers(1, 8))
def test_real_embed_preserves_real_parts(seed, dim):
    rng = RandomStream(seed, "embed")
    u = sample_unit_vector(dim, "complex", rng.stream("u"))
    w = sample_unit_vector(dim, "complex", rng.stream("w"))
    assert abs(np.linalg.norm(real_embed(u)) - 1.0) < 1e-12
    assert abs(real_embed(u) @ real_embed(w) - np.real(np.vdot(w, u))) < 1e-12


def test_extend_branch_time_ordering():
    psi = np.array([1.0, 0.0], dtype=complex)
    P = np.diag([1.0, 0.0]).astype(complex)
    dec1 = ProjectiveDecomposition(1.0, [P, np.eye(2) - P])
    tree = extend_all(HistoryTree(initial_state=psi, evolution=None), dec1)
    with pytest.raises(ValueError, match="time"):
        extend_branch(tree, tree.leaves()[0],
                      ProjectiveDecomposition(0.5, [P, np.eye(2) - P]))


def test_extend_branch_shares_untouched_subtrees():
    psi = np.array([1.0, 0.0], dtype=complex)
    P = np.diag([1.0, 0.0]).astype(complex)
    dec1 = ProjectiveDecomposition(1.0, [P, np.eye(2) - P])
    dec2 = ProjectiveDecomposition(2.0, [P, np.eye(2) - P])
    tree = extend_all(HistoryTree(initial_state=psi, evolution=None), dec1)
    new = extend_branch(tree, (0,), dec2)
    assert new.root.children[1] is tree.root.children[1]
    assert new.root.children[0] is not tree.root.children[0]
    assert len(new.leaves()) == 3


def test_mixed_initial_state_purification():
    # the decoherence matrix of a mixed state equals the probability mix of
    # the pure-state matrices of its eigenvectors
    dim = 3
    rng = RandomStream(13, "mix")
    H = sample_gue(dim, 1.0, rng.stream("H"))
    flow = HamiltonianFlow(H)
    vals = np.array([0.5, 0.3, 0.2])
    _, V = hermitian_eig(sample_gue(dim, 1.0, rng.stream("basis")))
    rho = (V * vals[None, :]) @ V.conj().T
    dec = _random_decomposition(dim, 1.0, rng.stream("dec"))

    mixed = extend_all(HistoryTree(initial_density=rho, evolution=flow.unitary),
                       dec)
    D_mixed = decoherence_matrix(mixed).entries

    D_sum = np.zeros((dim, dim), dtype=complex)
    for p, i in zip(vals, range(dim)):
        pure = extend_all(HistoryTree(initial_state=V[:, i],
                                      evolution=flow.unitary), dec)
        D_sum += p * decoherence_matrix(pure).entries
    assert np.max(np.abs(D_mixed - D_sum)) < 1e-10
