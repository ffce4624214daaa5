"""Branch-dependent history trees, path-projected states and decoherence
matrices.

A history tree applies timed projective decompositions along its branches;
each leaf is a history alpha with path-projected state u_alpha = C_alpha psi
and probability |u_alpha|^2.  Projectors are stored in the Schroedinger
picture and conjugated into the Heisenberg picture once per node, cached.
Trees are immutable; extension returns a new tree sharing untouched
subtrees.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig

PROJECTOR_TOL = 1e-10


class ProjectiveDecomposition:
    """A complete set of orthogonal projectors applied at a fixed time."""

    def __init__(self, time, projectors, check=True):
        self.time = float(time)
        self.projectors = [np.asarray(P, dtype=complex) for P in projectors]
        if check:
            self._validate()

    def _validate(self):
        dim = self.projectors[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for i, P in enumerate(self.projectors):
            if P.shape != (dim, dim):
                raise ValueError("projector shapes differ")
            if np.max(np.abs(P - P.conj().T)) > PROJECTOR_TOL:
                raise ValueError(f"projector {i} is not Hermitian")
            if np.max(np.abs(P @ P - P)) > PROJECTOR_TOL:
                raise ValueError(f"projector {i} is not idempotent")
            total += P
        for i in range(len(self.projectors)):
            for j in range(i + 1, len(self.projectors)):
                if np.max(np.abs(self.projectors[i] @ self.projectors[j])) > PROJECTOR_TOL:
                    raise ValueError(f"projectors {i},{j} are not orthogonal")
        if np.max(np.abs(total - np.eye(dim))) > PROJECTOR_TOL:
            raise ValueError("projectors do not sum to the identity")

    def __len__(self):
        return len(self.projectors)


class _Node:
    __slots__ = ("decomposition", "children", "_heisenberg")

    def __init__(self, decomposition=None, children=None):
        self.decomposition = decomposition
        self.children = children or []
        self._heisenberg = None     # conjugated projectors, filled lazily

    @property
    def is_leaf(self):
        return self.decomposition is None

    def heisenberg(self, evolution):
        if self._heisenberg is None:
            if evolution is None:
                self._heisenberg = list(self.decomposition.projectors)
            else:
                U = np.asarray(evolution(self.decomposition.time), dtype=complex)
                Ud = U.conj().T
                self._heisenberg = [Ud @ P @ U
                                    for P in self.decomposition.projectors]
        return self._heisenberg


class HistoryTree:
    """Tree of timed projective decompositions over an initial state.

    evolution, if given, maps a time to the unitary U(t); projections at
    time t act as U(t)^dag P U(t) on the initial state.  A mixed initial
    state (density matrix) is purified into a doubled space; rank is read
    from its eigenvalues.
    """

    def __init__(self, initial_state=None, evolution=None,
                 initial_density=None, root=None):
        if (initial_state is None) == (initial_density is None):
            raise ValueError("give exactly one of initial_state, initial_density")
        if initial_density is not None:
            rho = np.asarray(initial_density, dtype=complex)
            vals, vecs = hermitian_eig(rho)
            keep = vals > 1e-12
            vals, vecs = vals[keep], vecs[:, keep]
            r = int(vals.size)
            d = rho.shape[0]
            psi = (vecs * np.sqrt(vals)[None, :]).reshape(-1)  # sum_i sqrt(p_i) v_i (x) e_i
            self.initial_state = psi
            self._purified_rank = r
            base_evolution = evolution
            if base_evolution is None:
                self.evolution = None
            else:
                self.evolution = lambda t: np.kron(
                    np.asarray(base_evolution(t), dtype=complex), np.eye(r))
            self._base_dim = d
        else:
            psi = np.asarray(initial_state, dtype=complex).reshape(-1)
            self.initial_state = psi
            self._purified_rank = 1
            self.evolution = evolution
            self._base_dim = psi.size
        self.root = root if root is not None else _Node()

    @property
    def dim(self):
        return self.initial_state.size

    def _lift(self, P):
        P = np.asarray(P, dtype=complex)
        if self._purified_rank > 1 and P.shape[0] == self._base_dim:
            return np.kron(P, np.eye(self._purified_rank))
        return P

    def leaves(self):
        """Leaf paths in depth-first order, children in projector order."""
        out = []

        def walk(node, path):
            if node.is_leaf:
                out.append(path)
                return
            for i, child in enumerate(node.children):
                walk(child, path + (i,))

        walk(self.root, ())
        return out

    def node_at(self, path):
        node = self.root
        for i in path:
            node = node.children[i]
        return node

    def last_time(self, path):
        """Latest projection time along the path to a leaf, or None."""
        t = None
        node = self.root
        for i in path:
            t = node.decomposition.time
            node = node.children[i]
        return t

    def path_state(self, path):
        u = self.initial_state.copy()
        node = self.root
        for i in path:
            u = node.heisenberg(self.evolution)[i] @ u
            node = node.children[i]
        return u


def path_state(tree, leaf):
    """u_alpha = C_alpha psi, the (sub-normalized) path-projected state."""
    return tree.path_state(leaf)


@dataclass
class DecoherenceMatrix:
    """Hermitian matrix D_ab = u_b^dag u_a over the histories of a set."""

    entries: np.ndarray
    labels: list

    @property
    def diag(self):
        return np.real(np.diag(self.entries))

    @property
    def n(self):
        return self.entries.shape[0]

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)


def decoherence_matrix(tree):
    """Decoherence matrix of a tree's leaves, D_ab = u_b^dag u_a."""
    leaves = tree.leaves()
    states = np.column_stack([tree.path_state(p) for p in leaves])
    D = (states.conj().T @ states).T
    return DecoherenceMatrix(D, leaves)


def coarse_grain(D, partition):
    """Merge histories: D*_{IJ} = sum_{a in I, b in J} D_ab."""
    n = D.n
    seen = sorted(i for block in partition for i in block)
    if seen != list(range(n)):
        raise ValueError("partition must cover every history exactly once")
    m = len(partition)
    out = np.zeros((m, m), dtype=complex)
    for I, bi in enumerate(partition):
        for J, bj in enumerate(partition):
            out[I, J] = D.entries[np.ix_(list(bi), list(bj))].sum()
    labels = [tuple(sorted(block)) for block in partition]
    return DecoherenceMatrix(out, labels)


def real_embed(u):
    """Re(u) (+) Im(u): doubles the dimension, preserves the norm, and turns
    Re(u^dag w) into an ordinary real dot product exactly."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    return np.concatenate([u.real, u.imag])


def extend_branch(tree, leaf, dec):
    """New tree with the given leaf split by a projective decomposition.

    Unmodified subtrees are shared with the original."""
    t_last = tree.last_time(leaf)
    if t_last is not None and dec.time <= t_last:
        raise ValueError(
            f"decomposition time {dec.time} does not exceed branch time {t_last}")
    lifted = ProjectiveDecomposition(
        dec.time, [tree._lift(P) for P in dec.projectors], check=False)

    def rebuild(node, path):
        if not path:
            if not node.is_leaf:
                raise ValueError("path does not end at a leaf")
            return _Node(lifted, [_Node() for _ in lifted.projectors])
        i = path[0]
        children = list(node.children)
        children[i] = rebuild(children[i], path[1:])
        clone = _Node(node.decomposition, children)
        clone._heisenberg = node._heisenberg
        return clone

    new_root = rebuild(tree.root, tuple(leaf))
    new_tree = HistoryTree.__new__(HistoryTree)
    new_tree.initial_state = tree.initial_state
    new_tree.evolution = tree.evolution
    new_tree._purified_rank = tree._purified_rank
    new_tree._base_dim = tree._base_dim
    new_tree.root = new_root
    return new_tree


def extend_all(tree, dec):
    """Extend every leaf by the same decomposition (branch-independent)."""
    out = tree
    for leaf in tree.leaves():
        out = extend_branch(out, leaf, dec)
    return out
