"""Set-selection algorithms over bipartite models.

A model exposes an initial state, a unitary evolution and a
system/environment split; candidate projective decompositions are the
Schmidt (reduced-density eigenbasis) projections of the evolved state.
Selection strategies: earliest admissible time, quasi-dynamical
(persistence under immediate re-projection), retrodictive (backward
acceptance from the final time), and maximal information for the
spin-measurement chain.
"""

from dataclasses import dataclass, field

import numpy as np

from .consistency import consistency_report, is_exactly_consistent, nontrivial
from .histories import (HistoryTree, ProjectiveDecomposition,
                        decoherence_matrix, extend_all)
from .linalg import schmidt_decompose
from . import spin as spin_mod


@dataclass
class BipartiteModel:
    """System (x) environment model: |psi0> on C^{d1} (x) C^{d2} evolved by
    unitary(t)."""

    d1: int
    d2: int
    psi0: np.ndarray
    unitary: object

    def __post_init__(self):
        self.psi0 = np.asarray(self.psi0, dtype=complex).reshape(-1)
        if self.psi0.size != self.d1 * self.d2:
            raise ValueError("state dimension does not match d1*d2")

    def state(self, t):
        return np.asarray(self.unitary(t), dtype=complex) @ self.psi0


def spin_model(cfg):
    return BipartiteModel(2, 2 ** cfg.n, spin_mod.initial_state(cfg),
                          lambda t, _c=cfg: spin_mod.full_unitary(_c, t))


def recoherence_model(a1, a2, u):
    return BipartiteModel(2, 2, spin_mod.recoherence_initial_state(a1, a2, u),
                          lambda t, _u=u: spin_mod.recoherence_unitary(_u, t))


@dataclass
class SelectionEvent:
    time: float
    decomposition: ProjectiveDecomposition
    probabilities: np.ndarray
    report: object


@dataclass
class SelectedSet:
    tree: HistoryTree
    events: list = field(default_factory=list)

    @property
    def times(self):
        return [e.time for e in self.events]


def schmidt_candidate(model, t, weight_tol=1e-12):
    """Schmidt projective decomposition {P_i (x) 1} of the state at time t,
    plus the complement of the retained Schmidt span when rank-deficient."""
    sd = schmidt_decompose(model.state(t), model.d1, model.d2)
    projs = []
    total = np.zeros((model.d1, model.d1), dtype=complex)
    for i, w in enumerate(sd.weights):
        if w > weight_tol:
            P = np.outer(sd.system_basis[:, i], sd.system_basis[:, i].conj())
            projs.append(P)
            total += P
    if np.max(np.abs(total - np.eye(model.d1))) > 1e-9:
        projs.append(np.eye(model.d1) - total)
    lifted = [np.kron(P, np.eye(model.d2, dtype=complex)) for P in projs]
    return ProjectiveDecomposition(t, lifted, check=False)


def _admissible(model, tree, t, epsilon, delta, delta_mode):
    """Try the Schmidt decomposition at t on every branch; admissible when
    the extended set stays medium-consistent at epsilon and every branch
    splits non-trivially at delta.  Returns (ok, extended tree, report,
    probabilities)."""
    try:
        dec = schmidt_candidate(model, t)
    except np.linalg.LinAlgError:
        return False, None, None, None
    if len(dec) < 2:
        return False, None, None, None
    new_tree = extend_all(tree, dec)
    D = decoherence_matrix(new_tree)
    report = consistency_report(D, epsilon)
    if not report.medium_pass:
        return False, new_tree, report, D.diag
    k = len(dec)
    parents = [float(np.linalg.norm(tree.path_state(p)) ** 2)
               for p in tree.leaves()]
    probs = D.diag
    for b, parent in enumerate(parents):
        children = probs[b * k:(b + 1) * k]
        if parent < 1e-14:
            continue
        if not nontrivial(parent, children, delta, mode=delta_mode):
            return False, new_tree, report, probs
    return True, new_tree, report, probs


def earliest_time_select(model, epsilon, delta, t_max, *, grid=400,
                         refine_tol=1e-6, max_events=16,
                         delta_mode="relative"):
    """Repeatedly project at the earliest admissible time.

    Scans [0, t_max] on a uniform grid; each inadmissible-to-admissible
    flip is refined by bisection to refine_tol and recorded as an event,
    after which the scan continues on the extended tree."""
    tree = HistoryTree(initial_state=model.psi0, evolution=model.unitary)
    events = []
    ts = np.linspace(0.0, t_max, grid + 1)
    i = 0
    while i <= grid and len(events) < max_events:
        t = float(ts[i])
        if t <= (events[-1].time if events else -1.0):
            i += 1
            continue
        ok, _, _, _ = _admissible(model, tree, t, epsilon, delta, delta_mode)
        if not ok:
            i += 1
            continue
        lo = float(ts[i - 1]) if i > 0 else 0.0
        lo = max(lo, events[-1].time if events else lo)
        hi = t
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            ok_mid, _, _, _ = _admissible(model, tree, mid, epsilon, delta,
                                          delta_mode)
            if ok_mid:
                hi = mid
            else:
                lo = mid
        ok, new_tree, report, probs = _admissible(model, tree, hi, epsilon,
                                                  delta, delta_mode)
        if not ok:    # refinement landed on a grid artefact; move on
            i += 1
            continue
        dec = new_tree.node_at(tree.leaves()[0]).decomposition
        events.append(SelectionEvent(hi, dec, probs, report))
        tree = new_tree
        while i <= grid and ts[i] <= hi:
            i += 1
    return SelectedSet(tree, events)


def quasi_dynamical_select(model, epsilon, delta, t_max, *, grid=400,
                           refine_tol=1e-6, max_events=16,
                           delta_mode="relative", probe_dt=1e-3,
                           persistence_tol=1e-9):
    """Earliest-time selection with a persistence gate: an admissible time
    is accepted only if re-applying the same decomposition at t + probe_dt
    leaves the set exactly consistent, so projections must hold still
    under the dynamics at the moment they are made."""
    tree = HistoryTree(initial_state=model.psi0, evolution=model.unitary)
    events = []
    ts = np.linspace(0.0, t_max, grid + 1)

    def accept(t, cur_tree):
        ok, new_tree, report, probs = _admissible(model, cur_tree, t, epsilon,
                                                  delta, delta_mode)
        if not ok:
            return False, None, None, None
        dec = new_tree.node_at(cur_tree.leaves()[0]).decomposition
        repeat = ProjectiveDecomposition(t + probe_dt, dec.projectors,
                                         check=False)
        probe_tree = extend_all(new_tree, repeat)
        D = decoherence_matrix(probe_tree)
        if not is_exactly_consistent(D, "medium", tol=persistence_tol):
            return False, None, None, None
        return True, new_tree, report, probs

    i = 0
    while i <= grid and len(events) < max_events:
        t = float(ts[i])
        if t <= (events[-1].time if events else -1.0):
            i += 1
            continue
        ok, _, _, _ = accept(t, tree)
        if not ok:
            i += 1
            continue
        lo = float(ts[i - 1]) if i > 0 else 0.0
        lo = max(lo, events[-1].time if events else lo)
        hi = t
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            if accept(mid, tree)[0]:
                hi = mid
            else:
                lo = mid
        ok, new_tree, report, probs = accept(hi, tree)
        if not ok:
            i += 1
            continue
        dec = new_tree.node_at(tree.leaves()[0]).decomposition
        events.append(SelectionEvent(hi, dec, probs, report))
        tree = new_tree
        while i <= grid and ts[i] <= hi:
            i += 1
    return SelectedSet(tree, events)


def retrodictive_select(model, candidate_times, epsilon=1e-10, *,
                        include_companions=True, companion_tol=1e-9):
    """Build a set by accepting projection times from the final time
    backwards: a time joins the set when the Schmidt decompositions at all
    accepted times remain medium-consistent at epsilon.

    Returns (selected, companions): companions are the zero-probability
    limit histories obtained by repeating the final projection, one per
    leaf, each a normalized state with the system component flipped on the
    leaf's (product) history state.  Requires d1 = 2 for companions."""
    times = sorted(set(float(t) for t in candidate_times))
    accepted = []
    for t in reversed(times):
        trial = sorted(accepted + [t])
        tree = HistoryTree(initial_state=model.psi0, evolution=model.unitary)
        okay = True
        try:
            for s in trial:
                tree = extend_all(tree, schmidt_candidate(model, s))
        except np.linalg.LinAlgError:
            okay = False
        if okay:
            rep = consistency_report(decoherence_matrix(tree), epsilon)
            okay = rep.medium_pass
        if okay:
            accepted = trial
    tree = HistoryTree(initial_state=model.psi0, evolution=model.unitary)
    events = []
    for s in accepted:
        dec = schmidt_candidate(model, s)
        tree = extend_all(tree, dec)
        D = decoherence_matrix(tree)
        events.append(SelectionEvent(s, dec, D.diag,
                                     consistency_report(D, epsilon)))
    selected = SelectedSet(tree, events)
    if not include_companions:
        return selected, []
    if model.d1 != 2:
        raise ValueError("companion construction implemented for d1 = 2")
    companions = []
    U_final = np.asarray(model.unitary(accepted[-1]), dtype=complex) \
        if accepted else np.eye(model.d1 * model.d2)
    for leaf in tree.leaves():
        u = tree.path_state(leaf)
        nrm = np.linalg.norm(u)
        if nrm < companion_tol:
            continue
        M = (U_final @ u).reshape(model.d1, model.d2)
        U, svals, Vh = np.linalg.svd(M, full_matrices=False)
        if svals.size > 1 and svals[1] > companion_tol * svals[0]:
            raise ValueError("history state is not a product at the final time")
        sys_vec, env_vec = U[:, 0], Vh[0, :]
        flipped = np.array([-np.conj(sys_vec[1]), np.conj(sys_vec[0])])
        companions.append((leaf, np.kron(flipped, env_vec), 0.0))
    return selected, companions


# -- information measures ------------------------------------------------

def information(probs, measure="shannon", *, dims=None, total_dim=None,
                n_times=None):
    """Information content of a set from its history probabilities.

    'shannon': -sum p log p (0 log 0 = 0).
    'il': -sum p log(p / dim(a)^2) with dim(a) the product of the ranks of
    the projections along history a (pass `dims`).
    'il_revised': same with dimensions normalized per time step,
    dim^(a) = dim(a) / total_dim^{n_times}; for equal-rank decompositions
    this adds the natural -2 n log(rank/total_dim) offset."""
    p = np.asarray(probs, dtype=float)
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-8:
        raise ValueError("probabilities must be a distribution")
    p = np.clip(p, 0.0, None)
    nz = p > 0
    shannon = float(-(p[nz] * np.log(p[nz])).sum())
    if measure == "shannon":
        return shannon
    if dims is None:
        raise ValueError("dims required for the IL measures")
    dims = np.asarray(dims, dtype=float)
    if measure == "il":
        return float(shannon + 2.0 * (p[nz] * np.log(dims[nz])).sum())
    if measure == "il_revised":
        if total_dim is None or n_times is None:
            raise ValueError("total_dim and n_times required for il_revised")
        dimhat = dims / float(total_dim) ** n_times
        return float(shannon + 2.0 * (p[nz] * np.log(dimhat[nz])).sum())
    raise ValueError(f"unknown measure {measure!r}")


def extension_information_delta(parent_probs, conditional_probs):
    """Information gained by refining each history a into branches with
    conditional distribution q^(a): sum_a p_a H(q^(a))."""
    total = 0.0
    for p, q in zip(parent_probs, conditional_probs):
        q = np.asarray(q, dtype=float)
        nz = q > 0
        total += p * float(-(q[nz] * np.log(q[nz])).sum())
    return total


def max_information_select(cfg):
    """Most informative classification-allowed set of the spin chain.

    Candidates: the interior-time sets S_k (projections at 1..k-1, an
    optimized interior time, and k) and the full between-interaction set
    {1..n}.  Returns a dict with per-k values, the chain value, and the
    best candidate; S_n always dominates the chain."""
    per_k = {k: spin_mod.information_of_Sk(cfg, k)
             for k in range(1, cfg.n + 1)}
    chain = sum(spin_mod.binary_entropy_of_dot(
        float(np.dot(cfg.axis(j - 1), cfg.axis(j))))
        for j in range(1, cfg.n + 1))
    best_k = max(per_k, key=lambda k: per_k[k][0])
    E_k, t_star = per_k[best_k]
    if E_k >= chain:
        best = ("S_k", best_k, E_k,
                tuple(range(1, best_k)) + (t_star, float(best_k)))
    else:
        best = ("chain", None, chain, tuple(float(j) for j in range(1, cfg.n + 1)))
    return {"per_k": per_k, "chain": chain, "best": best}
