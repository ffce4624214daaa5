"""Random bipartite models and forward searches for consistent extensions.

A run draws a GUE Hamiltonian and a random initial product-free state on
C^{d1} (x) C^{d2}, then marches forward in time looking for moments where
the Schmidt projections of the evolved state extend the current history
tree consistently (within epsilon) and non-trivially (within delta).
Everything is deterministic given the master seed.
"""

from dataclasses import dataclass, field

import numpy as np

from .consistency import consistency_report
from .histories import HistoryTree, decoherence_matrix
from .linalg import HamiltonianFlow, RandomStream, sample_gue, sample_unit_vector
from .selection import BipartiteModel, SelectionEvent, _admissible
from . import consistency as consistency_mod


@dataclass
class RunConfig:
    d1: int
    d2: int
    sigma: float
    seed: int
    epsilon: float
    delta: float
    t_max: float
    max_histories: int = 64
    max_steps: int = 20000
    delta_mode: str = "relative"
    refine_tol: float = 1e-8

    def __post_init__(self):
        if self.d1 < 2 or self.d2 < self.d1:
            raise ValueError("need 2 <= d1 <= d2")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")


@dataclass
class RunRecord:
    config: RunConfig
    events: list
    termination: str          # 'max_histories' | 'max_steps' | 't_max'
    steps: int
    tree: HistoryTree = None

    @property
    def times(self):
        return [e.time for e in self.events]


def build_run(config):
    """Model for a run: H from the 'hamiltonian' substream, initial state
    from the 'state' substream of the master seed."""
    stream = RandomStream(config.seed)
    dim = config.d1 * config.d2
    if config.sigma > 0:
        H = sample_gue(dim, config.sigma, stream.stream("hamiltonian"))
    else:
        stream.stream("hamiltonian")   # keep the stream layout fixed
        H = np.zeros((dim, dim), dtype=complex)
    psi = sample_unit_vector(dim, "complex", stream.stream("state"))
    flow = HamiltonianFlow(H)
    return BipartiteModel(config.d1, config.d2, psi, flow.unitary), H


def run_forward_search(config, model=None):
    """March forward from t=0 with step t_max/1000; on an inadmissible to
    admissible flip, bisect the bracketing interval to refine_tol and
    record the event.  Stops at t_max, at max_steps admissibility
    evaluations, or when the tree reaches max_histories leaves."""
    if model is None:
        model, _ = build_run(config)
    tree = HistoryTree(initial_state=model.psi0, evolution=model.unitary)
    events = []
    dt = config.t_max / 1000.0
    t = 0.0
    steps = 0
    termination = "t_max"

    def admissible(s):
        nonlocal steps
        steps += 1
        return _admissible(model, tree, s, config.epsilon, config.delta,
                           config.delta_mode)

    prev_t, prev_ok = None, None
    while t <= config.t_max + 1e-12:
        if steps >= config.max_steps:
            termination = "max_steps"
            break
        ok, new_tree, report, probs = admissible(t)
        if ok and (prev_ok is False):
            lo, hi = prev_t, t
            while hi - lo > config.refine_tol and steps < config.max_steps:
                mid = 0.5 * (lo + hi)
                if admissible(mid)[0]:
                    hi = mid
                else:
                    lo = mid
            ok, new_tree, report, probs = admissible(hi)
            t = hi
        if ok:
            dec = new_tree.node_at(tree.leaves()[0]).decomposition
            events.append(SelectionEvent(t, dec, probs, report))
            tree = new_tree
            prev_t, prev_ok = t, False    # extension resets the bracket
            if len(tree.leaves()) >= config.max_histories:
                termination = "max_histories"
                break
        else:
            prev_t, prev_ok = t, ok
        t += dt
    return RunRecord(config, events, termination, steps, tree)


@dataclass
class RunAnalysis:
    n_events: int
    n_histories: int
    report: object            # recomputed consistency report of the final set
    entropy: float
    event_gaps: np.ndarray
    mpv: float
    mpv_exact: bool
    integrity: bool           # recomputed reports match the recorded ones


def analyse_run(record, epsilon=None):
    """Recompute the final set's consistency from scratch and summarize.

    integrity is False if any recorded event report disagrees with the
    recomputed decoherence matrix of the final tree."""
    tree = record.tree
    D = decoherence_matrix(tree)
    eps = epsilon if epsilon is not None else record.config.epsilon
    report = consistency_report(D, eps)
    probs = np.clip(D.diag, 0.0, None)
    total = probs.sum()
    entropy = 0.0
    if total > 0:
        q = probs[probs > 0] / total
        entropy = float(-(q * np.log(q)).sum())
    times = np.asarray(record.times, dtype=float)
    gaps = np.diff(times) if times.size > 1 else np.zeros(0)
    if D.n <= consistency_mod.MPV_EXHAUSTIVE_CAP:
        mpv, _ = consistency_mod.mpv_exact(D)
        exact = True
    else:
        mpv = consistency_mod.mpv_greedy(D)
        exact = False
    integrity = True
    if record.events:
        last = record.events[-1]
        if abs(last.report.max_medium_violation
               - report.max_medium_violation) > 1e-8:
            integrity = False
        if np.max(np.abs(np.sort(last.probabilities)
                         - np.sort(probs))) > 1e-8:
            integrity = False
    return RunAnalysis(len(record.events), D.n, report, entropy, gaps,
                       float(mpv), exact, integrity)


def perturbation_sweep(config, gammas, direction_seed=0):
    """Event times of the same run under initial-state perturbations
    psi -> (psi + gamma xi)/norm for each gamma, with a fixed random
    direction xi; returns a list of (gamma, times, termination)."""
    model, H = build_run(config)
    xi = sample_unit_vector(config.d1 * config.d2, "complex",
                            RandomStream(config.seed).stream(
                                f"perturbation{direction_seed}"))
    out = []
    for gamma in gammas:
        psi = model.psi0 + gamma * xi
        psi = psi / np.linalg.norm(psi)
        pert = BipartiteModel(config.d1, config.d2, psi, model.unitary)
        rec = run_forward_search(config, model=pert)
        out.append((float(gamma), rec.times, rec.termination))
    return out
