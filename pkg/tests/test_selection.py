import itertools
import math

import numpy as np
import pytest

from qhistories import selection, spin
from qhistories.histories import decoherence_matrix
from qhistories.linalg import RandomStream, sample_unit_vector


def _config(seed, n):
    rng = RandomStream(seed, "sel-test")
    vecs = [sample_unit_vector(3, "real", rng.stream(f"a{i}"))
            for i in range(n + 1)]
    return spin.SpinModelConfig(v=vecs[0], axes=np.array(vecs[1:]))


def _recoherence():
    u = np.array([0.0, 0.0, 1.0])
    return math.sqrt(0.7), math.sqrt(0.3), u


def test_schmidt_candidate_resolves_identity():
    a1, a2, u = _recoherence()
    model = selection.recoherence_model(a1, a2, u)
    dec = selection.schmidt_candidate(model, 0.8)
    total = sum(dec.projectors)
    assert np.max(np.abs(total - np.eye(4))) < 1e-10


def test_earliest_time_recoherence_events_before_revival():
    a1, a2, u = _recoherence()
    model = selection.recoherence_model(a1, a2, u)
    sel = selection.earliest_time_select(model, 1e-6, 0.05, 3 * math.pi / 2)
    assert sel.times                       # something is selected
    assert all(t <= math.pi + 1e-6 for t in sel.times)
    # the first event happens once the smaller Schmidt weight clears delta:
    # weight (1 - N)/2 with N^2 = 1 - 4 a1^2 a2^2 sin^2(theta)
    t0 = sel.times[0]
    N = math.sqrt(1 - 4 * a1 ** 2 * a2 ** 2 * math.sin(t0) ** 2)
    assert (1 - N) / 2 == pytest.approx(0.05, abs=1e-3)


def test_earliest_time_no_event_when_delta_unreachable():
    a1, a2, u = _recoherence()
    model = selection.recoherence_model(a1, a2, u)
    # the smaller Schmidt weight never exceeds a2^2 = 0.3
    sel = selection.earliest_time_select(model, 1e-6, 0.45, 3 * math.pi / 2)
    assert sel.times == []


def test_quasi_dynamical_waits_for_interaction_end():
    cfg = _config(4, 2)
    model = selection.spin_model(cfg)
    quasi = selection.quasi_dynamical_select(model, 1e-6, 0.01, 2.0, grid=100)
    earliest = selection.earliest_time_select(model, 1e-6, 0.01, 2.0, grid=100)
    assert quasi.times
    assert earliest.times
    # the persistence gate postpones the event to the end of the interaction
    assert earliest.times[0] < 0.9
    assert abs(quasi.times[0] - 1.0) < 2e-3


def test_retrodictive_select_spin_chain():
    n = 3
    cfg = _config(5, n)
    model = selection.spin_model(cfg)
    sel, comps = selection.retrodictive_select(model, range(1, n + 1))
    assert sel.times == [1.0, 2.0, 3.0]
    probs = sorted(np.linalg.norm(sel.tree.path_state(l)) ** 2
                   for l in sel.tree.leaves())
    closed = []
    for signs in itertools.product((1, -1), repeat=n):
        chain = (1,) + signs
        p = 2.0 ** -n
        for i in range(n):
            p *= 1 + chain[i] * chain[i + 1] * np.dot(cfg.axis(i),
                                                      cfg.axis(i + 1))
        closed.append(p)
    assert np.allclose(probs, sorted(closed), atol=1e-12)
    # companions: one per history, probability zero, unit norm, orthogonal
    # system factor
    assert len(comps) == 2 ** n
    for leaf, state, p in comps:
        assert p == 0.0
        assert abs(np.linalg.norm(state) - 1.0) < 1e-10


def test_retrodictive_select_rejects_inconsistent_times():
    n = 2
    cfg = _config(6, n)
    model = selection.spin_model(cfg)
    # interior times away from interaction ends cannot all be retained
    sel, _ = selection.retrodictive_select(model, [0.5, 1.5, 2.0],
                                           include_companions=False)
    assert 2.0 in sel.times
    assert 0.5 not in sel.times or 1.5 not in sel.times
    D = decoherence_matrix(sel.tree)
    assert np.max(np.abs(D.entries - np.diag(np.diag(D.entries)))) < 1e-8


def test_information_measures():
    p = [0.5, 0.5]
    assert selection.information(p) == pytest.approx(math.log(2))
    # IL measure rewards dimension: -sum p log(p/dim^2)
    val = selection.information(p, "il", dims=[2, 2])
    assert val == pytest.approx(math.log(2) + 2 * math.log(2))
    # revised measure with per-step normalization
    val = selection.information(p, "il_revised", dims=[2, 2], total_dim=4,
                                n_times=1)
    assert val == pytest.approx(math.log(2) + 2 * math.log(0.5))
    with pytest.raises(ValueError):
        selection.information([0.7, 0.7])
    with pytest.raises(ValueError):
        selection.information(p, "il")


def test_il_revised_prefers_more_times():
    # m equiprobable half-dimension projections in total dimension d: the
    # unrevised measure grows with m (so minimizing it stops at the trivial
    # set), while the normalized one shrinks as -m log 2 (so minimizing it
    # refines as far as possible)
    d = 16.0

    def measures(m):
        p = [2.0 ** -m] * 2 ** m
        dims = [(d / 2) ** m] * 2 ** m
        il = selection.information(p, "il", dims=dims)
        rev = selection.information(p, "il_revised", dims=dims,
                                    total_dim=d, n_times=m)
        return il, rev

    ils, revs = zip(*(measures(m) for m in range(4)))
    assert all(b > a for a, b in zip(ils, ils[1:]))
    assert all(b < a for a, b in zip(revs, revs[1:]))
    for m in range(4):
        assert revs[m] == pytest.approx(-m * math.log(2), abs=1e-12)


def test_extension_information_delta():
    parent = [0.6, 0.4]
    q = [[0.5, 0.5], [1.0, 0.0]]
    want = 0.6 * math.log(2)
    assert selection.extension_information_delta(parent, q) \
        == pytest.approx(want)
    # additivity: refining a set adds exactly this much entropy
    joint = [0.3, 0.3, 0.4, 0.0]
    base = selection.information([0.6, 0.4])
    assert selection.information(joint) \
        == pytest.approx(base + want)


def test_max_information_select():
    cfg = _config(9, 3)
    res = selection.max_information_select(cfg)
    assert set(res["per_k"]) == {1, 2, 3}
    label, k, E, times = res["best"]
    per_E = {kk: v[0] for kk, v in res["per_k"].items()}
    assert E == pytest.approx(max(max(per_E.values()), res["chain"]))
    # the last-interaction set dominates the full chain
    assert per_E[3] >= res["chain"] - 1e-12
    if label == "S_k":
        assert times[-1] == float(k)


def test_max_information_exhaustive_small():
    # n = 2: compare against a brute scan over classification-allowed sets
    cfg = _config(12, 2)
    res = selection.max_information_select(cfg)
    best_closed = res["best"][2]
    best_scan = 0.0
    for form, times in spin.enumerate_consistent_sets(
            cfg, interior_points=np.linspace(0.05, 0.95, 19)):
        if not times:
            continue
        D = decoherence_matrix(
            spin.build_tree(cfg, spin.measurement_events(cfg, times)))
        p = np.clip(D.diag, 0.0, None)
        nz = p[p > 1e-300]
        best_scan = max(best_scan, float(-(nz * np.log(nz)).sum()))
    assert best_closed >= best_scan - 1e-6
    # the scan grid is coarse; the closed form can only beat it slightly
    assert best_closed == pytest.approx(best_scan, abs=5e-3)
