import itertools
import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from qhistories import spin
from qhistories.consistency import consistency_report
from qhistories.histories import decoherence_matrix
from qhistories.linalg import RandomStream, sample_unit_vector


def _config(seed, n):
    rng = RandomStream(seed, "spin-test")
    vecs = [sample_unit_vector(3, "real", rng.stream(f"a{i}"))
            for i in range(n + 1)]
    return spin.SpinModelConfig(v=vecs[0], axes=np.array(vecs[1:]))


def test_config_validation_and_genericity():
    with pytest.raises(ValueError, match="unit"):
        spin.SpinModelConfig(v=[0, 0, 2.0], axes=[[1.0, 0, 0]])
    cfg = spin.SpinModelConfig(v=[0, 0, 1.0], axes=[[1.0, 0, 0]])
    assert not cfg.generic           # orthogonal adjacent axes
    cfg2 = spin.SpinModelConfig(v=[0, 0, 1.0],
                                axes=[np.array([1.0, 0, 1.0]) / math.sqrt(2)])
    assert cfg2.generic


def test_theta_schedule():
    assert spin.theta_schedule(2, 0.5) == 0.0
    assert spin.theta_schedule(2, 1.5) == pytest.approx(math.pi / 4)
    assert spin.theta_schedule(2, 2.0) == pytest.approx(math.pi / 2)
    assert spin.theta_schedule(2, 3.7) == pytest.approx(math.pi / 2)


def test_full_unitary_is_unitary():
    cfg = _config(0, 3)
    for t in (0.0, 0.5, 1.3, 2.7, 3.0):
        U = spin.full_unitary(cfg, t)
        assert np.max(np.abs(U.conj().T @ U - np.eye(16))) < 1e-12


def test_reduced_density_matches_partial_trace():
    cfg = _config(1, 3)
    for t in (0.3, 1.0, 1.6, 2.4, 3.0):
        rho, w, N = spin.reduced_density(cfg, t)
        rho_full = spin.reduced_density_full(cfg, t)
        assert np.max(np.abs(rho - rho_full)) < 1e-12
        vals = np.linalg.eigvalsh(rho)
        assert vals[1] - vals[0] == pytest.approx(N, abs=1e-12)


def test_norm_closed_form():
    cfg = _config(2, 2)
    c = float(np.dot(cfg.axis(0), cfg.axis(1)))
    for om in (0.0, 0.4, 1.0, math.pi / 2):
        want = math.sqrt(c * c + math.cos(om) ** 2 * (1 - c * c))
        assert spin.N_k(cfg, 1, om) == pytest.approx(want)
    # at the end of interaction k the Bloch norm contracts by |u_{k-1}.u_k|
    a = spin.bloch_vector(cfg, 1.0)
    assert np.linalg.norm(a) == pytest.approx(abs(c), abs=1e-12)


def test_lam_signed_products():
    cfg = _config(3, 3)
    want = 1.0
    for k in range(3):
        want *= float(np.dot(cfg.axis(k), cfg.axis(k + 1)))
    assert spin.lam(cfg, 0, 3) == pytest.approx(want)
    assert spin.lam(cfg, 1, 1) == 1.0
    assert spin.lam_abs(cfg, 0, 3) == pytest.approx(abs(want))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_history_probabilities_integer_times(seed):
    cfg = _config(seed, 3)
    times = (1, 2, 3)
    D = decoherence_matrix(
        spin.build_tree(cfg, spin.measurement_events(cfg, times)))
    for label, p in zip(D.labels, D.diag):
        signs = tuple(1 if i == 0 else -1 for i in label)
        cf = spin.history_probability(cfg, spin.SpinHistorySpec(times, signs))
        assert cf == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("seed,interior", [(0, 1.3), (1, 2.6), (2, 2.2)])
def test_history_probabilities_interior_time(seed, interior):
    cfg = _config(seed, 3)
    k = math.ceil(interior)
    chain = tuple(t for t in range(1, k))   # all earlier integer times
    times = chain + (k,)
    D = decoherence_matrix(spin.build_tree(
        cfg, spin.measurement_events(cfg, chain + (interior, float(k)))))
    for label, p in zip(D.labels, D.diag):
        signs = tuple(1 if i == 0 else -1 for i in label)
        spec = spin.SpinHistorySpec(times, signs, interior_time=interior)
        assert spin.history_probability(cfg, spec) == pytest.approx(p, abs=1e-12)


def test_history_spec_validation():
    with pytest.raises(ValueError, match="increasing"):
        spin.SpinHistorySpec((2, 1), (1, 1))
    with pytest.raises(ValueError, match="sign"):
        spin.SpinHistorySpec((1, 2), (1,))
    with pytest.raises(ValueError, match="interaction"):
        spin.SpinHistorySpec((1, 3), (1, 1, 1), interior_time=1.5)
    spin.SpinHistorySpec((1, 3), (1, 1, 1), interior_time=2.5)


def test_offdiag_closed_form_moduli():
    cfg = _config(11, 4)
    cases = [(1, 0.4, 1, 1.1), (1, 0.5, 2, 0.9), (2, 0.3, 3, 1.2),
             (1, 0.8, 4, 0.5)]
    for j, om, k, ph in cases:
        s = j - 1 + 2 * om / math.pi
        t = k - 1 + 2 * ph / math.pi
        D = decoherence_matrix(
            spin.build_tree(cfg, spin.measurement_events(cfg, (s, t))))
        idx = {lab: i for i, lab in enumerate(D.labels)}
        for sign, a, b in [(1, (0, 0), (1, 0)), (-1, (0, 1), (1, 1))]:
            elem = D.entries[idx[a], idx[b]]
            cf = spin.offdiag_closed_form(cfg, j, om, k, ph, sign=sign)
            assert abs(abs(elem) - abs(cf)) < 1e-12


def test_classification_allowed_sets_consistent():
    cfg = _config(5, 3)
    n_sets = 0
    for form, times in spin.enumerate_consistent_sets(cfg):
        if not times:
            continue
        D = decoherence_matrix(
            spin.build_tree(cfg, spin.measurement_events(cfg, times)))
        rep = consistency_report(D.entries)
        assert rep.max_medium_violation < 1e-10, (form, times)
        n_sets += 1
    assert n_sets > 10


def test_disallowed_pairs_inconsistent():
    cfg = _config(5, 3)
    # interior time followed by anything but the end of its interaction
    for times in [(0.5, 0.8), (0.5, 1.5), (0.5, 2.0), (1.5, 2.5), (1.3, 3.0)]:
        D = decoherence_matrix(
            spin.build_tree(cfg, spin.measurement_events(cfg, times)))
        rep = consistency_report(D.entries)
        assert rep.max_medium_violation > 1e-6, times


def test_information_closed_form_vs_numeric_optimum():
    cfg = _config(9, 3)
    for k in (1, 2, 3):
        E, t_star = spin.information_of_Sk(cfg, k)
        res = minimize_scalar(lambda t: -spin.Sk_information_at(cfg, k, t),
                              bounds=(k - 1 + 1e-9, k - 1e-9), method="bounded")
        assert E == pytest.approx(-res.fun, abs=1e-9)
        assert t_star == pytest.approx(res.x, abs=1e-5)


def test_Sk_information_matches_tree_entropy():
    cfg = _config(9, 3)
    k = 2
    E, t_star = spin.information_of_Sk(cfg, k)
    times = tuple(range(1, k)) + (t_star, float(k))
    D = decoherence_matrix(
        spin.build_tree(cfg, spin.measurement_events(cfg, times)))
    p = np.clip(D.diag, 1e-300, None)
    assert E == pytest.approx(float(-(p * np.log(p)).sum()), abs=1e-10)


def test_sn_selection_fraction_values():
    rng = RandomStream(0, "mc-test")
    f3 = spin.sn_selection_fraction(3, 40000, rng.stream("n3"))
    f5 = spin.sn_selection_fraction(5, 40000, rng.stream("n5"))
    assert abs(f3 - 0.857) < 0.01
    assert abs(f5 - 0.842) < 0.01
    with pytest.raises(ValueError):
        spin.sn_selection_fraction(1, 10, rng)


def test_recoherence_cycle():
    u = np.array([0.0, 0.0, 1.0])
    a1, a2 = math.sqrt(0.6), -math.sqrt(0.4)
    psi0 = spin.recoherence_initial_state(a1, a2, u)
    # decohered at the plateau: reduced state diagonal with weights a1^2, a2^2
    psi_mid = spin.recoherence_evolve(a1, a2, u, math.pi / 2)
    M = psi_mid.reshape(2, 2)
    rho = M @ M.conj().T
    assert abs(rho[0, 1]) < 1e-12
    # exact return at the end of the cycle
    psi_end = spin.recoherence_evolve(a1, a2, u, 3 * math.pi / 2)
    assert np.linalg.norm(psi_end - psi0) < 1e-12
    with pytest.raises(ValueError):
        spin.recoherence_theta(5.0)


def test_delayed_choice_branches():
    v = np.array([0.0, 0.0, 1.0])
    base = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    alt = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)

    def axis_map(outcomes):
        if not outcomes:
            return base
        return base if outcomes[-1] == 1 else alt

    branches, probs = spin.delayed_choice_branches(v, axis_map, 2)
    assert len(probs) == 4
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-10)
    # branch states reassemble the evolved state
    total = sum(branches.values())
    U = spin.delayed_choice_unitary(v, axis_map, 2, 2.0)
    env0 = np.zeros(4, dtype=complex)
    env0[0] = 1.0
    psi = U @ np.kron(spin.spinor(v), env0)
    assert np.linalg.norm(total - psi) < 1e-10


def test_delayed_choice_reduces_to_fixed_axes():
    v = np.array([0.0, 0.0, 1.0])
    u1 = np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
    u2 = np.array([0.0, 1.0, 1.0]) / math.sqrt(2)
    cfg = spin.SpinModelConfig(v=v, axes=np.array([u1, u2]))
    axes = [u1, u2]

    def axis_map(outcomes):
        return axes[len(outcomes)]

    U_dc = spin.delayed_choice_unitary(v, axis_map, 2, 1.7)
    U_std = spin.full_unitary(cfg, 1.7)
    assert np.max(np.abs(U_dc - U_std)) < 1e-12
