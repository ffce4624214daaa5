"""Exactly solvable spin-measurement chain.

A spin-half system particle interacts in sequence with n environment
spins; interaction k rotates environment spin k conditionally on the
system component along axis u_k.  Everything is computable twice over:
closed forms (reduced density matrix, two-time off-diagonals, history
probabilities, information content) and brute force on the full
2^{n+1}-dimensional state vector.  Variants: a decohere/recohere cycle on
a single environment spin, and branch-dependent (delayed-choice) axes.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .histories import HistoryTree, ProjectiveDecomposition, extend_all

SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
SIGMA_Y = SIGMA[1]
I2 = np.eye(2, dtype=complex)


def proj2(y):
    """(1 + sigma.y)/2; y may be complex (extended projector)."""
    y = np.asarray(y)
    return (I2 + y[0] * SIGMA[0] + y[1] * SIGMA[1] + y[2] * SIGMA[2]) / 2.0


def spinor(u):
    """+1 eigenvector of sigma.u for a real unit 3-vector."""
    u = np.asarray(u, dtype=float)
    th = math.acos(max(-1.0, min(1.0, u[2])))
    ph = math.atan2(u[1], u[0])
    return np.array([math.cos(th / 2), math.sin(th / 2) * np.exp(1j * ph)],
                    dtype=complex)


@dataclass
class SpinModelConfig:
    """Initial system axis v (= u_0) and measurement axes u_1..u_n.

    The canonical schedule runs interaction k over (k-1, k], linearly in
    the rotation angle; reparameterization invariance of the histories
    makes the profile immaterial.  Genericity (no orthogonal or parallel
    adjacent axes) is reported, not enforced."""

    v: np.ndarray
    axes: np.ndarray
    variant: str = "standard"
    genericity_tol: float = 1e-8
    generic: bool = field(init=False)

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.axes = np.atleast_2d(np.asarray(self.axes, dtype=float))
        for name, vec in [("v", self.v)] + [
                (f"u{i+1}", u) for i, u in enumerate(self.axes)]:
            if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} is not a unit vector")
        self.generic = True
        chain = [self.v] + list(self.axes)
        for a, b in zip(chain, chain[1:]):
            if abs(np.dot(a, b)) < self.genericity_tol:
                self.generic = False
            if np.linalg.norm(np.cross(a, b)) < self.genericity_tol:
                self.generic = False

    @property
    def n(self):
        return self.axes.shape[0]

    def axis(self, k):
        """u_k with u_0 = v."""
        return self.v if k == 0 else self.axes[k - 1]


def theta_schedule(k, t):
    """Rotation angle of interaction k at time t: 0 before k-1, pi/2 after k."""
    return float(np.clip(math.pi / 2 * (t - k + 1), 0.0, math.pi / 2))


def lam(cfg, i, j):
    """Signed product of consecutive axis dots from i to j (u_0 = v)."""
    out = 1.0
    for k in range(i, j):
        out *= float(np.dot(cfg.axis(k), cfg.axis(k + 1)))
    return out


def lam_abs(cfg, i, j):
    return abs(lam(cfg, i, j))


def N_k(cfg, k, omega):
    """|A_k u_{k-1}| at rotation angle omega: sqrt(c^2 + cos^2(omega)(1-c^2))."""
    c = float(np.dot(cfg.axis(k - 1), cfg.axis(k)))
    return math.sqrt(c * c + math.cos(omega) ** 2 * (1.0 - c * c))


# -- reduced dynamics (closed form) --------------------------------------

def _axis_op(u, theta):
    """A = P(u) + cos(theta) (1 - P(u)) acting on real 3-vectors."""
    u = np.asarray(u, dtype=float)
    P = np.outer(u, u)
    return P + math.cos(theta) * (np.eye(3) - P)


def bloch_vector(cfg, t):
    """A(t) v: the (unnormalized) Bloch vector of the reduced state."""
    a = cfg.v.copy()
    for k in range(1, cfg.n + 1):
        a = _axis_op(cfg.axis(k), theta_schedule(k, t)) @ a
    return a


def reduced_density(cfg, t, degenerate_tol=1e-12):
    """Reduced system density matrix, Schmidt axis and weight split.

    Returns (rho, w, N): rho = (1 + sigma.(Nw))/2 has eigenvalues
    (1 +- N)/2 with eigenvectors |+-w>.  Flags N below tolerance."""
    a = bloch_vector(cfg, t)
    N = float(np.linalg.norm(a))
    if N < degenerate_tol:
        raise ValueError("degenerate Schmidt direction: |A(t)v| ~ 0")
    w = a / N
    rho = (I2 + a[0] * SIGMA[0] + a[1] * SIGMA[1] + a[2] * SIGMA[2]) / 2.0
    return rho, w, N


def schmidt_axis(cfg, t):
    a = bloch_vector(cfg, t)
    return a / np.linalg.norm(a)


# -- full-state machinery ------------------------------------------------

def _kron_chain(ops):
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _env_op(n, k, op):
    """op on environment spin k (1-based), identity elsewhere (no system)."""
    return _kron_chain([op if j == k else I2 for j in range(1, n + 1)])


def interaction_unitary(cfg, k, t):
    """V_k(t) = P(u_k) (x) 1 + P(-u_k) (x) exp(-i theta_k(t) F_k)."""
    n = cfg.n
    th = theta_schedule(k, t)
    rot = np.array([[math.cos(th), -math.sin(th)],
                    [math.sin(th), math.cos(th)]], dtype=complex)
    u = cfg.axis(k)
    return np.kron(proj2(u), _env_op(n, k, I2)) \
        + np.kron(proj2(-u), _env_op(n, k, rot))


def full_unitary(cfg, t):
    """U(t) = V_n(t) ... V_1(t) on C^2 (x) (C^2)^n."""
    U = interaction_unitary(cfg, 1, t)
    for k in range(2, cfg.n + 1):
        U = interaction_unitary(cfg, k, t) @ U
    return U


def initial_state(cfg):
    """|v> (x) |up...up>."""
    env = np.zeros(2 ** cfg.n, dtype=complex)
    env[0] = 1.0
    return np.kron(spinor(cfg.v), env)


def system_projector_full(cfg, w):
    """P(w) (x) 1 on the full space."""
    return np.kron(proj2(np.asarray(w)), np.eye(2 ** cfg.n, dtype=complex))


def reduced_density_full(cfg, t):
    """Partial trace over the environment of the evolved full state."""
    psi = full_unitary(cfg, t) @ initial_state(cfg)
    M = psi.reshape(2, 2 ** cfg.n)
    return M @ M.conj().T


def build_tree(cfg, events):
    """History tree from (time, axis) projection events; each event splits
    every branch with {P(axis), P(-axis)} on the system."""
    tree = HistoryTree(initial_state=initial_state(cfg),
                       evolution=lambda t: full_unitary(cfg, t))
    for t, w in sorted(events, key=lambda e: e[0]):
        dec = ProjectiveDecomposition(
            t, [system_projector_full(cfg, w), system_projector_full(cfg, -np.asarray(w))])
        tree = extend_all(tree, dec)
    return tree


def schmidt_events(cfg, times):
    """(time, Schmidt axis) events for the given projection times."""
    return [(float(t), schmidt_axis(cfg, t)) for t in times]


def measurement_axis(cfg, t):
    """Schmidt axis oriented to match the closed-form sign conventions:
    u_m at integer times m >= 1, and A_k(omega) u_{k-1} / N_k(omega)
    inside interaction k (continuous in u_{k-1})."""
    m = round(t)
    if abs(t - m) < 1e-12 and m >= 1:
        return cfg.axis(int(m))
    if abs(t) < 1e-12:
        return cfg.v
    k = math.ceil(t)
    a = _axis_op(cfg.axis(k), theta_schedule(k, t)) @ cfg.axis(k - 1)
    return a / np.linalg.norm(a)


def measurement_events(cfg, times):
    return [(float(t), measurement_axis(cfg, t)) for t in times]


# -- closed-form decoherence elements ------------------------------------

def offdiag_closed_form(cfg, j, omega, k, phi, sign=1):
    """Two-time off-diagonal decoherence element between histories that
    share the first projection (system sign `sign` at angle omega during
    interaction j) and differ at the second (angle phi during interaction
    k >= j).  Uses unsigned axis-dot products throughout."""
    if k < j:
        raise ValueError("need k >= j")
    l0 = lam_abs(cfg, 0, j - 1)
    uj0, uj = cfg.axis(j - 1), cfg.axis(j)
    if k == j:
        cross = np.linalg.norm(np.cross(uj0, uj)) ** 2
        return complex(l0 * math.sin(omega) * math.sin(phi - omega)
                       * math.cos(phi) * cross / (4.0 * N_k(cfg, j, phi)))
    uj1 = cfg.axis(j + 1)
    pbar = float(uj0 @ (np.eye(3) - np.outer(uj, uj)) @ uj1)
    triple = float(np.dot(uj0, np.cross(uj, uj1)))
    bracket = N_k(cfg, j, omega) * pbar \
        + sign * 1j * lam_abs(cfg, j - 1, j) * triple
    if k == j + 1:
        return complex(l0 * lam_abs(cfg, j, j + 1) * math.sin(omega)
                       * math.cos(omega) * math.sin(phi) ** 2 * bracket
                       / (4.0 * N_k(cfg, j, omega) * N_k(cfg, j + 1, phi)))
    ljk = lam_abs(cfg, j + 1, k - 1)
    return complex(l0 * ljk * N_k(cfg, k, phi) * math.sin(omega)
                   * math.cos(omega) * bracket / (4.0 * N_k(cfg, j, omega)))


# -- history probabilities (closed form) ---------------------------------

@dataclass
class SpinHistorySpec:
    """Projection times of one history: integer times, optionally followed
    by one interior time t in (k-1, k) and the integer k; signs are listed
    in time order relative to the Schmidt axis at each event."""

    integer_times: tuple
    signs: tuple
    interior_time: float | None = None

    def __post_init__(self):
        ts = tuple(self.integer_times)
        if list(ts) != sorted(set(ts)):
            raise ValueError("integer times must be strictly increasing")
        expected = len(ts) + (1 if self.interior_time is not None else 0)
        if len(self.signs) != expected:
            raise ValueError("one sign per projection required")
        if self.interior_time is not None:
            k = math.ceil(self.interior_time)
            if not (k - 1 < self.interior_time < k):
                raise ValueError("interior time must be strictly inside an interaction")
            if not ts or ts[-1] != k:
                raise ValueError("interior time must be followed by the end "
                                 "of its interaction")

    def times(self):
        if self.interior_time is None:
            return self.integer_times
        return self.integer_times[:-1] + (self.interior_time,
                                          self.integer_times[-1])


def history_probability(cfg, spec):
    """Closed-form probability of the history.

    Without an interior time: 2^{-l} prod [1 + a_i a_{i+1} lam(m_i, m_{i+1})].
    With one: the same chain up to m_l, then the two factors carrying
    N_k(t) and (u_{k-1}.u_k)/N_k(t)."""
    if spec.interior_time is None:
        ms = (0,) + tuple(spec.integer_times)
        signs = (1,) + tuple(spec.signs)
        p = 2.0 ** (-len(spec.integer_times))
        for i in range(len(ms) - 1):
            p *= 1.0 + signs[i] * signs[i + 1] * lam(cfg, ms[i], ms[i + 1])
        return float(p)
    k = spec.integer_times[-1]
    chain = spec.integer_times[:-1]
    l = len(chain)
    ms = (0,) + tuple(chain)
    signs = (1,) + tuple(spec.signs[:l])
    a_t, a_k = spec.signs[l], spec.signs[l + 1]
    omega = theta_schedule(k, spec.interior_time)
    Nk = N_k(cfg, k, omega)
    c = float(np.dot(cfg.axis(k - 1), cfg.axis(k)))
    p = 2.0 ** (-(l + 2))
    p *= 1.0 + signs[l] * a_t * lam(cfg, ms[l], k - 1) * Nk
    p *= 1.0 + a_t * a_k * c / Nk
    for i in range(l):
        p *= 1.0 + signs[i] * signs[i + 1] * lam(cfg, ms[i], ms[i + 1])
    return float(p)


# -- classification-allowed sets -----------------------------------------

def enumerate_consistent_sets(cfg, interior_points=(0.3, 0.7)):
    """Yield (form, times) for every classification-allowed branch of the
    set catalogue: (i) subsets of the between-interaction times {1..n};
    (ii) form (i) plus one interior time in the interaction ending at the
    last chosen time; (iii) form (i) plus one interior time after every
    chosen time.  Interior times are sampled at the given schedule offsets."""
    n = cfg.n
    for r in range(n + 1):
        for T in itertools.combinations(range(1, n + 1), r):
            yield ("i", tuple(float(t) for t in T))
            if T:
                k = T[-1]
                for frac in interior_points:
                    yield ("ii", tuple(float(t) for t in T[:-1])
                           + (k - 1 + frac, float(k)))
            last = T[-1] if T else 0
            for k0 in range(last + 1, n + 1):
                for frac in interior_points:
                    yield ("iii", tuple(float(t) for t in T) + (k0 - 1 + frac,))


# -- information ---------------------------------------------------------

def binary_entropy_of_dot(x):
    """f(x): Shannon information of the pair (1+x)/2, (1-x)/2, in nats."""
    p = (1.0 + x) / 2.0
    q = (1.0 - x) / 2.0
    out = 0.0
    if p > 0.0:
        out -= p * math.log(p)
    if q > 0.0:
        out -= q * math.log(q)
    return out


def Sk_information_at(cfg, k, t):
    """Information of the set projecting at 1..k-1, t in (k-1,k) and k."""
    omega = theta_schedule(k, t)
    Nk = N_k(cfg, k, omega)
    c = float(np.dot(cfg.axis(k - 1), cfg.axis(k)))
    total = binary_entropy_of_dot(Nk) + binary_entropy_of_dot(c / Nk)
    for j in range(1, k):
        total += binary_entropy_of_dot(float(np.dot(cfg.axis(j - 1), cfg.axis(j))))
    return total


def information_of_Sk(cfg, k):
    """(E_k, t*): the maximal information of the k-th interior-time set and
    the maximizing time.  The optimum sits at N_k = sqrt(|u_k.u_{k-1}|):

        E_k = 2 f(sqrt(|u_k.u_{k-1}|)) + sum_{j<k} f(u_{j-1}.u_j)."""
    c = float(np.dot(cfg.axis(k - 1), cfg.axis(k)))
    E = 2.0 * binary_entropy_of_dot(math.sqrt(abs(c)))
    for j in range(1, k):
        E += binary_entropy_of_dot(float(np.dot(cfg.axis(j - 1), cfg.axis(j))))
    ac = abs(c)
    if ac >= 1.0:
        omega = 0.0
    else:
        cos2 = (ac - c * c) / (1.0 - c * c)
        omega = math.acos(math.sqrt(max(0.0, min(1.0, cos2))))
    t_star = k - 1 + omega / (math.pi / 2)
    return E, t_star


def sn_selection_fraction(n, samples, rng):
    """Monte Carlo fraction of uniformly random axis draws for which the
    last-interaction set S_n carries the most information among the
    maximal interior-time sets S_2 .. S_n."""
    if n < 2:
        raise ValueError("need n >= 2")
    g = rng.generator
    vecs = g.normal(size=(samples, n + 1, 3))
    vecs /= np.linalg.norm(vecs, axis=2, keepdims=True)
    dots = np.einsum("sij,sij->si", vecs[:, :-1, :], vecs[:, 1:, :])

    def f(x):
        p = (1.0 + x) / 2.0
        q = (1.0 - x) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -np.where(p > 0, p * np.log(p), 0.0) \
                - np.where(q > 0, q * np.log(q), 0.0)
        return out

    interior = 2.0 * f(np.sqrt(np.abs(dots)))        # (samples, n): 2f(sqrt|c_k|)
    chain = np.concatenate(
        [np.zeros((samples, 1)), np.cumsum(f(dots), axis=1)[:, :-1]], axis=1)
    E = interior + chain                             # E_k for k = 1..n
    return float(np.mean(np.argmax(E[:, 1:], axis=1) == n - 2))


# -- recoherence variant -------------------------------------------------

def recoherence_theta(t):
    """Up, hold, and back down: t on [0, pi/2], pi/2 on [pi/2, pi],
    3 pi/2 - t on [pi, 3 pi/2]."""
    if not (0.0 <= t <= 3 * math.pi / 2 + 1e-12):
        raise ValueError("t must lie in [0, 3 pi/2]")
    if t <= math.pi / 2:
        return t
    if t <= math.pi:
        return math.pi / 2
    return 3 * math.pi / 2 - t


def recoherence_unitary(u, t):
    """P(u) (x) 1 + P(-u) (x) exp(-i theta(t) F) on C^2 (x) C^2."""
    th = recoherence_theta(t)
    rot = np.array([[math.cos(th), -math.sin(th)],
                    [math.sin(th), math.cos(th)]], dtype=complex)
    u = np.asarray(u, dtype=float)
    return np.kron(proj2(u), I2) + np.kron(proj2(-u), rot)


def recoherence_initial_state(a1, a2, u):
    u = np.asarray(u, dtype=float)
    sys = a1 * spinor(u) + a2 * spinor(-u)
    return np.kron(sys, np.array([1.0, 0.0], dtype=complex))


def recoherence_evolve(a1, a2, u, t):
    """State of the decohere/recohere cycle at time t; returns to the
    initial product state at t = 3 pi/2."""
    return recoherence_unitary(u, t) @ recoherence_initial_state(a1, a2, u)


# -- delayed-choice variant ----------------------------------------------

def delayed_choice_unitary(v, axis_map, n, t):
    """Full evolution with measurement axes depending on earlier outcomes.

    axis_map(outcomes) gives the axis of measurement m for the outcome
    tuple of the previous m-1 measurements (outcomes in {+1,-1})."""
    dim = 2 ** (n + 1)
    U = np.eye(dim, dtype=complex)
    for m in range(1, n + 1):
        th = theta_schedule(m, t)
        rot = np.array([[math.cos(th), -math.sin(th)],
                        [math.sin(th), math.cos(th)]], dtype=complex)
        Vm = np.zeros((dim, dim), dtype=complex)
        for outcomes in itertools.product((1, -1), repeat=m - 1):
            u = np.asarray(axis_map(outcomes), dtype=float)
            env_sel = [np.array([[1, 0], [0, 0]], dtype=complex) if a == 1
                       else np.array([[0, 0], [0, 1]], dtype=complex)
                       for a in outcomes]
            sel_plus = _kron_chain(env_sel + [I2] * (n - m + 1))
            sel_rot = _kron_chain(env_sel + [rot] + [I2] * (n - m))
            Vm += np.kron(proj2(u), sel_plus)
            Vm += np.kron(proj2(-u), sel_rot)
        U = Vm @ U
    return U


def delayed_choice_branches(v, axis_map, n):
    """Branch states and probabilities at t = n of the delayed-choice
    model, one per outcome string, via branch-dependent projections."""
    env0 = np.zeros(2 ** n, dtype=complex)
    env0[0] = 1.0
    psi = np.kron(spinor(np.asarray(v, dtype=float)), env0)
    branches = {(): psi}
    for m in range(1, n + 1):
        Um = delayed_choice_unitary(v, axis_map, n, m)
        Um_prev = delayed_choice_unitary(v, axis_map, n, m - 1)
        step = Um @ Um_prev.conj().T
        new = {}
        for outcomes, state in branches.items():
            state_m = step @ state
            u = np.asarray(axis_map(outcomes), dtype=float)
            for a in (1, -1):
                P = np.kron(proj2(a * u), np.eye(2 ** n, dtype=complex))
                new[outcomes + (a,)] = P @ state_m
        branches = new
    probs = {k: float(np.linalg.norm(s) ** 2) for k, s in branches.items()}
    return branches, probs
