"""Dense complex linear algebra: Hermitian eigenproblems, Schmidt
decompositions and their evolution generator, degenerate-eigenspace
continuation, and seeded random sampling (GUE matrices, unit vectors)."""

from dataclasses import dataclass, field
import zlib

import numpy as np

# Schmidt weights closer than this are treated as degenerate; the evolution
# generator is undefined across such a pair.
DEGENERACY_TOL = 1e-9

HERMITICITY_TOL = 1e-10


class DegenerateWeightsError(ValueError):
    """Raised when an operation requires non-degenerate eigenvalues."""


class RandomStream:
    """Deterministic random source.

    A stream is identified by a 64-bit master seed plus a name path; the
    same (seed, name) always reproduces the same sample sequence.  Derived
    streams (for parallel work) are independent substreams of the master
    seed, not reseedings.
    """

    def __init__(self, seed, name=""):
        self.seed = int(seed)
        self.name = str(name)
        key = tuple(zlib.crc32(part.encode("utf-8"))
                    for part in self.name.split("/") if part)
        self._sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=key)
        self.generator = np.random.Generator(np.random.PCG64(self._sequence))

    def stream(self, name):
        """Derive an independent named substream."""
        child = f"{self.name}/{name}" if self.name else str(name)
        return RandomStream(self.seed, child)

    def split(self, n):
        """n independent substreams, e.g. one per worker."""
        return [self.stream(f"split{i}") for i in range(n)]

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, name={self.name!r})"


def _as_complex_matrix(H):
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValueError("matrix has non-finite entries")
    return H


def _fix_column_phases(V):
    # make the largest-modulus component of each column real positive
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return V / phases[None, :]


def hermitian_eig(H):
    """Eigenvalues (ascending) and orthonormal eigenvectors of Hermitian H.

    Eigenvector phases are fixed by making the largest-modulus component
    real positive, so repeated calls give reproducible bases.
    """
    H = _as_complex_matrix(H)
    asym = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 0.0)
    if asym > HERMITICITY_TOL * scale:
        raise ValueError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    vals, vecs = np.linalg.eigh(H)
    return vals, _fix_column_phases(vecs)


def degeneracy_groups(values, tol=DEGENERACY_TOL):
    """Partition indices of a sorted-or-not value list into near-equal runs."""
    order = np.argsort(values)[::-1]
    groups = []
    current = [int(order[0])] if len(order) else []
    for i in order[1:]:
        if abs(values[i] - values[current[-1]]) < tol:
            current.append(int(i))
        else:
            groups.append(current)
            current = [int(i)]
    if current:
        groups.append(current)
    return groups


@dataclass
class SchmidtDecomposition:
    """Bi-orthogonal expansion of a bipartite pure state.

    weights are descending probabilities p_i; the state is
    sum_i sqrt(p_i) system_basis[:, i] (x) env_basis[i, :].
    """

    weights: np.ndarray
    system_basis: np.ndarray   # d1 x r, orthonormal columns
    env_basis: np.ndarray      # r x d2, orthonormal rows
    degeneracy_groups: list = field(default_factory=list)

    @property
    def rank(self):
        return len(self.weights)

    def reconstruct(self):
        amps = np.sqrt(self.weights)
        return np.einsum("i,ji,ik->jk",
                         amps, self.system_basis, self.env_basis).reshape(-1)

    def system_projector(self, i):
        v = self.system_basis[:, i]
        return np.outer(v, v.conj())


def schmidt_decompose(psi, d1, d2, norm_tol=1e-10):
    """Schmidt decomposition of psi in C^{d1} (x) C^{d2}, d1 <= d2."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != d1 * d2:
        raise ValueError(f"state has dim {psi.size}, expected {d1}*{d2}")
    if d1 > d2:
        raise ValueError("require d1 <= d2")
    if abs(np.linalg.norm(psi) - 1.0) > norm_tol:
        raise ValueError("state is not normalized")
    M = psi.reshape(d1, d2)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    # fold the phase fix of the system basis into the environment rows
    idx = np.argmax(np.abs(U), axis=0)
    pivots = U[idx, np.arange(U.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    U = U / phases[None, :]
    Vh = Vh * phases[:, None]
    weights = s ** 2
    return SchmidtDecomposition(weights, U, Vh, degeneracy_groups(weights))


def schmidt_generator(rho, rho_dot, eig=None):
    """Hermitian generator B of the eigenvector flow of a smooth Hermitian
    family: i du_n/dt = B u_n, with u_m^dag B u_n = i u_m^dag rho_dot u_n
    / (p_n - p_m) off the diagonal and zero on it.

    Undefined when two eigenvalues coalesce; route such points through
    split_degenerate instead.
    """
    rho = _as_complex_matrix(rho)
    rho_dot = _as_complex_matrix(rho_dot)
    if eig is None:
        eig = hermitian_eig(rho)
    p, V = eig
    gaps = np.abs(p[:, None] - p[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) < DEGENERACY_TOL:
        raise DegenerateWeightsError(
            f"eigenvalue gap {np.min(gaps):.3e} below degeneracy threshold")
    M = V.conj().T @ rho_dot @ V
    denom = p[None, :] - p[:, None]          # p_n - p_m at (m, n)
    np.fill_diagonal(denom, 1.0)
    G = 1j * M / denom
    np.fill_diagonal(G, 0.0)
    return V @ G @ V.conj().T


def eigenvalue_rates(rho_dot, eig):
    """dp_n/dt = u_n^dag rho_dot u_n for each eigenvector."""
    _, V = eig
    return np.real(np.einsum("im,ij,jm->m", V.conj(), rho_dot, V))


def split_degenerate(A, X, d1, d2, tol=1e-12):
    """Split a (near-)degenerate pair of eigenspaces of Hermitian A.

    X projects onto the combined d1+d2 dimensional space.  The traceless
    part D = XAX - X tr(XA)/(d1+d2) determines the split; the projectors
    P1 = (X+Y)/2, P2 = (X-Y)/2 with

        Y = X (d1-d2)/(d1+d2) + 2 D sqrt(d1 d2 / (tr(D^2) (d1+d2)))

    continue the separate eigenprojectors through the degeneracy whenever
    D/|D| is continuous there.
    """
    A = _as_complex_matrix(A)
    X = _as_complex_matrix(X)
    dtot = d1 + d2
    if abs(np.trace(X).real - dtot) > 1e-8:
        raise ValueError("projector trace does not match d1 + d2")
    D = X @ A @ X - X * (np.trace(X @ A) / dtot)
    trD2 = float(np.trace(D @ D).real)
    if trD2 <= tol:
        raise DegenerateWeightsError(
            "traceless part vanishes; degeneracy unresolvable")
    Y = X * ((d1 - d2) / dtot) + D * (2.0 * np.sqrt(d1 * d2 / (trD2 * dtot)))
    P1 = (X + Y) / 2
    P2 = (X - Y) / 2
    return P1, P2


def sample_gue(dim, sigma, rng):
    """Hermitian matrix from the Gaussian unitary ensemble with density
    proportional to exp{-tr(A^2)/4 sigma^2}: real diagonal of variance
    2 sigma^2, off-diagonal real and imaginary parts of variance sigma^2."""
    if dim < 1:
        raise ValueError("dim must be positive")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    g = rng.generator
    diag = g.normal(0.0, sigma * np.sqrt(2.0), dim)
    re = g.normal(0.0, sigma, (dim, dim))
    im = g.normal(0.0, sigma, (dim, dim))
    upper = np.triu(re + 1j * im, k=1)
    return upper + upper.conj().T + np.diag(diag.astype(complex))


def sample_unit_vector(dim, field, rng):
    """Uniform random point on the unit sphere of R^dim or C^dim."""
    if dim < 1:
        raise ValueError("dim must be positive")
    g = rng.generator
    if field == "real":
        v = g.normal(size=dim)
    elif field == "complex":
        v = g.normal(size=dim) + 1j * g.normal(size=dim)
    else:
        raise ValueError(f"unknown field {field!r}")
    return v / np.linalg.norm(v)


def evolve(H, psi, t, eig=None):
    """exp(-i H t) psi for Hermitian H."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if eig is None:
        eig = hermitian_eig(H)
    vals, vecs = eig
    if psi.size != vals.size:
        raise ValueError("dimension mismatch")
    return vecs @ (np.exp(-1j * vals * t) * (vecs.conj().T @ psi))


class HamiltonianFlow:
    """Constant-Hamiltonian evolution with a cached eigendecomposition."""

    def __init__(self, H):
        self.H = _as_complex_matrix(H)
        self.eig = hermitian_eig(self.H)

    def unitary(self, t):
        vals, vecs = self.eig
        return (vecs * np.exp(-1j * vals * t)[None, :]) @ vecs.conj().T

    def apply(self, psi, t):
        return evolve(self.H, psi, t, eig=self.eig)
