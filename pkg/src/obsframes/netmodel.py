"""LTI network state matrices and their spectral data.

State indices are 0-based throughout the package: location ``i`` refers to
state coordinate ``x[i]``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import _io
from .errors import NumericalError, ParameterError

__all__ = [
    "LtiNetwork",
    "SpectralInfo",
    "SamplingLocations",
    "generate_geometric_network",
    "matrix_exponential",
    "spectral_info",
    "minpoly_degree",
    "is_observable",
    "observability_rank",
    "rotation_network",
]


def _as_state_matrix(A):
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ParameterError(f"state matrix must be square and nonempty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ParameterError("state matrix has non-finite entries")
    return A


@dataclass(frozen=True)
class SpectralInfo:
    eigenvalues: np.ndarray
    distinct_eigenvalues: np.ndarray
    multiplicities: np.ndarray  # algebraic multiplicity per cluster
    block_sizes: np.ndarray  # exponent p_m of each cluster in the minimal polynomial
    minpoly_degree: int
    norm2: float
    cluster_tol: float
    approximate: bool

    @property
    def q(self):
        return len(self.distinct_eigenvalues)

    @property
    def is_real(self):
        return bool(np.all(np.abs(self.distinct_eigenvalues.imag) <= self.cluster_tol))

    def time_row(self, t):
        """Row ``[exp(lam_m t) t^k]`` over clusters m and powers k < p_m."""
        out = []
        for lam, p in zip(self.distinct_eigenvalues, self.block_sizes):
            base = np.exp(lam * t)
            out.extend(base * t**k for k in range(int(p)))
        return np.array(out, dtype=complex)


@dataclass(frozen=True)
class SamplingLocations:
    """Ordered set of sampled state coordinates and its output matrix."""

    omega: tuple
    n: int

    def __post_init__(self):
        omega = tuple(int(i) for i in self.omega)
        if not omega:
            raise ParameterError("at least one sampling location is required")
        if len(set(omega)) != len(omega):
            raise ParameterError("sampling locations must be distinct")
        if any(i < 0 or i >= self.n for i in omega):
            raise ParameterError(f"sampling locations must lie in [0, {self.n})")
        object.__setattr__(self, "omega", omega)

    @classmethod
    def all(cls, n):
        return cls(tuple(range(n)), n)

    @property
    def p(self):
        return len(self.omega)

    @property
    def c_matrix(self):
        C = np.zeros((len(self.omega), self.n))
        C[np.arange(len(self.omega)), list(self.omega)] = 1.0
        return C

    def __iter__(self):
        return iter(self.omega)

    def __len__(self):
        return len(self.omega)


@dataclass(frozen=True)
class LtiNetwork:
    """Network ``dx/dt = A x`` with optional geometric metadata."""

    A: np.ndarray
    coords: np.ndarray = None
    generator: dict = field(default=None, compare=False)

    def __post_init__(self):
        A = _as_state_matrix(self.A)
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        if self.coords is not None:
            coords = np.array(self.coords, dtype=float)
            if coords.shape != (A.shape[0], 2):
                raise ParameterError("coords must have one 2-D point per subsystem")
            if np.any(coords < 0) or np.any(coords > 1):
                raise ParameterError("coords must lie in the unit square")
            coords.setflags(write=False)
            object.__setattr__(self, "coords", coords)

    @property
    def n(self):
        return self.A.shape[0]

    @cached_property
    def spectral(self):
        return spectral_info(self.A)

    @cached_property
    def norm2(self):
        return float(np.linalg.norm(self.A, 2))

    def expm(self, t):
        return matrix_exponential(self.A, t)

    def is_hurwitz(self, margin=1e-10):
        return bool(np.max(self.spectral.eigenvalues.real) < -margin)

    def to_dict(self):
        d = {"n": self.n, "A": self.A.tolist()}
        if self.coords is not None:
            d["coords"] = self.coords.tolist()
        if self.generator is not None:
            d["generator"] = dict(self.generator)
        return d

    @classmethod
    def from_dict(cls, d):
        A = np.array(d["A"], dtype=float)
        if "n" in d and A.shape[0] != int(d["n"]):
            raise ParameterError("network JSON: n does not match A")
        return cls(A, coords=d.get("coords"), generator=d.get("generator"))

    def to_json(self):
        return _io.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(_io.loads(text))


def rotation_network():
    """The planar rotation ``[[0, -1], [1, 0]]``."""
    return LtiNetwork(np.array([[0.0, -1.0], [1.0, 0.0]]))


def generate_geometric_network(n, a=1.0, b=0.5, d=0.3, seed=None):
    """Random spatially embedded network on the unit square.

    Subsystems get uniform positions; ``A[i, j] = z_ij * exp(-a * dist^b)``
    when ``dist(i, j) <= d`` and zero otherwise, with standard normal z_ij.
    """
    if int(n) != n or n < 2:
        raise ParameterError("n must be an integer >= 2")
    if not a > 0:
        raise ParameterError("decay rate a must be positive")
    if not 0 < b <= 1:
        raise ParameterError("exponent b must lie in (0, 1]")
    if not d >= 0:
        raise ParameterError("connectivity radius d must be nonnegative")
    n = int(n)
    rng = _io.make_rng(seed)
    coords = rng.uniform(0.0, 1.0, size=(n, 2))
    zeta = rng.standard_normal((n, n))
    dist = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1))
    A = np.where(dist <= d, zeta * np.exp(-a * dist**b), 0.0)
    gen = {"a": float(a), "b": float(b), "d": float(d),
           "seed": None if seed is None else int(seed)}
    return LtiNetwork(A, coords=coords, generator=gen)


def matrix_exponential(A, t=1.0):
    """``exp(A t)`` by Pade scaling-and-squaring."""
    A = _as_state_matrix(A)
    t = float(t)
    if not np.isfinite(t):
        raise ParameterError("time must be finite")
    return sla.expm(A * t)


def _cluster(eigs, tol):
    # single linkage via union-find on the pairwise distance graph
    m = len(eigs)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = np.abs(eigs[:, None] - eigs[None, :]) <= tol
    for i in range(m):
        for j in np.nonzero(close[i, i + 1:])[0] + i + 1:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    reps = []
    for members in groups.values():
        reps.append((eigs[members].mean(), len(members)))
    reps.sort(key=lambda rc: (round(rc[0].real, 12), round(rc[0].imag, 12)))
    return np.array([r for r, _ in reps], dtype=complex), np.array([c for _, c in reps], dtype=int)


def minpoly_degree(A, rtol=1e-10):
    """Degree of the minimal polynomial.

    Runs an orthogonalized Krylov sequence ``I, A, A^2, ...`` in the space of
    n x n matrices (Frobenius inner product) and stops at the first power
    whose new direction is below ``rtol`` relative to ``||A||``.
    """
    A = _as_state_matrix(A)
    n = A.shape[0]
    scale = np.linalg.norm(A, 2)
    if scale == 0.0:
        return 1
    B = A / scale
    basis = [np.eye(n).ravel() / np.sqrt(n)]
    for k in range(1, n + 1):
        w = (B @ basis[-1].reshape(n, n)).ravel()
        V = np.array(basis).T
        for _ in range(2):
            w = w - V @ (V.T @ w)
        h = np.linalg.norm(w)
        if h <= rtol:
            return k
        basis.append(w / h)
    return n


def _jordan_index(A, lam, mult, tol):
    n = A.shape[0]
    N = A - lam * np.eye(n)
    P = np.eye(n, dtype=complex)
    ranks = [n]
    for _ in range(mult):
        P = P @ N
        s = np.linalg.svd(P, compute_uv=False)
        ranks.append(int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0))))
        if ranks[-1] == ranks[-2]:
            return len(ranks) - 2 if len(ranks) > 2 else 1
    return mult


def spectral_info(A, cluster_tol=None, rank_rtol=1e-10):
    """Eigenvalues, distinct-eigenvalue clusters and minimal-polynomial data.

    ``cluster_tol`` defaults to ``1e-8 * max(1, ||A||)``. If clustering leaves
    more clusters than the minimal-polynomial degree allows, the tolerance is
    widened by decades until it does. Block sizes ``p_m`` are estimates that
    always sum to the minimal-polynomial degree.
    """
    A = _as_state_matrix(A)
    n = A.shape[0]
    norm2 = float(np.linalg.norm(A, 2))
    if cluster_tol is None:
        cluster_tol = 1e-8 * max(1.0, norm2)
    if not cluster_tol > 0:
        raise ParameterError("cluster_tol must be positive")
    try:
        eigs = np.linalg.eigvals(A).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    deg = minpoly_degree(A, rtol=rank_rtol)

    tol = cluster_tol
    reps, mults = _cluster(eigs, tol)
    while len(reps) > deg:
        tol *= 10.0
        reps, mults = _cluster(eigs, tol)

    if deg == n:
        blocks = mults.copy()
    else:
        blocks = np.ones_like(mults)
        rank_tol = max(np.sqrt(np.finfo(float).eps), tol)
        for m, (lam, a) in enumerate(zip(reps, mults)):
            if a > 1:
                blocks[m] = min(a, _jordan_index(A, lam, a, rank_tol))
        while blocks.sum() < deg:
            m = int(np.argmax(mults - blocks))
            blocks[m] += 1
        while blocks.sum() > deg:
            m = int(np.argmax(blocks))
            blocks[m] -= 1

    approximate = bool(np.any(mults > 1))
    return SpectralInfo(eigenvalues=eigs, distinct_eigenvalues=reps, multiplicities=mults,
                        block_sizes=blocks, minpoly_degree=int(deg), norm2=norm2,
                        cluster_tol=float(tol), approximate=approximate)


def observability_rank(A, locations, rank_tol=1e-10):
    """Dimension of the observable subspace of ``(A, C)``.

    Orthonormal staircase on the rows of ``C, CA, CA^2, ...`` with ``A``
    scaled to unit norm; a new direction counts when its residual singular
    value exceeds ``rank_tol``.
    """
    A = _as_state_matrix(A)
    n = A.shape[0]
    C = locations.c_matrix if isinstance(locations, SamplingLocations) else np.atleast_2d(
        np.asarray(locations, dtype=float))
    if C.shape[1] != n:
        raise ParameterError("output matrix width does not match the state dimension")
    if not rank_tol > 0:
        raise ParameterError("rank_tol must be positive")
    scale = np.linalg.norm(A, 2)
    B = A / scale if scale > 0 else A

    def fresh_rows(W, V):
        if V.shape[0]:
            for _ in range(2):
                W = W - (W @ V.T) @ V
        if W.shape[0] == 0:
            return W
        _, s, vt = np.linalg.svd(W, full_matrices=False)
        ref = max(1.0, s[0]) if V.shape[0] == 0 else 1.0
        return vt[s > rank_tol * ref]

    V = fresh_rows(C, np.zeros((0, n)))
    new = V
    while new.shape[0] and V.shape[0] < n:
        new = fresh_rows(new @ B, V)
        V = np.vstack([V, new])
    return int(V.shape[0])


def is_observable(A, locations, rank_tol=1e-10):
    """Whether ``(A, C_omega)`` is observable."""
    A = _as_state_matrix(A)
    return observability_rank(A, locations, rank_tol) == A.shape[0]
