"""Observability frames: analysis matrix, frame matrix and reconstruction."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import _io
from .errors import NotAFrameError, ParameterError
from .sampling import SamplingStrategy

__all__ = [
    "ObservabilityFrame",
    "FrameBounds",
    "build_frame",
    "is_frame",
    "reconstruct",
    "leverage_scores",
    "DEFAULT_FRAME_TOL",
]

DEFAULT_FRAME_TOL = 1e-10


class ObservabilityFrame:
    """A labeled family of vectors in R^n.

    Component ``k`` is row ``T[k]`` with label ``labels[k]``; for frames built
    from a network the label is the sample ``(i, t)`` and the row equals
    ``exp(A^T t) e_i``. Instances are treated as immutable; every derived
    quantity is cached on first use.
    """

    def __init__(self, T, labels=None, A=None):
        T = np.array(T, dtype=float)
        if T.ndim != 2 or T.shape[0] == 0:
            raise ParameterError("a frame needs at least one component")
        if labels is None:
            labels = [(k, 0.0) for k in range(T.shape[0])]
        labels = [tuple(lab) for lab in labels]
        if len(labels) != T.shape[0]:
            raise ParameterError("one label per component required")
        T.setflags(write=False)
        self.T = T
        self.labels = labels
        self.A = None if A is None else np.asarray(A, dtype=float)

    @classmethod
    def from_vectors(cls, vectors, labels=None):
        return cls(np.atleast_2d(np.asarray(vectors, dtype=float)), labels)

    def __len__(self):
        return self.T.shape[0]

    def __repr__(self):
        return f"ObservabilityFrame({len(self)} components in R^{self.n})"

    @property
    def n(self):
        return self.T.shape[1]

    @property
    def components(self):
        return list(zip(self.labels, self.T))

    @cached_property
    def S(self):
        S = self.T.T @ self.T
        S = 0.5 * (S + S.T)
        S.setflags(write=False)
        return S

    @cached_property
    def eigen_S(self):
        """Ascending eigenvalues of the frame matrix."""
        return np.linalg.eigvalsh(self.S)

    @cached_property
    def _cho(self):
        check = is_frame(self)
        if not check:
            raise NotAFrameError(
                f"frame matrix is singular (lambda_1={check.alpha:.3g}, lambda_n={check.beta:.3g})")
        try:
            return sla.cho_factor(self.S, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NotAFrameError(f"Cholesky factorization failed: {exc}") from exc

    def solve(self, rhs):
        """``S^{-1} rhs`` through the cached Cholesky factor."""
        return sla.cho_solve(self._cho, rhs)

    @cached_property
    def S_inv(self):
        return self.solve(np.eye(self.n))

    @property
    def strategy(self):
        return SamplingStrategy(self.labels)

    def subframe(self, indices):
        idx = np.asarray(indices, dtype=int)
        return ObservabilityFrame(self.T[idx], [self.labels[k] for k in idx], self.A)

    def union(self, other):
        return ObservabilityFrame(np.vstack([self.T, other.T]),
                                  list(self.labels) + list(other.labels), self.A)

    def with_component(self, phi, label):
        return ObservabilityFrame(np.vstack([self.T, np.asarray(phi, dtype=float)[None, :]]),
                                  list(self.labels) + [tuple(label)], self.A)

    def to_csv(self):
        header = ["location", "time"] + [f"phi_{k + 1}" for k in range(self.n)]
        rows = ([lab[0], float(lab[1])] + [float(v) for v in row]
                for lab, row in zip(self.labels, self.T))
        return _io.csv_text(header, rows)


@dataclass(frozen=True)
class FrameBounds:
    """Frame test outcome with the optimal frame bounds; truthy iff a frame."""

    is_frame: bool
    alpha: float
    beta: float

    def __bool__(self):
        return self.is_frame


def build_frame(network, strategy):
    """Frame ``(exp(A^T t) e_i)`` for every sample ``(i, t)`` of ``strategy``."""
    if len(strategy) == 0:
        raise ParameterError("strategy is empty")
    A = network.A
    n = network.n
    rows = np.empty((len(strategy), n))
    cache = {}
    for k, (i, t) in enumerate(strategy):
        if i >= n:
            raise ParameterError(f"location {i} outside a network of size {n}")
        E = cache.get(t)
        if E is None:
            E = cache[t] = network.expm(t)
        # exp(A^T t) e_i is row i of exp(A t)
        rows[k] = E[i]
    return ObservabilityFrame(rows, list(strategy.entries), A)


def is_frame(frame, frame_tol=DEFAULT_FRAME_TOL):
    lam = frame.eigen_S
    alpha, beta = float(lam[0]), float(lam[-1])
    ok = beta > 0 and alpha > frame_tol * beta
    return FrameBounds(bool(ok), alpha, beta)


def reconstruct(frame, y):
    """Least-squares initial state ``S^{-1} T^T y``."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] != len(frame):
        raise ParameterError("observation vector length must equal the frame size")
    return frame.solve(frame.T.T @ y)


def leverage_scores(frame, as_dict=False):
    """Scores ``phi^T S^{-1} phi`` in component order (they sum to n)."""
    X = frame.solve(frame.T.T)
    scores = np.einsum("kj,jk->k", frame.T, X)
    if as_dict:
        return dict(zip(frame.labels, scores.tolist()))
    return scores
