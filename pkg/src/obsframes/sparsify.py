"""Frame sparsification: leverage-score sampling, random halving, greedy removal."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _io
from .errors import NotAFrameError, ParameterError
from .estimation import measure_rho_d, measure_rho_e
from .framecore import is_frame, leverage_scores

__all__ = [
    "SparsificationResult",
    "PartitionResult",
    "GreedyStep",
    "default_q",
    "sampling_distribution",
    "randomized_sparsify",
    "exact_chi",
    "kappa",
    "partition_entropy_bound",
    "KS_THRESHOLD",
    "random_partition",
    "partition_degradations",
    "greedy_sparsify",
    "trace_csv",
]

KS_THRESHOLD = 1.5 - math.sqrt(2.0)


@dataclass
class SparsificationResult:
    """Surviving components of a frame plus realized and theoretical losses.

    ``kept_indices`` index the original frame in its component order.
    ``realized_loss_d`` is relative, ``realized_loss_e`` an absolute
    difference; both are ``None`` when the survivors do not form a frame.
    """

    method: str
    kept_indices: np.ndarray
    frame_s: object
    is_frame: bool
    realized_loss_d: float = None
    realized_loss_e: float = None
    bound_d: float = None
    bound_e: float = None
    weights: np.ndarray = None
    theta: float = 0.0
    seed: int = None
    status: str = "ok"
    info: dict = field(default_factory=dict)
    trace: list = None

    @property
    def kept(self):
        return self.frame_s.strategy

    @property
    def size(self):
        return len(self.kept_indices)

    @property
    def within_bound_d(self):
        return (self.is_frame and self.bound_d is not None
                and self.realized_loss_d <= self.bound_d)

    @property
    def within_bound_e(self):
        return (self.is_frame and self.bound_e is not None
                and self.realized_loss_e <= self.bound_e)

    def weight_map(self):
        if self.weights is None:
            return {}
        labels = self.info.get("labels")
        return {labels[k]: float(self.weights[k]) for k in np.nonzero(self.weights)[0]}

    def to_dict(self):
        d = {
            "method": self.method,
            "size": self.size,
            "is_frame": self.is_frame,
            "realized_loss_d": self.realized_loss_d,
            "realized_loss_e": self.realized_loss_e,
            "bound_d": self.bound_d,
            "bound_e": self.bound_e,
            "theta": self.theta,
            "seed": self.seed,
            "status": self.status,
        }
        for k, v in self.info.items():
            if k != "labels":
                d[k] = v
        return d


def _losses(frame, sub):
    if not is_frame(sub):
        return False, None, None
    d0, d1 = measure_rho_d(frame, 1.0), measure_rho_d(sub, 1.0)
    return True, (d1 - d0) / d0, measure_rho_e(sub) - measure_rho_e(frame)


def _result(method, frame, idx, **kw):
    idx = np.asarray(idx, dtype=int)
    sub = frame.subframe(idx)
    ok, ld, le = _losses(frame, sub) if idx.size else (False, None, None)
    n_loc = len({sub.labels[k][0] for k in range(len(sub))}) if idx.size else 0
    theta = idx.size / n_loc if n_loc else 0.0
    return SparsificationResult(method=method, kept_indices=idx, frame_s=sub, is_frame=ok,
                                realized_loss_d=ld, realized_loss_e=le, theta=theta, **kw)


def default_q(n, epsilon):
    return int(math.ceil(4.0 * n * math.log(n) / epsilon**2))


def sampling_distribution(frame):
    """Leverage scores divided by n; a probability vector over components."""
    return leverage_scores(frame) / frame.n


def randomized_sparsify(frame, q=None, epsilon=0.5, seed=None):
    """Sample ``q`` components with replacement, proportionally to leverage.

    Each draw of component ``k`` adds ``1 / (q * pi_k)`` to its weight.
    The loss bounds use the realized maximum weight in place of ``chi``.
    """
    if not is_frame(frame):
        raise NotAFrameError("randomized sparsification needs a frame")
    n = frame.n
    if not (1.0 / math.sqrt(n) < epsilon <= 1.0):
        raise ParameterError(f"epsilon must lie in (1/sqrt(n), 1] = ({1 / math.sqrt(n):.4g}, 1]")
    if q is None:
        q = default_q(n, epsilon)
    q = int(q)
    if q < 1:
        raise ParameterError("q must be at least 1")
    pi = sampling_distribution(frame)
    support = pi > 1e-12 * pi.max()
    if not support.all():
        warnings.warn(f"{int((~support).sum())} components have numerically zero "
                      "sampling probability and are excluded", stacklevel=2)
    p = np.where(support, pi, 0.0)
    p = p / p.sum()
    rng = _io.make_rng(seed)
    draws = rng.choice(len(frame), size=q, p=p)
    counts = np.bincount(draws, minlength=len(frame))
    weights = np.zeros(len(frame))
    weights[support] = counts[support] / (q * pi[support])
    kept = np.nonzero(counts)[0]
    w_max = float(weights.max())
    if epsilon < 1.0:
        ratio = 4.0 * w_max / (1.0 - epsilon)
        bound_d, bound_e = -1.0 + math.sqrt(ratio), n * math.log(ratio)
    else:
        bound_d = bound_e = math.inf
    return _result("randomized", frame, kept, bound_d=bound_d, bound_e=bound_e,
                   weights=weights, seed=seed,
                   info={"q": q, "epsilon": float(epsilon), "w_max": w_max,
                         "labels": frame.labels})


def exact_chi(frame, weights, tol=1e-12, iters=200):
    """Smallest ``gamma`` with ``sum w (gamma - w) phi phi^T`` positive semidefinite.

    Bisection on ``[0, max w]`` with an eigenvalue check.
    """
    w = np.asarray(weights, dtype=float)
    T = frame.T
    W1 = (T * w[:, None]).T @ T
    W2 = (T * (w**2)[:, None]).T @ T
    scale = max(np.linalg.norm(W2, 2), 1e-300)

    def psd(gamma):
        return np.linalg.eigvalsh(gamma * W1 - W2)[0] >= -tol * scale

    lo, hi = 0.0, float(w.max())
    if psd(lo):
        return 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if psd(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def kappa(r):
    """Worst-case relative ``rho_d`` loss of a random half; ``inf`` past the threshold."""
    if r < 0:
        raise ParameterError("leverage bound must be nonnegative")
    if r >= KS_THRESHOLD:
        return math.inf
    c = 1.0 - (math.sqrt(2.0 * r) + 1.0) ** 2 / 2.0
    if c <= 0:
        return math.inf
    return c ** -0.5 - 1.0


def partition_entropy_bound(r, n):
    if r >= KS_THRESHOLD:
        return math.inf
    c = 1.0 - (math.sqrt(2.0 * r) + 1.0) ** 2 / 2.0
    if c <= 0:
        return math.inf
    return -n * math.log(c)


@dataclass
class PartitionResult:
    first: SparsificationResult
    second: SparsificationResult
    r_star: float
    kappa: float
    bound_applicable: bool

    @property
    def both_frames(self):
        return self.first.is_frame and self.second.is_frame

    @property
    def max_degradation(self):
        if not self.both_frames:
            return None
        return max(self.first.realized_loss_d, self.second.realized_loss_d)

    @property
    def min_degradation(self):
        if not self.both_frames:
            return None
        return min(self.first.realized_loss_d, self.second.realized_loss_d)

    def to_dict(self):
        return {"r_star": self.r_star, "kappa": self.kappa,
                "bound_applicable": self.bound_applicable, "both_frames": self.both_frames,
                "max_degradation": self.max_degradation, "min_degradation": self.min_degradation,
                "first": self.first.to_dict(), "second": self.second.to_dict()}


def random_partition(frame, seed=None):
    """Assign each component to one of two halves with probability 1/2.

    Empty or rank-deficient halves are reported as non-frames; nothing is
    redrawn.
    """
    if not is_frame(frame):
        raise NotAFrameError("random partitioning needs a frame")
    r_star = float(leverage_scores(frame).max())
    applicable = r_star < KS_THRESHOLD
    k = kappa(r_star) if applicable else math.inf
    be = partition_entropy_bound(r_star, frame.n) if applicable else math.inf
    rng = _io.make_rng(seed)
    mask = rng.random(len(frame)) < 0.5
    halves = []
    for part in (np.nonzero(mask)[0], np.nonzero(~mask)[0]):
        halves.append(_result("partition", frame, part, bound_d=k, bound_e=be, seed=seed))
    if not applicable:
        for h in halves:
            h.status = "bound-inapplicable"
    return PartitionResult(halves[0], halves[1], r_star, k, applicable)


def partition_degradations(frame, trials, seed=None, frame_tol=1e-10):
    """Repeated random halving; trial ``k`` uses child stream ``k`` of ``seed``.

    Returns ``(both_frames, max_loss, min_loss)`` arrays of relative ``rho_d``
    loss, with NaN where a half is not a frame.
    """
    T = frame.T
    S = frame.S
    base = float(np.sum(1.0 / frame.eigen_S))
    both = np.zeros(trials, dtype=bool)
    hi = np.full(trials, np.nan)
    lo = np.full(trials, np.nan)
    for k in range(trials):
        mask = _io.stream_rng(seed, k).random(len(frame)) < 0.5
        S1 = T[mask].T @ T[mask]
        S2 = S - S1
        losses = []
        for Sj in (S1, S2):
            lam = np.linalg.eigvalsh(0.5 * (Sj + Sj.T))
            if not (lam[-1] > 0 and lam[0] > frame_tol * lam[-1]):
                break
            losses.append(math.sqrt(np.sum(1.0 / lam) / base) - 1.0)
        if len(losses) == 2:
            both[k] = True
            hi[k], lo[k] = max(losses), min(losses)
    return both, hi, lo


@dataclass(frozen=True)
class GreedyStep:
    step: int
    removed_index: int
    label: tuple
    measure_value: float
    rho_d: float
    rho_e: float
    S_inv: np.ndarray = None


def greedy_sparsify(frame, measure="d", sigma=1.0, max_rel_loss=math.inf,
                    min_keep_ratio=0.5, removal_tol=1e-8, keep_inverses=False):
    """Remove components one at a time, cheapest first, via rank-one updates.

    For ``measure="d"`` the cheapest component minimizes
    ``||S^{-1} phi||^2 / (1 - phi^T S^{-1} phi)``; for ``"e"`` it minimizes
    the leverage ``phi^T S^{-1} phi``. A removal is performed only if the
    loss stays within ``max_rel_loss`` (relative for d, absolute rho_e
    difference for e) and at least ``min_keep_ratio`` of the components
    survive. Candidates with ``1 - leverage <= removal_tol`` are never
    removed; when only such remain the run ends with status
    ``"frame-critical"``.
    """
    if measure not in ("d", "e"):
        raise ParameterError("measure must be 'd' or 'e'")
    if not sigma > 0:
        raise ParameterError("sigma must be positive")
    if not 0 < min_keep_ratio < 1:
        raise ParameterError("min_keep_ratio must lie in (0, 1)")
    if not max_rel_loss > 0:
        raise ParameterError("max_rel_loss must be positive")
    if not is_frame(frame):
        raise NotAFrameError("greedy sparsification needs a frame")

    T = frame.T
    m0 = len(frame)
    alive = np.ones(m0, dtype=bool)
    Sinv = frame.S_inv.copy()
    rho_d0 = measure_rho_d(frame, sigma)
    rho_e0 = measure_rho_e(frame)
    rho_d_sq, rho_e = rho_d0**2, rho_e0
    trace = []
    status = "sparsity-limit"
    while True:
        if (alive.sum() - 1) / m0 < min_keep_ratio:
            status = "sparsity-limit"
            break
        idx = np.nonzero(alive)[0]
        Ta = T[idx]
        X = Ta @ Sinv
        lev = np.einsum("ij,ij->i", X, Ta)
        gap = 1.0 - lev
        valid = gap > removal_tol
        if not valid.any():
            status = "frame-critical"
            break
        if measure == "d":
            score = np.einsum("ij,ij->i", X, X) / np.where(valid, gap, 1.0)
        else:
            score = lev.copy()
        score[~valid] = np.inf
        j = int(np.argmin(score))
        u = X[j]
        new_d_sq = rho_d_sq + sigma**2 * float(u @ u) / gap[j]
        new_e = rho_e - math.log(gap[j])
        if measure == "d":
            loss = (math.sqrt(new_d_sq) - rho_d0) / rho_d0
        else:
            loss = new_e - rho_e0
        if loss > max_rel_loss:
            status = "loss-limit"
            break
        Sinv = Sinv + np.outer(u, u) / gap[j]
        Sinv = 0.5 * (Sinv + Sinv.T)
        rho_d_sq, rho_e = new_d_sq, new_e
        k = int(idx[j])
        alive[k] = False
        trace.append(GreedyStep(step=len(trace) + 1, removed_index=k, label=frame.labels[k],
                                measure_value=math.sqrt(rho_d_sq) if measure == "d" else rho_e,
                                rho_d=math.sqrt(rho_d_sq), rho_e=rho_e,
                                S_inv=Sinv.copy() if keep_inverses else None))
    res = _result("greedy-" + measure, frame, np.nonzero(alive)[0], status=status,
                  info={"measure": measure, "sigma": float(sigma),
                        "max_rel_loss": float(max_rel_loss),
                        "min_keep_ratio": float(min_keep_ratio), "removed": len(trace)})
    res.trace = trace
    return res


def trace_csv(trace):
    """Elimination trace as CSV text."""
    return _io.csv_text(["step", "removed_location", "removed_time", "measure_value"],
                        ([s.step, s.label[0], float(s.label[1]), s.measure_value] for s in trace))
