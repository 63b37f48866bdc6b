"""Estimation measures of a frame, noisy estimation and dwell-time effects."""

from dataclasses import dataclass

import numpy as np

from . import _io
from .errors import NotAFrameError, ParameterError
from .framecore import ObservabilityFrame, is_frame
from .netmodel import matrix_exponential

__all__ = [
    "EstimationReport",
    "MonteCarloReport",
    "measure_rho_d",
    "measure_rho_e",
    "estimation_report",
    "differential_entropy",
    "estimate_noisy",
    "shift_frame",
    "dwell_bound_rho_d",
    "shift_entropy_correction",
]


def _frame_eigs(frame):
    check = is_frame(frame)
    if not check:
        raise NotAFrameError(f"not a frame (lambda_1={check.alpha:.3g}, lambda_n={check.beta:.3g})")
    return frame.eigen_S


def _check_sigma(sigma):
    if not sigma > 0:
        raise ParameterError("noise standard deviation must be positive")


def measure_rho_d(frame, sigma):
    """Standard deviation of the least-squares error, ``sigma * sqrt(sum 1/lambda_i)``."""
    _check_sigma(sigma)
    lam = _frame_eigs(frame)
    return float(sigma * np.sqrt(np.sum(1.0 / lam)))


def measure_rho_e(frame):
    """Spectral part of the error entropy, ``-sum log lambda_i``."""
    lam = _frame_eigs(frame)
    return float(-np.sum(np.log(lam)))


def differential_entropy(frame, sigma):
    n = frame.n
    return 0.5 * measure_rho_e(frame) + 0.5 * n * (1.0 + np.log(2 * np.pi * sigma**2))


@dataclass(frozen=True)
class EstimationReport:
    rho_d: float
    rho_e: float
    sigma: float
    eigenvalues: np.ndarray

    def to_dict(self):
        return {"rho_d": self.rho_d, "rho_e": self.rho_e, "sigma": self.sigma,
                "eigenvalues": [float(v) for v in self.eigenvalues]}


def estimation_report(frame, sigma):
    lam = _frame_eigs(frame)
    return EstimationReport(measure_rho_d(frame, sigma), measure_rho_e(frame), float(sigma),
                            lam.copy())


@dataclass
class MonteCarloReport:
    trials: int
    sigma: float
    estimates: np.ndarray  # trials x n
    mean_error_norm_sq: float
    sample_mean_estimate: np.ndarray
    sample_error_covariance: np.ndarray
    rho_d_theoretical: float
    covariance_frobenius_error: float

    @property
    def rms_error(self):
        return float(np.sqrt(self.mean_error_norm_sq))

    def to_dict(self):
        return {"trials": self.trials, "sigma": self.sigma,
                "mean_error_norm_sq": self.mean_error_norm_sq,
                "rho_d_theoretical": self.rho_d_theoretical,
                "covariance_frobenius_error": self.covariance_frobenius_error}

    def to_json(self):
        return _io.dumps(self.to_dict())


def estimate_noisy(frame, x0, sigma, trials=1000, seed=None):
    """Monte-Carlo least-squares estimation from ``T x0 + noise``.

    Trial ``k`` draws its noise from child stream ``k`` of ``seed``.
    """
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    if sigma < 0:
        raise ParameterError("sigma must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    m = len(frame)
    y = frame.T @ x0
    noise = np.empty((m, trials))
    for k in range(trials):
        noise[:, k] = _io.stream_rng(seed, k).standard_normal(m)
    Y = y[:, None] + sigma * noise
    X = frame.solve(frame.T.T @ Y)  # n x trials
    err = X - x0[:, None]
    mean_sq = float(np.mean(np.sum(err**2, axis=0)))
    cov = err @ err.T / trials
    target = sigma**2 * frame.S_inv
    rho_d = measure_rho_d(frame, sigma) if sigma > 0 else 0.0
    return MonteCarloReport(
        trials=int(trials), sigma=float(sigma), estimates=X.T.copy(),
        mean_error_norm_sq=mean_sq, sample_mean_estimate=X.mean(axis=1),
        sample_error_covariance=cov, rho_d_theoretical=rho_d,
        covariance_frobenius_error=float(np.linalg.norm(cov - target, "fro")))


def _state_matrix(frame, A):
    if A is None:
        A = frame.A
    if A is None:
        raise ParameterError("shifting requires the state matrix (frame was not built from a network)")
    return getattr(A, "A", A)


def shift_frame(frame, delta, A=None):
    """Frame sampled ``delta`` later: rows ``T exp(A delta)``, labels ``(i, t + delta)``."""
    A = _state_matrix(frame, A)
    if delta == 0:
        return ObservabilityFrame(frame.T, list(frame.labels), A)
    B = matrix_exponential(A, delta)
    labels = [(lab[0], lab[1] + delta) for lab in frame.labels]
    return ObservabilityFrame(frame.T @ B, labels, A)


def dwell_bound_rho_d(frame, delta, sigma, A=None):
    """Upper bound on ``rho_d`` of the frame shifted by ``delta``.

    Both sequences are sorted ascending before pairing: the squared singular
    values of ``exp(-A delta)`` and the eigenvalues of ``S^{-1}``.
    """
    _check_sigma(sigma)
    A = _state_matrix(frame, A)
    lam = _frame_eigs(frame)
    sv = np.sort(np.linalg.svd(matrix_exponential(A, -delta), compute_uv=False))
    inv = np.sort(1.0 / lam)
    return float(sigma * np.sqrt(np.sum(sv**2 * inv)))


def shift_entropy_correction(A, delta):
    """``rho_e(shifted) - rho_e`` for a shift by ``delta``: ``-sum log sigma_i^2(exp(A delta))``."""
    A = getattr(A, "A", A)
    sv = np.linalg.svd(matrix_exponential(A, delta), compute_uv=False)
    return float(-np.sum(np.log(sv**2)))
