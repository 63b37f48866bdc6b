"""Lower bounds on the estimation measures and space-time tradeoffs."""

import math
from dataclasses import dataclass

import numpy as np

from . import _io
from .errors import NotAFrameError, ParameterError, PreconditionError
from .netmodel import SamplingLocations, is_observable, matrix_exponential
from .sampling import check_step_size

__all__ = [
    "LimitReport",
    "nu_of",
    "sample_count_bounds",
    "solve_discrete_lyapunov",
    "gramian",
    "gramian_limit",
    "tradeoff_thresholds",
    "limit_report",
    "KRONECKER_MAX_N",
]

KRONECKER_MAX_N = 60


def nu_of(network, strategy):
    """Largest spectral norm of ``exp(A t)`` over the sampled times."""
    if len(strategy) == 0:
        raise ParameterError("strategy is empty")
    times = sorted({t for _, t in strategy})
    return max(float(np.linalg.norm(matrix_exponential(network.A, t), 2)) for t in times)


def sample_count_bounds(network, strategy, sigma, nu=None):
    """``(sigma n / (nu sqrt|S|), n log(n / (nu^2 |S|)))``."""
    if not sigma > 0:
        raise ParameterError("sigma must be positive")
    if nu is None:
        nu = nu_of(network, strategy)
    n, m = network.n, len(strategy)
    return sigma * n / (nu * math.sqrt(m)), n * math.log(n / (nu**2 * m))


def solve_discrete_lyapunov(F, W, method=None, tol=1e-14, max_iter=200):
    """Solve ``F^T Q F - Q + W = 0`` for ``Q`` (F Schur stable).

    ``method`` is ``"kronecker"`` (dense solve of the vectorized system) or
    ``"doubling"`` (``Q <- Q + F^T Q F``, ``F <- F^2``); by default the
    former is used up to ``KRONECKER_MAX_N`` states.
    """
    F = np.asarray(F, dtype=float)
    W = np.asarray(W, dtype=float)
    n = F.shape[0]
    if np.max(np.abs(np.linalg.eigvals(F))) >= 1.0:
        raise PreconditionError("F is not Schur stable; the Lyapunov series diverges")
    if method is None:
        method = "kronecker" if n <= KRONECKER_MAX_N else "doubling"
    if method == "kronecker":
        K = np.eye(n * n) - np.kron(F.T, F.T)
        Q = np.linalg.solve(K, W.ravel()).reshape(n, n)
    elif method == "doubling":
        Q, G = W.copy(), F.copy()
        for _ in range(max_iter):
            step = G.T @ Q @ G
            Q = Q + step
            G = G @ G
            if not np.all(np.isfinite(Q)):
                raise PreconditionError("Lyapunov doubling overflowed")
            if np.linalg.norm(step) <= tol * np.linalg.norm(Q):
                break
        else:
            raise PreconditionError("Lyapunov doubling did not converge; is F Schur stable?")
    else:
        raise ParameterError(f"unknown method {method!r}")
    return 0.5 * (Q + Q.T)


def _locations(network, locations):
    if isinstance(locations, SamplingLocations):
        return locations
    if locations is None:
        return SamplingLocations.all(network.n)
    return SamplingLocations(tuple(locations), network.n)


def gramian(network, locations, delta, hurwitz_margin=1e-10):
    """Discrete observability Gramian of ``(exp(A delta), C_omega)`` after precondition checks."""
    locations = _locations(network, locations)
    if not network.is_hurwitz(hurwitz_margin):
        raise PreconditionError("state matrix is not Hurwitz; the Gramian series diverges")
    check_step_size(network, delta)
    F = matrix_exponential(network.A, delta)
    if not is_observable(F, locations):
        raise PreconditionError("(exp(A delta), C_omega) is not observable")
    C = locations.c_matrix
    Q = solve_discrete_lyapunov(F, C.T @ C)
    return Q


def gramian_limit(network, locations, delta, sigma):
    """Sample-count independent bounds ``(sigma sqrt(tr Q^-1), -tr log Q)``."""
    if not sigma > 0:
        raise ParameterError("sigma must be positive")
    Q = gramian(network, locations, delta)
    lam = np.linalg.eigvalsh(Q)
    if lam[0] <= 1e-12 * lam[-1]:
        raise NotAFrameError("Gramian is numerically singular; check observability of the sampled locations")
    return float(sigma * math.sqrt(np.sum(1.0 / lam))), float(-np.sum(np.log(lam)))


def tradeoff_thresholds(n, sigma, nu_star, rho_d_star, rho_e_star):
    """Minimum total sample counts ``theta_bar * |omega|`` for the two measures."""
    for name, v in (("n", n), ("sigma", sigma), ("nu_star", nu_star), ("rho_d_star", rho_d_star)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive")
    return (sigma * n / (nu_star * rho_d_star)) ** 2, (n / nu_star**2) * math.exp(-rho_e_star / n)


@dataclass
class LimitReport:
    nu: float
    lower_rho_d: float
    lower_rho_e: float
    gramian_lower_rho_d: float = None
    gramian_lower_rho_e: float = None
    tradeoff_min_samples_d: float = None
    tradeoff_min_samples_e: float = None
    total_samples: int = 0
    inputs: dict = None
    notes: list = None

    def to_dict(self):
        return {"nu": self.nu, "lower_rho_d": self.lower_rho_d, "lower_rho_e": self.lower_rho_e,
                "gramian_lower_rho_d": self.gramian_lower_rho_d,
                "gramian_lower_rho_e": self.gramian_lower_rho_e,
                "tradeoff_min_samples_d": self.tradeoff_min_samples_d,
                "tradeoff_min_samples_e": self.tradeoff_min_samples_e,
                "total_samples": self.total_samples,
                "inputs": self.inputs or {}, "notes": self.notes or []}

    def to_json(self):
        return _io.dumps(self.to_dict())


def limit_report(network, strategy, sigma, delta=None, rho_d=None, rho_e=None):
    """All limits for one (network, strategy) pair.

    The tradeoff thresholds are evaluated at ``nu* = nu`` and the supplied
    measured ``rho_d`` / ``rho_e``; the Gramian part needs ``delta`` and a
    Hurwitz state matrix and is skipped with a note otherwise.
    """
    nu = nu_of(network, strategy)
    lo_d, lo_e = sample_count_bounds(network, strategy, sigma, nu)
    rep = LimitReport(nu=nu, lower_rho_d=lo_d, lower_rho_e=lo_e, total_samples=len(strategy),
                      inputs={"n": network.n, "sigma": float(sigma), "delta": delta,
                              "omega": list(strategy.omega)},
                      notes=[])
    if rho_d is not None and rho_e is not None:
        rep.tradeoff_min_samples_d, rep.tradeoff_min_samples_e = tradeoff_thresholds(
            network.n, sigma, nu, rho_d, rho_e)
    if delta is not None:
        try:
            rep.gramian_lower_rho_d, rep.gramian_lower_rho_e = gramian_limit(
                network, strategy.locations(network.n), delta, sigma)
        except (PreconditionError, NotAFrameError) as exc:
            rep.notes.append(f"gramian limit unavailable: {exc}")
        except ParameterError as exc:
            rep.notes.append(f"gramian limit unavailable: {exc}")
    return rep
