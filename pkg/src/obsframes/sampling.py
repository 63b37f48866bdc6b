"""Space-time sampling strategies and the builders that guarantee frames."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _io
from .errors import ParameterError, StepSizeError
from .netmodel import SamplingLocations, is_observable

__all__ = [
    "SamplingStrategy",
    "random_strategy",
    "periodic_strategy",
    "full_state_strategy",
    "delta_star",
    "check_step_size",
    "time_design_matrix",
    "check_time_design",
    "TimeDesignCheck",
]


class SamplingStrategy:
    """Ordered collection of distinct ``(location, time)`` pairs.

    Order is insertion order and is preserved by every derived object (frames,
    sparsification results), since it fixes tie-breaking downstream.
    """

    __slots__ = ("_entries", "_index")

    def __init__(self, entries):
        clean = []
        for i, t in entries:
            if int(i) != i or i < 0:
                raise ParameterError(f"location must be a nonnegative integer, got {i!r}")
            t = float(t)
            if not math.isfinite(t):
                raise ParameterError("sampling times must be finite")
            clean.append((int(i), t))
        index = {}
        for k, e in enumerate(clean):
            if e in index:
                raise ParameterError(f"duplicate sample {e}")
            index[e] = k
        self._entries = tuple(clean)
        self._index = index

    @property
    def entries(self):
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, k):
        return self._entries[k]

    def __contains__(self, entry):
        return (int(entry[0]), float(entry[1])) in self._index

    def __eq__(self, other):
        return isinstance(other, SamplingStrategy) and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self):
        return f"SamplingStrategy({len(self)} samples, {len(self.omega)} locations)"

    def index_of(self, entry):
        return self._index[(int(entry[0]), float(entry[1]))]

    @property
    def locations_array(self):
        return np.array([i for i, _ in self._entries], dtype=int)

    @property
    def times_array(self):
        return np.array([t for _, t in self._entries], dtype=float)

    @property
    def omega(self):
        """Sampled locations in order of first appearance."""
        seen = {}
        for i, _ in self._entries:
            seen.setdefault(i, None)
        return tuple(seen)

    def theta(self, i):
        return sorted(t for j, t in self._entries if j == i)

    @property
    def theta_bar(self):
        """Average number of samples per sampled location."""
        return len(self) / len(self.omega) if self._entries else 0.0

    def locations(self, n):
        return SamplingLocations(self.omega, n)

    def subset(self, indices):
        return SamplingStrategy([self._entries[k] for k in indices])

    def union(self, other):
        return SamplingStrategy(list(self._entries) + list(other.entries))

    def to_records(self):
        return [{"i": i, "t": t} for i, t in self._entries]

    def to_json(self):
        return _io.dumps(self.to_records())

    @classmethod
    def from_json(cls, text):
        return cls((r["i"], r["t"]) for r in _io.loads(text))

    def to_csv(self):
        return _io.csv_text(["location", "time"], self._entries)

    @classmethod
    def from_csv(cls, text):
        header, rows = _io.read_csv(text)
        if header[:2] != ["location", "time"]:
            raise ParameterError("strategy CSV must start with header 'location,time'")
        return cls((int(r[0]), float(r[1])) for r in rows)


def _per_location(values, omega, name):
    if np.isscalar(values):
        values = [values] * len(omega)
    values = [int(v) for v in values]
    if len(values) != len(omega):
        raise ParameterError(f"{name} needs one entry per sampling location")
    return values


def _resolve_locations(network, omega):
    if omega is None:
        return SamplingLocations.all(network.n)
    if isinstance(omega, SamplingLocations):
        return omega
    return SamplingLocations(tuple(omega), network.n)


def random_strategy(network, omega=None, samples_per_location=1, tau=1.0, seed=None):
    """Uniform random times on ``[0, tau]``, drawn independently per location."""
    omega = _resolve_locations(network, omega)
    counts = _per_location(samples_per_location, omega.omega, "samples_per_location")
    if any(c < 1 for c in counts):
        raise ParameterError("each location needs at least one sample")
    if not tau > 0:
        raise ParameterError("tau must be positive")
    rng = _io.make_rng(seed)
    entries = []
    for i, m in zip(omega.omega, counts):
        times = np.unique(rng.uniform(0.0, tau, size=m))
        while times.size < m:
            times = np.unique(np.concatenate([times, rng.uniform(0.0, tau, size=m - times.size)]))
        entries.extend((i, float(t)) for t in times)
    return SamplingStrategy(entries)


def check_step_size(network, delta, tol=1e-9):
    """Distance of ``(lam_m - lam_m') * delta`` to ``2 pi j Z`` over distinct pairs.

    Returns the minimum distance (``inf`` for a single distinct eigenvalue) and
    raises ``StepSizeError`` naming the worst pair when it is below ``tol``.
    """
    if not delta > 0:
        raise ParameterError("step size must be positive")
    lams = network.spectral.distinct_eigenvalues
    best, pair = math.inf, None
    for a in range(len(lams)):
        for b in range(a + 1, len(lams)):
            z = (lams[a] - lams[b]) * delta
            k = round(z.imag / (2 * math.pi))
            dist = abs(z - 2j * math.pi * k)
            if dist < best:
                best, pair = dist, (complex(lams[a]), complex(lams[b]))
    if best < tol:
        raise StepSizeError(
            f"step size {delta!r} puts eigenvalues {pair[0]:.6g} and {pair[1]:.6g} "
            f"on the 2*pi*j lattice (distance {best:.3g})", pair=pair, distance=best)
    return best


def periodic_strategy(network, omega=None, horizon_per_location=None, delta=1.0, tol=1e-9):
    """``Theta_i = {0, delta, ..., (M_i - 1) delta}`` after validating ``delta``."""
    omega = _resolve_locations(network, omega)
    deg = network.spectral.minpoly_degree
    if horizon_per_location is None:
        horizon_per_location = deg
    counts = _per_location(horizon_per_location, omega.omega, "horizon_per_location")
    if any(c < 1 for c in counts):
        raise ParameterError("each location needs at least one sample")
    check_step_size(network, delta, tol)
    short = [i for i, c in zip(omega.omega, counts) if c < deg]
    if short:
        warnings.warn(f"locations {short} have fewer than {deg} samples; "
                      "the frame guarantee does not apply", stacklevel=2)
    return SamplingStrategy((i, k * float(delta)) for i, c in zip(omega.omega, counts)
                            for k in range(c))


def delta_star(network, safety=0.99):
    """Width of the full-state sampling window, ``safety * ln 2 / ||A||``."""
    norm = network.norm2
    if norm == 0:
        raise ParameterError("full-state window is unbounded for A = 0")
    return safety * math.log(2.0) / norm


def _window_times(rng, n, start, width):
    return start + width * rng.random(n)


def full_state_strategy(network, t_star=0.0, seed=None, safety=0.99):
    """One sample per location, all inside ``[t_star, t_star + delta*)``."""
    width = delta_star(network, safety)
    rng = _io.make_rng(seed)
    times = _window_times(rng, network.n, float(t_star), width)
    return SamplingStrategy((i, float(t)) for i, t in enumerate(times))


def time_design_matrix(spectral, times):
    """Rows ``E(t)`` stacked over ``times``; complex, one column per minpoly degree."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        return np.zeros((0, spectral.minpoly_degree), dtype=complex)
    return np.array([spectral.time_row(t) for t in times])


def _column_rank(E, rank_tol):
    if E.shape[0] == 0:
        return 0
    norms = np.linalg.norm(E, axis=0)
    norms[norms == 0] = 1.0
    s = np.linalg.svd(E / norms, compute_uv=False)
    return int(np.sum(s > rank_tol * s[0])) if s.size else 0


@dataclass(frozen=True)
class TimeDesignCheck:
    per_location: dict  # location -> (M_i, full_rank)
    minpoly_degree: int
    observable: bool

    @property
    def sufficient(self):
        """Whether the full-column-rank frame guarantee applies."""
        return self.observable and all(
            m >= self.minpoly_degree and ok for m, ok in self.per_location.values())


def check_time_design(network, strategy, rank_tol=1e-10):
    spec = network.spectral
    deg = spec.minpoly_degree
    report = {}
    for i in strategy.omega:
        times = strategy.theta(i)
        E = time_design_matrix(spec, times)
        report[i] = (len(times), _column_rank(E, rank_tol) == deg)
    observable = is_observable(network.A, strategy.locations(network.n))
    return TimeDesignCheck(report, deg, observable)

