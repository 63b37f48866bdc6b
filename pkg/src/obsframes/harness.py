"""Experiment orchestration: desk-scale versions of the numerical studies.

Every experiment is a pure function of its ``ExperimentConfig``; outputs are
text blobs (CSV/JSON) keyed by file name, so a replay with the same config
reproduces them byte for byte. Wall-clock timings are returned separately
and never written into output files.
"""

import dataclasses
import math
import os
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _io
from .errors import NotAFrameError, ObsFrameError, ParameterError
from .estimation import dwell_bound_rho_d, measure_rho_d, measure_rho_e, shift_frame
from .framecore import build_frame, is_frame, leverage_scores
from .limits import limit_report
from .netmodel import LtiNetwork, generate_geometric_network, is_observable
from .sampling import (SamplingStrategy, _window_times, delta_star, full_state_strategy,
                       periodic_strategy, random_strategy)
from .sparsify import (default_q, greedy_sparsify, kappa, partition_degradations,
                       randomized_sparsify, KS_THRESHOLD)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "RunResult",
    "derive_seed",
    "make_network",
    "make_strategy",
    "run_experiment",
    "sequential_frames",
    "sequential_strategy",
]

EXPERIMENTS = ("build", "sparsify_random", "partition_hist", "compare", "sequential",
               "dwell_curve", "limits")


def derive_seed(seed, index):
    """64-bit child seed ``index`` of a master seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ExperimentConfig:
    experiment: str = "build"
    network: dict = field(default_factory=lambda: {"n": 20, "a": 1.0, "b": 0.5, "d": 0.3})
    strategy: dict = field(default_factory=lambda: {"kind": "random", "samples_per_location": 24,
                                                    "tau": 0.12})
    sigma: float = 0.1
    seed: int = 0
    q: int = None
    epsilon: float = 0.5
    measure: str = "d"
    min_keep_ratio: float = 0.2
    max_rel_loss: float = math.inf
    trials: int = 10_000
    bins: int = 40
    q_grid: list = None
    repeats: int = 5
    N: int = 12
    window: float = None
    deltas: list = None
    gramian_delta: float = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ParameterError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if not self.sigma > 0:
            raise ParameterError("sigma must be positive")
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(_io.loads(text))

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class RunResult:
    summary: dict
    files: dict
    timings: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.summary.get("status") == "ok"

    def write(self, directory):
        os.makedirs(directory, exist_ok=True)
        for name, text in self.files.items():
            _io.write_text(os.path.join(directory, name), text)


def make_network(spec, seed=None):
    """Network from an inline ``{"A": ...}`` spec or generator parameters."""
    if "A" in spec:
        return LtiNetwork.from_dict(spec)
    params = {k: spec[k] for k in ("a", "b", "d") if k in spec}
    s = spec.get("seed", seed)
    return generate_geometric_network(spec.get("n", 20), seed=s, **params)


def sequential_strategy(network, N, window=None, seed=None, t0=0.0):
    """``N`` full-state rounds, round ``j`` drawn uniformly in ``[t0 + j w, t0 + (j+1) w)``."""
    if N < 1:
        raise ParameterError("N must be at least 1")
    if window is None:
        window = delta_star(network)
    elif window > math.log(2.0) / network.norm2:
        warnings.warn("window exceeds ln2/||A||; subframes are not guaranteed to be frames",
                      stacklevel=2)
    rng = _io.make_rng(seed)
    entries = []
    for j in range(N):
        times = _window_times(rng, network.n, t0 + j * window, window)
        entries.extend((i, float(t)) for i, t in enumerate(times))
    return SamplingStrategy(entries)


def sequential_frames(network, N, window=None, seed=None):
    """Union of ``N`` consecutive full-state subframes."""
    return build_frame(network, sequential_strategy(network, N, window, seed))


def make_strategy(network, spec, seed=None):
    kind = spec.get("kind", "random")
    omega = spec.get("omega")
    if kind == "random":
        return random_strategy(network, omega, spec.get("samples_per_location", 24),
                               spec.get("tau", 0.12), seed)
    if kind == "periodic":
        return periodic_strategy(network, omega, spec.get("horizon"), spec["delta"])
    if kind == "full_state":
        return full_state_strategy(network, spec.get("t_star", 0.0), seed)
    if kind == "sequential":
        return sequential_strategy(network, spec.get("N", 12), spec.get("window"), seed)
    raise ParameterError(f"unknown strategy kind {kind!r}")


def _strategy_file(strategy, fmt):
    if fmt == "json":
        return {"strategy.json": strategy.to_json()}
    return {"strategy.csv": strategy.to_csv()}


def _frame_summary(frame, sigma):
    check = is_frame(frame)
    out = {"components": len(frame), "is_frame": check.is_frame,
           "alpha": check.alpha, "beta": check.beta}
    if check:
        out["rho_d"] = measure_rho_d(frame, sigma)
        out["rho_e"] = measure_rho_e(frame)
        out["r_star"] = float(leverage_scores(frame).max())
    return out


def _setup(cfg):
    net_seed = derive_seed(cfg.seed, 0)
    network = make_network(cfg.network, net_seed)
    strategy = make_strategy(network, cfg.strategy, derive_seed(cfg.seed, 1))
    if not is_observable(network.A, strategy.locations(network.n)):
        raise NotAFrameError("sampling locations make (A, C_omega) unobservable")
    frame = build_frame(network, strategy)
    if not is_frame(frame):
        raise NotAFrameError("the configured strategy does not produce a frame")
    return network, strategy, frame


def _exp_build(cfg, fmt):
    network, strategy, frame = _setup(cfg)
    spec = network.spectral
    summary = {"n": network.n, "samples": len(strategy), "locations": len(strategy.omega),
               "theta_bar": strategy.theta_bar, "minpoly_degree": spec.minpoly_degree,
               "norm2": network.norm2, "delta_star": delta_star(network)}
    summary.update(_frame_summary(frame, cfg.sigma))
    files = {"network.json": network.to_json(), "frame.csv": frame.to_csv()}
    files.update(_strategy_file(strategy, fmt))
    return summary, files, {}


def _exp_sparsify_random(cfg, fmt):
    network, strategy, frame = _setup(cfg)
    q = cfg.q or default_q(network.n, cfg.epsilon)
    res = randomized_sparsify(frame, q, cfg.epsilon, derive_seed(cfg.seed, 2))
    summary = {"original": _frame_summary(frame, cfg.sigma), "result": res.to_dict(),
               "within_bound_d": res.within_bound_d, "within_bound_e": res.within_bound_e,
               "reduction": 1.0 - res.size / len(frame)}
    if res.is_frame:
        summary["rho_d_sparse"] = measure_rho_d(res.frame_s, cfg.sigma)
    files = {"sparsified_" + k: v for k, v in _strategy_file(res.kept, fmt).items()}
    return summary, files, {}


def _exp_partition_hist(cfg, fmt):
    network, strategy, frame = _setup(cfg)
    r_star = float(leverage_scores(frame).max())
    k = kappa(r_star)
    both, hi, lo = partition_degradations(frame, cfg.trials, derive_seed(cfg.seed, 2))
    good = hi[both]
    summary = {"trials": cfg.trials, "components": len(frame), "r_star": r_star,
               "kappa": k, "bound_applicable": r_star < KS_THRESHOLD,
               "fraction_both_frames": float(both.mean())}
    if good.size:
        summary.update({
            "median_max_degradation": float(np.median(good)),
            "median_min_degradation": float(np.median(lo[both])),
            "fraction_max_within_kappa": float(np.mean(good <= k)),
            "fraction_max_below_0.55": float(np.mean(good < 0.55)),
        })
        top = float(max(good.max(), 1e-12))
        edges = np.linspace(0.0, top, cfg.bins + 1)
        c_hi, _ = np.histogram(good, edges)
        c_lo, _ = np.histogram(lo[both], edges)
        rows = [(float(edges[b]), float(edges[b + 1]), int(c_hi[b]), int(c_lo[b]))
                for b in range(cfg.bins)]
    else:
        rows = []
    files = {"partition_histogram.csv": _io.csv_text(
        ["bin_left", "bin_right", "max_degradation_count", "min_degradation_count"], rows)}
    return summary, files, {}


def _exp_compare(cfg, fmt):
    network, strategy, frame = _setup(cfg)
    n, m = network.n, len(frame)
    q_grid = cfg.q_grid or sorted({int(round(m * f)) for f in (0.5, 0.8, 1.2, 2.0)})
    rows = []
    t0 = time.perf_counter()
    rand_pts = []
    for qi, q in enumerate(q_grid):
        best = None
        for r in range(cfg.repeats):
            res = randomized_sparsify(frame, q, cfg.epsilon, derive_seed(cfg.seed, 1000 + qi * 997 + r))
            if res.is_frame:
                val = measure_rho_d(res.frame_s, cfg.sigma)
                if best is None or val < best[1]:
                    best = (res.size, val)
        if best is not None:
            rand_pts.append(best)
            rows.append(("randomized", q, best[0], best[1]))
    t_rand = time.perf_counter() - t0

    t0 = time.perf_counter()
    smallest = min([p[0] for p in rand_pts] + [m]) / m
    keep = max(min(smallest * 0.99, 0.99), (n + 1) / m)
    g = greedy_sparsify(frame, "d", cfg.sigma, math.inf, keep)
    t_greedy = time.perf_counter() - t0
    rho0 = measure_rho_d(frame, cfg.sigma)
    greedy_curve = {m: rho0}
    for st in g.trace:
        greedy_curve[m - st.step] = st.rho_d
    for size in sorted(greedy_curve, reverse=True):
        rows.append(("greedy", "", size, greedy_curve[size]))

    matched = []
    for size, val in rand_pts:
        if size in greedy_curve:
            matched.append({"size": size, "randomized": val, "greedy": greedy_curve[size],
                            "ratio": val / greedy_curve[size]})
    summary = {"components": m, "rho_d": rho0, "q_grid": q_grid, "repeats": cfg.repeats,
               "matched": matched,
               "max_relative_gap": max((abs(x["ratio"] - 1) for x in matched), default=None)}
    files = {"compare.csv": _io.csv_text(["method", "q", "kept_count", "rho_d"], rows)}
    return summary, files, {"randomized_s": t_rand, "greedy_s": t_greedy}


def _exp_sequential(cfg, fmt):
    network = make_network(cfg.network, derive_seed(cfg.seed, 0))
    strategy = sequential_strategy(network, cfg.N, cfg.window, derive_seed(cfg.seed, 1))
    frame = build_frame(network, strategy)
    n = network.n
    subs = []
    for j in range(cfg.N):
        sub = frame.subframe(range(j * n, (j + 1) * n))
        subs.append(_frame_summary(sub, cfg.sigma))
    union = _frame_summary(frame, cfg.sigma)
    if not union["is_frame"]:
        raise NotAFrameError("sequential union is not a frame")
    summary = {"N": cfg.N, "window": cfg.window if cfg.window else delta_star(network),
               "delta_star": delta_star(network), "union": union, "subframes": subs}
    files = {"network.json": network.to_json()}
    files.update(_strategy_file(strategy, fmt))
    return summary, files, {}


def _exp_dwell_curve(cfg, fmt):
    network = make_network(cfg.network, derive_seed(cfg.seed, 0))
    strategy = full_state_strategy(network, 0.0, derive_seed(cfg.seed, 1))
    frame = build_frame(network, strategy)
    if not is_frame(frame):
        raise NotAFrameError("full-state frame is singular")
    deltas = cfg.deltas if cfg.deltas is not None else np.linspace(0.0, 0.5, 51).tolist()
    rows = []
    dominated = True
    for d in deltas:
        shifted = shift_frame(frame, d)
        rd = measure_rho_d(shifted, cfg.sigma)
        bound = dwell_bound_rho_d(frame, d, cfg.sigma)
        dominated &= rd <= bound * (1 + 1e-12)
        rows.append((float(d), rd, bound))
    summary = {"points": len(rows), "bound_dominates": bool(dominated),
               "rho_d_at_0": rows[0][1] if rows else None}
    files = {"dwell_curve.csv": _io.csv_text(["delta", "rho_d", "bound"], rows)}
    return summary, files, {}


def _exp_limits(cfg, fmt):
    network, strategy, frame = _setup(cfg)
    rd, re = measure_rho_d(frame, cfg.sigma), measure_rho_e(frame)
    rep = limit_report(network, strategy, cfg.sigma, cfg.gramian_delta, rd, re)
    summary = {"rho_d": rd, "rho_e": re, "limits": rep.to_dict(),
               "lower_bounds_hold": bool(rd >= rep.lower_rho_d and re >= rep.lower_rho_e)}
    return summary, {"limits.json": rep.to_json()}, {}


_RUNNERS = {
    "build": _exp_build,
    "sparsify_random": _exp_sparsify_random,
    "partition_hist": _exp_partition_hist,
    "compare": _exp_compare,
    "sequential": _exp_sequential,
    "dwell_curve": _exp_dwell_curve,
    "limits": _exp_limits,
}


def run_experiment(config, output_dir=None, fmt="csv"):
    """Run one experiment; infeasible configurations yield ``status="infeasible"``."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    record = {"config": config.to_dict(), "rng": _io.RNG_ALGORITHM,
              "derived_seeds": {"network": derive_seed(config.seed, 0),
                                "strategy": derive_seed(config.seed, 1),
                                "method": derive_seed(config.seed, 2)}}
    try:
        summary, files, timings = _RUNNERS[config.experiment](config, fmt)
        summary = {"status": "ok", "experiment": config.experiment, **summary}
    except ObsFrameError as exc:
        summary = {"status": "infeasible", "experiment": config.experiment,
                   "error": {"type": type(exc).__name__, "message": str(exc)}}
        files, timings = {}, {}
    files = dict(files)
    files["run.json"] = _io.dumps(record)
    files["summary.json"] = _io.dumps(summary)
    result = RunResult(summary, files, timings)
    if output_dir is not None:
        result.write(output_dir)
    return result
