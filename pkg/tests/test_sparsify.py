import math

import numpy as np
import pytest
import scipy.linalg as sla

from obsframes import (NotAFrameError, ObservabilityFrame, ParameterError, build_frame,
                       exact_chi, generate_geometric_network, greedy_sparsify, is_frame, kappa,
                       leverage_scores, measure_rho_d, measure_rho_e, random_partition,
                       random_strategy, randomized_sparsify)
from obsframes.sparsify import (KS_THRESHOLD, default_q, partition_degradations,
                                partition_entropy_bound, sampling_distribution, trace_csv)


def gaussian_frame(m, n, seed):
    return ObservabilityFrame.from_vectors(np.random.default_rng(seed).standard_normal((m, n)))


def network_frame(n=8, M=10, seed=0):
    net = generate_geometric_network(n, d=0.6, seed=seed)
    return build_frame(net, random_strategy(net, None, M, 0.3, seed=seed))


# randomized

def test_sampling_distribution_sums_to_one(corpus):
    for f in corpus:
        if is_frame(f):
            p = sampling_distribution(f)
            assert p.sum() == pytest.approx(1.0, abs=1e-10) and np.all(p > 0)


def test_default_q():
    assert default_q(20, 0.5) == math.ceil(4 * 20 * math.log(20) / 0.25) == 959


def test_randomized_weights_and_bounds():
    f = network_frame()
    res = randomized_sparsify(f, 300, 0.5, seed=4)
    pi = sampling_distribution(f)
    draws = res.weights * 300 * pi
    assert np.allclose(draws, np.round(draws)) and round(draws.sum()) == 300
    assert set(np.nonzero(res.weights)[0]) == set(res.kept_indices)
    w_max = res.weights.max()
    assert res.bound_d == pytest.approx(-1 + math.sqrt(4 * w_max / 0.5))
    assert res.bound_e == pytest.approx(f.n * math.log(4 * w_max / 0.5))
    assert list(res.kept) == [f.labels[k] for k in res.kept_indices]


def test_randomized_deterministic():
    f = network_frame()
    a = randomized_sparsify(f, 100, 0.5, seed=1)
    b = randomized_sparsify(f, 100, 0.5, seed=1)
    assert np.array_equal(a.kept_indices, b.kept_indices)


def test_randomized_orthonormal_copies_exact():
    # four copies of an orthonormal basis: sparsifying with many draws stays a frame
    f = ObservabilityFrame.from_vectors(np.vstack([np.eye(3)] * 4) / 2.0)
    res = randomized_sparsify(f, 200, 0.9, seed=0)
    assert res.is_frame and res.within_bound_d and res.within_bound_e


def test_randomized_epsilon_range():
    f = network_frame(n=4)
    with pytest.raises(ParameterError):
        randomized_sparsify(f, 10, 0.4, seed=0)  # 1/sqrt(4) = 0.5
    res = randomized_sparsify(f, 10, 1.0, seed=0)
    assert res.bound_d == math.inf


def test_randomized_requires_frame(rot):
    f = ObservabilityFrame.from_vectors(np.array([[1.0, 0.0], [2.0, 0.0]]))
    with pytest.raises(NotAFrameError):
        randomized_sparsify(f, 10, 0.9, seed=0)


def test_exact_chi_against_generalized_eigenproblem():
    f = network_frame(6, 8, seed=3)
    res = randomized_sparsify(f, 100, 0.5, seed=2)
    w = res.weights
    T = f.T
    W1 = (T * w[:, None]).T @ T
    W2 = (T * (w**2)[:, None]).T @ T
    oracle = sla.eigh(W2, W1, eigvals_only=True)[-1]
    chi = exact_chi(f, w)
    assert chi == pytest.approx(oracle, rel=1e-6)
    assert chi <= w.max() * (1 + 1e-12)


# partition

def test_kappa_values():
    assert kappa(0.0) == pytest.approx(math.sqrt(2) - 1)
    assert kappa(KS_THRESHOLD) == math.inf
    assert kappa(0.2) == math.inf
    r = 0.02
    assert kappa(r) == pytest.approx((1 - (math.sqrt(2 * r) + 1) ** 2 / 2) ** -0.5 - 1)
    assert partition_entropy_bound(r, 5) == pytest.approx(-5 * math.log(1 - (math.sqrt(0.04) + 1) ** 2 / 2))


def test_kappa_monotone():
    rs = np.linspace(0, KS_THRESHOLD * 0.999, 50)
    ks = [kappa(r) for r in rs]
    assert all(b > a for a, b in zip(ks, ks[1:]))


def test_random_partition_halves_disjoint():
    f = network_frame(5, 20, seed=1)
    p = random_partition(f, seed=3)
    a, b = set(p.first.kept_indices), set(p.second.kept_indices)
    assert not (a & b) and a | b == set(range(len(f)))
    assert p.r_star == pytest.approx(leverage_scores(f).max())


def test_random_partition_inapplicable_flag():
    f = ObservabilityFrame.from_vectors(np.eye(3))
    p = random_partition(f, seed=0)
    assert not p.bound_applicable and p.kappa == math.inf
    assert p.first.status == "bound-inapplicable"


def test_partition_degradations_consistent_with_single_partitions():
    f = network_frame(4, 30, seed=2)
    both, hi, lo = partition_degradations(f, 20, seed=9)
    assert both.dtype == bool and np.all(np.isnan(hi[~both]))
    assert np.all(hi[both] >= lo[both])
    # halves lose information
    assert np.all(lo[both] >= -1e-12)


def test_partition_monte_carlo_orthonormal_copies():
    # 4n scaled copies of an orthonormal basis; each half is a frame unless a basis vector
    # lands entirely in one half (probability 2 n / 16 per half-pair)
    n = 3
    f = ObservabilityFrame.from_vectors(np.vstack([np.eye(n)] * 4) / 2.0)
    both, hi, _ = partition_degradations(f, 2000, seed=0)
    expected = (1 - 2 / 16) ** n
    assert abs(both.mean() - expected) <= 4 * math.sqrt(expected * (1 - expected) / 2000)


# greedy

def brute_force_greedy_order(frame, sigma, steps):
    alive = list(range(len(frame)))
    order = []
    for _ in range(steps):
        best = None
        for k in alive:
            sub = frame.subframe([j for j in alive if j != k])
            if not is_frame(sub):
                continue
            v = measure_rho_d(sub, sigma)
            if best is None or v < best[0] - 1e-12:
                best = (v, k)
        order.append(best[1])
        alive.remove(best[1])
    return order


def test_greedy_matches_brute_force():
    for seed in range(5):
        f = gaussian_frame(12, 4, seed)
        g = greedy_sparsify(f, "d", 1.0, math.inf, 0.5)
        assert [s.removed_index for s in g.trace] == brute_force_greedy_order(f, 1.0, len(g.trace))


def test_sherman_morrison_inverse_oracle():
    f = gaussian_frame(6, 3, 11)
    g = greedy_sparsify(f, "d", 1.0, math.inf, 0.3, keep_inverses=True)
    removed = set()
    for s in g.trace:
        removed.add(s.removed_index)
        sub = f.subframe([k for k in range(len(f)) if k not in removed])
        assert np.allclose(s.S_inv, np.linalg.inv(sub.T.T @ sub.T), rtol=1e-8, atol=1e-10)


def test_greedy_single_step_updates():
    f = gaussian_frame(10, 4, 2)
    g = greedy_sparsify(f, "d", 0.5, math.inf, 0.85)
    (s,) = g.trace
    phi = f.T[s.removed_index]
    u = np.linalg.solve(f.S, phi)
    r = phi @ u
    assert s.rho_d**2 == pytest.approx(measure_rho_d(f, 0.5) ** 2 + 0.25 * (u @ u) / (1 - r), rel=1e-12)
    assert s.rho_e == pytest.approx(measure_rho_e(f) - math.log(1 - r), rel=1e-12)


def test_greedy_trace_monotone_and_consistent():
    f = network_frame(6, 8, seed=5)
    for measure in ("d", "e"):
        g = greedy_sparsify(f, measure, 0.1, math.inf, 0.2)
        vals = [s.measure_value for s in g.trace]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert g.size + len(g.trace) == len(f)
        assert g.is_frame


def test_greedy_ties_remove_earliest():
    f = ObservabilityFrame.from_vectors(np.vstack([np.eye(2)] * 3))
    g = greedy_sparsify(f, "e", 1.0, math.inf, 0.6)
    # first all scores tie; then the e_2 copies score lowest
    assert [s.removed_index for s in g.trace] == [0, 1]


def test_greedy_frame_critical():
    f = ObservabilityFrame.from_vectors(np.vstack([np.eye(3), np.eye(3)[:1]]))
    g = greedy_sparsify(f, "d", 1.0, math.inf, 0.01)
    assert g.status == "frame-critical" and g.size == 3 and g.is_frame


def test_greedy_limits_respected():
    f = network_frame(6, 10, seed=7)
    g = greedy_sparsify(f, "d", 0.1, 0.2, 0.1)
    assert g.status == "loss-limit" and g.realized_loss_d <= 0.2
    h = greedy_sparsify(f, "d", 0.1, math.inf, 0.5)
    assert h.status == "sparsity-limit" and h.size / len(f) >= 0.5
    e = greedy_sparsify(f, "e", 0.1, 1.0, 0.1)
    assert e.realized_loss_e <= 1.0


def test_greedy_rejects_bad_params():
    f = gaussian_frame(6, 2, 0)
    with pytest.raises(ParameterError):
        greedy_sparsify(f, "x")
    with pytest.raises(ParameterError):
        greedy_sparsify(f, "d", min_keep_ratio=1.0)


def test_trace_csv():
    f = gaussian_frame(6, 2, 0)
    g = greedy_sparsify(f, "d", 1.0, math.inf, 0.5)
    lines = trace_csv(g.trace).splitlines()
    assert lines[0] == "step,removed_location,removed_time,measure_value"
    assert len(lines) == len(g.trace) + 1
