import math
import warnings

import numpy as np
import pytest

from obsframes import (LtiNetwork, ParameterError, SamplingStrategy, StepSizeError, build_frame,
                       check_step_size, check_time_design, delta_star, full_state_strategy,
                       generate_geometric_network, is_frame, periodic_strategy, random_strategy,
                       rotation_network, spectral_info, time_design_matrix)


# strategy container

def test_strategy_basics():
    s = SamplingStrategy([(2, 0.5), (0, 0.1), (2, 0.0)])
    assert len(s) == 3
    assert s.omega == (2, 0)
    assert sorted(s.theta(2)) == [0.0, 0.5]
    assert s.theta_bar == pytest.approx(1.5)
    assert (0, 0.1) in s and (1, 0.1) not in s
    assert s.index_of((2, 0.0)) == 2


def test_strategy_rejects_duplicates_and_nonfinite():
    with pytest.raises(ParameterError):
        SamplingStrategy([(0, 1.0), (0, 1.0)])
    with pytest.raises(ParameterError):
        SamplingStrategy([(0, math.nan)])
    with pytest.raises(ParameterError):
        SamplingStrategy([(-1, 0.0)])


def test_strategy_csv_json_roundtrip():
    s = random_strategy(generate_geometric_network(5, seed=0), None, 3, 0.7, seed=1)
    assert SamplingStrategy.from_csv(s.to_csv()) == s
    assert SamplingStrategy.from_json(s.to_json()) == s
    assert s.to_csv().splitlines()[0] == "location,time"


def test_strategy_csv_header_checked():
    with pytest.raises(ParameterError):
        SamplingStrategy.from_csv("i,t\n0,1.0\n")


# random strategies

def test_random_strategy_size_and_range():
    net = generate_geometric_network(40, seed=2)
    s = random_strategy(net, None, 44, 0.12, seed=3)
    assert len(s) == 1760
    t = s.times_array
    assert np.all((t >= 0) & (t <= 0.12))
    for i in range(40):
        assert len(s.theta(i)) == 44


def test_random_strategy_deterministic():
    net = generate_geometric_network(6, seed=2)
    assert random_strategy(net, None, 4, 1.0, seed=9) == random_strategy(net, None, 4, 1.0, seed=9)
    assert random_strategy(net, None, 4, 1.0, seed=9) != random_strategy(net, None, 4, 1.0, seed=10)


def test_random_strategy_per_location_counts():
    net = generate_geometric_network(3, seed=2)
    s = random_strategy(net, (0, 2), [1, 5], 1.0, seed=0)
    assert len(s.theta(0)) == 1 and len(s.theta(2)) == 5


@pytest.mark.parametrize("kw", [{"samples_per_location": 0}, {"tau": 0.0}, {"omega": (7,)}])
def test_random_strategy_rejects(kw):
    net = generate_geometric_network(3, seed=2)
    with pytest.raises(ParameterError):
        random_strategy(net, seed=0, **kw)


def test_random_strategy_gives_frames_with_probability_one():
    # every location sampled at the minimal-polynomial degree
    rng = np.random.default_rng(0)
    for k in range(500):
        n = int(rng.integers(2, 8))
        net = LtiNetwork(rng.standard_normal((n, n)) / math.sqrt(n))
        s = random_strategy(net, None, net.spectral.minpoly_degree, 1.0, seed=k)
        assert is_frame(build_frame(net, s))


# periodic strategies

def test_periodic_rotation_pi_rejected(rot):
    with pytest.raises(StepSizeError) as exc:
        periodic_strategy(rot, (0,), 2, math.pi)
    assert exc.value.distance < 1e-9
    assert {round(z.imag) for z in exc.value.pair} == {-1, 1}


def test_periodic_rotation_generic_delta_accepted(rot):
    s = periodic_strategy(rot, (0,), 2, 1.0)
    assert list(s.theta(0)) == [0.0, 1.0]
    assert is_frame(build_frame(rot, s))


def test_step_size_real_spectrum_always_ok():
    net = LtiNetwork(np.diag([-1.0, -2.0, 0.5]))
    for delta in (0.1, 1.0, math.pi, 2 * math.pi, 100.0):
        assert check_step_size(net, delta) > 0


def test_step_size_single_eigenvalue():
    assert check_step_size(LtiNetwork(np.eye(3)), 1.0) == math.inf


def test_periodic_warns_below_degree(rot):
    with pytest.warns(UserWarning):
        periodic_strategy(rot, (0,), 1, 1.0)


def test_periodic_default_horizon_is_degree():
    net = generate_geometric_network(6, seed=4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s = periodic_strategy(net, (0, 1), None, 0.3)
    assert len(s.theta(0)) == net.spectral.minpoly_degree


# full state

def test_delta_star_unit_norm(rot):
    assert delta_star(rot) == pytest.approx(0.99 * math.log(2))
    assert delta_star(rot, 1.0) == pytest.approx(math.log(2))


def test_delta_star_zero_matrix():
    with pytest.raises(ParameterError):
        delta_star(LtiNetwork(np.zeros((2, 2))))


def test_full_state_window():
    net = generate_geometric_network(10, seed=1)
    s = full_state_strategy(net, t_star=2.0, seed=5)
    t = s.times_array
    assert len(s) == 10 and s.omega == tuple(range(10))
    assert np.all((t >= 2.0) & (t < 2.0 + delta_star(net)))


def test_full_state_always_frame():
    for k in range(120):
        n = 2 + k % 19
        net = generate_geometric_network(n, d=0.5, seed=k)
        if net.norm2 == 0:
            continue
        assert is_frame(build_frame(net, full_state_strategy(net, seed=k)))


# time design matrix

def test_time_design_rotation():
    rot = rotation_network()
    ok = check_time_design(rot, SamplingStrategy([(0, 0.0), (0, 0.7)]))
    bad = check_time_design(rot, SamplingStrategy([(0, 0.0), (0, math.pi)]))
    assert ok.per_location[0] == (2, True) and ok.sufficient
    assert bad.per_location[0] == (2, False) and not bad.sufficient


def test_time_design_determinant_oracle():
    info = spectral_info(rotation_network().A)
    t = np.array([0.2, 0.9])
    E = time_design_matrix(info, t)
    # columns e^{jt}, e^{-jt}: |det| = 2|sin(t1 - t2)|
    assert abs(np.linalg.det(E)) == pytest.approx(2 * abs(math.sin(t[0] - t[1])), rel=1e-12)


def test_time_design_scalar_identity():
    net = LtiNetwork(3.0 * np.eye(4))
    chk = check_time_design(net, SamplingStrategy([(i, 0.4) for i in range(4)]))
    assert chk.minpoly_degree == 1 and chk.sufficient


def test_time_design_jordan_columns():
    info = spectral_info(np.array([[0.0, 1.0], [0.0, 0.0]]))
    E = time_design_matrix(info, [0.0, 2.0])
    assert np.allclose(np.abs(E), [[1, 0], [1, 2]])


def test_time_design_unobservable_not_sufficient():
    net = LtiNetwork(np.eye(2))
    chk = check_time_design(net, SamplingStrategy([(0, 0.0)]))
    assert chk.per_location[0] == (1, True) and not chk.sufficient
