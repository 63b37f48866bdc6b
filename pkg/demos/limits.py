"""How good can an estimate get with a given sample budget?"""

import numpy as np

from obsframes import (LtiNetwork, build_frame, gramian_limit, measure_rho_d, periodic_strategy,
                       sample_count_bounds, tradeoff_thresholds)

rng = np.random.default_rng(11)
A = rng.standard_normal((6, 6)) / np.sqrt(6)
A -= (np.max(np.linalg.eigvals(A).real) + 0.3) * np.eye(6)
net = LtiNetwork(A)
sigma, delta = 0.1, 0.5

floor_d, floor_e = gramian_limit(net, None, delta, sigma)
print(f"no number of periodic samples beats rho_d = {floor_d:.5f}")
for K in (6, 10, 20, 40):
    st = periodic_strategy(net, None, K, delta)
    f = build_frame(net, st)
    lo_d, _ = sample_count_bounds(net, st, sigma)
    print(f"K = {K:2d}: rho_d = {measure_rho_d(f, sigma):.5f}  (sample-count bound {lo_d:.5f})")

need_d, _ = tradeoff_thresholds(20, 0.1, 1.0, 0.05, 0.0)
print(f"n = 20, nu = 1: rho_d <= 0.05 needs at least {need_d:.0f} samples")
