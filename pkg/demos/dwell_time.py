"""A late sampler: how a uniform delay changes estimation quality."""

import numpy as np

from obsframes import (build_frame, dwell_bound_rho_d, full_state_strategy,
                       generate_geometric_network, measure_rho_d, measure_rho_e, shift_frame)

net = generate_geometric_network(12, seed=9)
frame = build_frame(net, full_state_strategy(net, seed=10))
sigma = 0.1
print(f"tr A = {np.trace(net.A):.3f}")
print("delay    rho_d    bound    rho_e    rho_e + 2 tr(A) delay")
for d in np.linspace(-0.5, 0.5, 6):
    g = shift_frame(frame, d)
    # rho_e moves by exactly -2 tr(A) delay
    print(f"{d:5.2f}  {measure_rho_d(g, sigma):7.4f}  {dwell_bound_rho_d(frame, d, sigma):7.4f}"
          f"  {measure_rho_e(g):7.3f}  {measure_rho_e(g) + 2 * np.trace(net.A) * d:7.3f}")
