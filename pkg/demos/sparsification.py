"""Thinning a redundant frame: leverage sampling against greedy removal."""

import math

from obsframes import (build_frame, generate_geometric_network, greedy_sparsify,
                       measure_rho_d, random_strategy, randomized_sparsify)
from obsframes.sparsify import default_q

sigma = 0.1
net = generate_geometric_network(20, seed=3)
frame = build_frame(net, random_strategy(net, None, 30, 0.12, seed=4))
print(f"original: {len(frame)} components, rho_d = {measure_rho_d(frame, sigma):.4f}")

q = default_q(net.n, 0.5)
res = randomized_sparsify(frame, q, 0.5, seed=5)
print(f"randomized, q = {q}: kept {res.size}, loss {res.realized_loss_d:.3f} "
      f"(guaranteed below {res.bound_d:.3f})")

g = greedy_sparsify(frame, "d", sigma, math.inf, res.size / len(frame))
print(f"greedy at the same size: kept {g.size}, loss {g.realized_loss_d:.3f}, stop = {g.status}")

# first few removals
for step in g.trace[:5]:
    print(f"  step {step.step}: drop location {step.label[0]} at t = {step.label[1]:.4f}, rho_d -> {step.rho_d:.5f}")
