"""Split a frame in two at random and see how much each half loses."""

import numpy as np

from obsframes import build_frame, generate_geometric_network, kappa, leverage_scores, random_strategy
from obsframes.sparsify import partition_degradations

net = generate_geometric_network(20, seed=6)
frame = build_frame(net, random_strategy(net, None, 44, 0.12, seed=7))
r_star = leverage_scores(frame).max()
print(f"{len(frame)} components, max leverage r* = {r_star:.4f}, kappa(r*) = {kappa(r_star):.3f}")

both, hi, lo = partition_degradations(frame, 5000, seed=8)
print(f"both halves are frames in {both.mean():.1%} of splits")
print(f"worse half loses {np.median(hi[both]):.3f} in rho_d (median), "
      f"90th percentile {np.percentile(hi[both], 90):.3f}")

counts, edges = np.histogram(hi[both], bins=10)
for c, a, b in zip(counts, edges, edges[1:]):
    print(f"  [{a:.3f}, {b:.3f})  {'#' * int(60 * c / counts.max())}")
