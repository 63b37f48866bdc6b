"""Random geometric networks and the frames their sampling strategies produce."""

from obsframes import (build_frame, check_time_design, estimation_report,
                       generate_geometric_network, is_frame, leverage_scores, periodic_strategy,
                       random_strategy)

net = generate_geometric_network(20, a=1.0, b=0.5, d=0.3, seed=1)
print(f"n = {net.n}, ||A|| = {net.norm2:.3f}, minimal polynomial degree = {net.spectral.minpoly_degree}")

# more samples per location, better estimates
for M in (1, 4, 12, 24):
    st = random_strategy(net, None, M, 0.12, seed=2)
    f = build_frame(net, st)
    if not is_frame(f):
        print(f"M = {M:2d}: not a frame")
        continue
    rep = estimation_report(f, sigma=0.1)
    print(f"M = {M:2d}: |Phi| = {len(f):4d}  rho_d = {rep.rho_d:8.4f}  rho_e = {rep.rho_e:9.2f}"
          f"  max leverage = {leverage_scores(f).max():.3f}")

# periodic sampling, one reading every 0.2 time units, d readings per location
for omega in (range(5), range(20)):
    st = periodic_strategy(net, omega, None, delta=0.2)
    f = build_frame(net, st)
    b = is_frame(f)
    print(f"periodic from {len(omega):2d} locations: frame = {b.is_frame}, "
          f"condition number {b.beta / max(b.alpha, 1e-300):.2e}")

# the time-design test certifies small systems; at degree 20 the exponential
# Vandermonde is numerically rank deficient even when the frame is fine
small = generate_geometric_network(4, d=0.8, seed=2)
st = random_strategy(small, (0, 1), small.spectral.minpoly_degree, 2.0, seed=3)
print("n = 4, two locations, sufficient design:", check_time_design(small, st).sufficient)
