"""Two-state rotation: when do two samples of one coordinate pin down the state?"""

import math

import numpy as np

from obsframes import (SamplingStrategy, build_frame, is_frame, measure_rho_d, reconstruct,
                       rotation_network)

rot = rotation_network()
sigma = 0.1

# The second sample decides everything; a half turn repeats the first one.
for t in (0.3, math.pi / 4, math.pi / 2, 3.0, math.pi):
    f = build_frame(rot, SamplingStrategy([(0, 0.0), (0, t)]))
    det = np.linalg.det(f.S)
    if is_frame(f):
        print(f"t = {t:5.3f}  det S = {det:.4f}  rho_d = {measure_rho_d(f, sigma):.4f}")
    else:
        print(f"t = {t:5.3f}  det S = {det:.1e}  not a frame")

# recover a state from two noiseless readings
x0 = np.array([1.0, -0.5])
st = SamplingStrategy([(0, 0.0), (0, 1.2)])
f = build_frame(rot, st)
y = f.T @ x0
print("recovered", reconstruct(f, y))
