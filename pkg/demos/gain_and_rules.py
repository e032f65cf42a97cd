"""
The GSW gain and the other shrinkage rules
==========================================

A short tour of the per-coefficient gain and of how each rule treats a
noisy sparse vector.
"""

# %%
import numpy as np

from gswdenoise import GSW, JS, LS, SW, ST, ObservationVector, denoise, gsw_gain

# The gain is zero up to the threshold, then jumps to (1 + sqrt(1 - 4/lambda^2))/2.
r = np.array([1.0, 2.5, 4.0, 4.1, 5.0, 8.0, 20.0, 100.0])
for lam in (2.0, 4.09):
    print(f"lambda={lam}:", np.round(gsw_gain(r, lam), 4))

# %%
# Far above the threshold the gain behaves like 1 - 1/r^2. By r = 1e4 the
# remainder is below one ulp of 1, so the last value is rounding noise.
big = np.geomspace(8, 1e4, 5)
print("r^4 * |g - (1 - r^-2)|:", np.abs(gsw_gain(big, 2.0) - (1 - big ** -2)) * big ** 4)

# %%
# A 3-sparse complex vector of length 64 observed in unit-variance noise.
rng = np.random.default_rng(4)
x = np.zeros(64, complex)
x[[5, 20, 41]] = [8.0, -6j, 5 * np.exp(1j)]
y = x + (rng.standard_normal(64) + 1j * rng.standard_normal(64)) / np.sqrt(2)
obs = ObservationVector.from_values(y, 1.0)

for rule in (LS(), SW(), GSW(4.09), ST(4.09), JS()):
    est = denoise(rule, obs)
    print(f"{rule.name:>4}: squared error {np.sum(np.abs(est - x) ** 2):7.3f}, "
          f"nonzeros {np.count_nonzero(est)}")
