"""
Denoising a signal that is sparse in an orthonormal basis
=========================================================

The rules act on coefficients; any unitary transform maps white noise to
white noise, so denoising in the coefficient domain works unchanged.
"""

# %%
import numpy as np
from scipy.fft import dct

from gswdenoise import GSW, ObservationVector, transform_denoise

n = 256
U = dct(np.eye(n), norm="ortho", axis=0).T  # columns are DCT basis vectors
coeffs = np.zeros(n)
coeffs[[3, 10, 40]] = [12.0, -9.0, 7.0]
x = U @ coeffs

rng = np.random.default_rng(3)
y = x + rng.standard_normal(n)
obs = ObservationVector.from_values(y, 1.0, "real")

lam = 1.1 * np.sqrt(2 * np.log(n))
x_hat = transform_denoise(GSW(lam), obs, U)
print(f"noisy error   {np.sum((y - x) ** 2):8.2f}")
print(f"GSW error     {np.sum((x_hat - x) ** 2):8.2f}")
