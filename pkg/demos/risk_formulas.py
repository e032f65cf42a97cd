"""
Analytical MSE predictions versus simulation
============================================

Compares the two asymptotic expressions with Monte Carlo estimates for a
single complex coefficient.
"""

# %%
import numpy as np

from gswdenoise import RandomStream, RiskPoint, empirical_mse, high_snr_mse, low_snr_mse
from gswdenoise.shrinkage import GSW

lam = 4.09
print(" eta    high-SNR   low-SNR    simulated")
for i, eta in enumerate([0.0, 1.0, 3.0, 5.0, 8.0, 12.0, 20.0]):
    p = RiskPoint(eta, 1.0, lam)
    mc, se = empirical_mse(GSW(lam), np.array([eta + 0j]), 1.0, 200_000, RandomStream(1, i))
    print(f"{eta:5.1f}  {high_snr_mse(p):9.5f}  {low_snr_mse(p):9.5f}  {mc:9.5f} +- {se:.1e}")

# %%
# The residual-variance constant falls off roughly like exp(-lambda^2).
from gswdenoise import rho_gsw_complex, rho_gsw_real

for lam in (2.0, 3.0, 4.09, 5.0):
    print(f"lambda={lam}: complex {rho_gsw_complex(lam):.3e}, real {rho_gsw_real(lam):.3e}")
