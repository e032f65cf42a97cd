"""Generalized self-Wiener (GSW) shrinkage denoising.

Submodules:

- :mod:`gswdenoise.specfun`   Gaussian tail, Marcum Q1, residual-variance constants
- :mod:`gswdenoise.shrinkage` GSW, SW, LS, soft thresholding, James-Stein, oracle
- :mod:`gswdenoise.risk`      closed-form high/low-SNR MSE predictions
- :mod:`gswdenoise.simkit`    seeded Monte Carlo sweeps and oracles
- :mod:`gswdenoise.cli`       command-line front end
"""

__version__ = "0.1.0"

from .errors import DomainError, NumericalError, QuadratureError, UnsupportedConfigurationError
from .shrinkage import (
    GSW,
    JS,
    LS,
    ST,
    SW,
    Field,
    NoiseModel,
    ObservationVector,
    OracleMMSE,
    denoise,
    gsw_gain,
    parse_rule,
    transform_denoise,
)
from .risk import RiskPoint, high_snr_mse, low_snr_mse, oracle_mmse_risk, ls_risk
from .simkit import ExperimentConfig, LambdaRule, RandomStream, empirical_mse, run_sweep
from .specfun import marcum_q1, rho_gsw_complex, rho_gsw_real
