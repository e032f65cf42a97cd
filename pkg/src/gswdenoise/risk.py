"""Analytical per-component MSE predictions for GSW and its references.

All functions return mean-square error in squared signal units. The high-
and low-SNR expressions are asymptotic; picking the one that applies is
left to the caller.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import List, Sequence

import numpy as np

from .errors import DomainError
from .shrinkage import Field
from .specfun import (
    check_threshold,
    exceedance_prob_complex,
    exceedance_prob_real,
    rho_gsw_complex,
    rho_gsw_real,
)

__all__ = [
    "RiskPoint",
    "Regime",
    "RiskCurve",
    "high_snr_mse",
    "low_snr_mse",
    "oracle_mmse_risk",
    "ls_risk",
    "aggregate_vector_risk",
    "rho_gsw",
    "exceedance_prob",
    "sparse_vector_risk",
    "risk_curve",
]


@dataclass(frozen=True)
class RiskPoint:
    """One coefficient: normalized magnitude ``|x|/sigma``, noise level, threshold."""

    eta_abs: float
    sigma: float = 1.0
    lam: float = 2.0
    field: Field = Field.COMPLEX

    def __post_init__(self):
        eta, sigma = float(self.eta_abs), float(self.sigma)
        if not np.isfinite(eta) or eta < 0:
            raise DomainError("eta_abs must be finite and non-negative")
        if not np.isfinite(sigma) or sigma <= 0:
            raise DomainError("sigma must be positive and finite")
        object.__setattr__(self, "eta_abs", eta)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "lam", check_threshold(self.lam))
        object.__setattr__(self, "field", Field.parse(self.field))

    @property
    def signal_power(self) -> float:
        return (self.eta_abs * self.sigma) ** 2


def exceedance_prob(p: RiskPoint) -> float:
    """Probability that the coefficient survives the GSW threshold."""
    if p.field is Field.COMPLEX:
        return exceedance_prob_complex(p.eta_abs, p.lam)
    # symmetric in the sign of eta, so the magnitude is enough
    return exceedance_prob_real(p.eta_abs, p.lam)


def rho_gsw(lam, field: Field = Field.COMPLEX) -> float:
    """Residual-variance constant for the requested field."""
    if Field.parse(field) is Field.COMPLEX:
        return rho_gsw_complex(lam)
    return rho_gsw_real(lam)


def high_snr_mse(p: RiskPoint) -> float:
    """High-SNR prediction ``(1 - p)|x|^2 + p sigma^2``, p = survival probability."""
    prob = exceedance_prob(p)
    return (1.0 - prob) * p.signal_power + prob * p.sigma ** 2


def low_snr_mse(p: RiskPoint) -> float:
    """Low-SNR prediction ``|x|^2 + rho(lam) sigma^2``."""
    return p.signal_power + rho_gsw(p.lam, p.field) * p.sigma ** 2


def oracle_mmse_risk(p: RiskPoint) -> float:
    """Exact MSE of the oracle Wiener gain ``s/(1+s)``, ``s = eta^2``."""
    s = p.eta_abs ** 2
    return p.sigma ** 2 * s / (1.0 + s)


def ls_risk(sigma) -> float:
    """Per-component MSE of least squares, ``sigma^2``."""
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma <= 0:
        raise DomainError("sigma must be positive and finite")
    return sigma * sigma


def aggregate_vector_risk(per_component) -> float:
    """Total MSE of a vector: the sum of its per-component MSEs."""
    arr = np.asarray(per_component, dtype=float)
    if np.any(arr < 0):
        raise DomainError("per-component MSE values must be non-negative")
    return float(np.sum(arr))


def sparse_vector_risk(n: int, k: int, magnitude: float, sigma: float, lam: float,
                       field: Field = Field.COMPLEX) -> float:
    """Predicted GSW MSE of a K-sparse vector with equal-magnitude entries.

    Uses the high-SNR expression on the K nonzero entries and the low-SNR
    expression (at zero signal) on the rest.
    """
    eta = magnitude / sigma
    hi = high_snr_mse(RiskPoint(eta, sigma, lam, field))
    lo = low_snr_mse(RiskPoint(0.0, sigma, lam, field))
    return aggregate_vector_risk([k * hi, (n - k) * lo])


class Regime(str, enum.Enum):
    HIGH_SNR = "high_snr"
    LOW_SNR = "low_snr"
    ORACLE = "oracle"
    LS = "ls"


@dataclass
class RiskCurve:
    """Tabulated predictions on a grid of normalized signal magnitudes."""

    grid: np.ndarray
    values: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        for regime, vals in self.values.items():
            if np.any(np.asarray(vals) < 0):
                raise DomainError(f"negative MSE in {regime} curve")

    def rows(self) -> List[tuple]:
        """``(grid value, {regime: mse})`` pairs in grid order."""
        return [
            (float(g), {reg: float(v[i]) for reg, v in self.values.items()})
            for i, g in enumerate(self.grid)
        ]


def risk_curve(eta_grid: Sequence[float], sigma: float, lam: float,
               field: Field = Field.COMPLEX) -> RiskCurve:
    """Evaluate every predictor at each ``|eta|`` of the grid."""
    grid = np.asarray(eta_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("eta grid is empty")
    points = [RiskPoint(e, sigma, lam, field) for e in grid]
    values = {
        Regime.HIGH_SNR: np.array([high_snr_mse(p) for p in points]),
        Regime.LOW_SNR: np.array([low_snr_mse(p) for p in points]),
        Regime.ORACLE: np.array([oracle_mmse_risk(p) for p in points]),
        Regime.LS: np.full(grid.shape, ls_risk(sigma)),
    }
    return RiskCurve(grid, values)
