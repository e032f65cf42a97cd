"""Componentwise shrinkage rules for the additive Gaussian noise model.

Observations ``y = x + sigma * xi`` are denoised one coefficient at a time
(James-Stein being the one global rule). All rules except LS and JS work on
the normalized coefficient ``z = y / sigma`` and scale the observation by a
gain in ``[0, 1]``.

Rules are small frozen dataclasses; :func:`parse_rule` builds them from
strings such as ``"gsw(4.09)"``, ``"sw"`` or ``"st(3)"``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError
from .specfun import check_threshold

__all__ = [
    "Field",
    "NoiseModel",
    "ObservationVector",
    "LS",
    "GSW",
    "SW",
    "ST",
    "JS",
    "OracleMMSE",
    "ShrinkageRule",
    "parse_rule",
    "gsw_gain",
    "soft_gain",
    "denoise",
    "denoise_array",
    "transform_denoise",
]


class Field(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def of(cls, values) -> "Field":
        return cls.COMPLEX if np.iscomplexobj(values) else cls.REAL

    @classmethod
    def parse(cls, value) -> "Field":
        if isinstance(value, Field):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown field {value!r}; expected 'real' or 'complex'") from None


@dataclass(frozen=True)
class NoiseModel:
    """Known noise standard deviation(s), scalar or one per component."""

    sigmas: Union[float, np.ndarray]
    field: Field = Field.COMPLEX

    def __post_init__(self):
        sig = np.asarray(self.sigmas, dtype=float)
        if sig.ndim > 1:
            raise DomainError("sigmas must be a scalar or a 1-D array")
        if not np.all(np.isfinite(sig)) or np.any(sig <= 0):
            raise DomainError("noise standard deviations must be positive and finite")
        object.__setattr__(self, "sigmas", float(sig) if sig.ndim == 0 else sig)
        object.__setattr__(self, "field", Field.parse(self.field))

    @property
    def homoscedastic(self) -> bool:
        return np.ndim(self.sigmas) == 0

    def sigma_bar2(self) -> float:
        """Common noise variance; only defined for homoscedastic noise."""
        if not self.homoscedastic:
            raise UnsupportedConfigurationError(
                "a single noise variance is only defined for homoscedastic noise")
        return self.sigmas ** 2


@dataclass(frozen=True)
class ObservationVector:
    """A noisy vector together with the noise model it was measured under."""

    values: np.ndarray
    noise: NoiseModel

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or vals.size < 1:
            raise DomainError("observations must be a non-empty 1-D array")
        if not np.all(np.isfinite(vals)):
            raise DomainError("observations must be finite")
        if Field.of(vals) is not self.noise.field:
            raise DomainError(
                f"field mismatch: {Field.of(vals).value} values with "
                f"{self.noise.field.value} noise model")
        if not self.noise.homoscedastic and np.shape(self.noise.sigmas) != vals.shape:
            raise DomainError("per-component sigmas must match the observation length")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values, sigma, field=None) -> "ObservationVector":
        """Wrap raw values, inferring the field from the dtype unless given."""
        values = np.asarray(values)
        if field is None:
            field = Field.of(values)
        field = Field.parse(field)
        if field is Field.COMPLEX:
            values = values.astype(complex, copy=False)
        elif np.iscomplexobj(values):
            raise DomainError("complex values cannot be observed in the real field")
        else:
            values = values.astype(float, copy=False)
        return cls(values, NoiseModel(sigma, field))

    @property
    def field(self) -> Field:
        return self.noise.field

    def __len__(self):
        return self.values.shape[0]


# ---------------------------------------------------------------------------
# Rules

@dataclass(frozen=True)
class LS:
    """Least squares: return the observation."""

    name = "LS"


@dataclass(frozen=True)
class GSW:
    """Generalized self-Wiener shrinkage with threshold ``lam >= 2``."""

    lam: float

    def __post_init__(self):
        object.__setattr__(self, "lam", check_threshold(self.lam))

    @property
    def name(self) -> str:
        return "GSW"


@dataclass(frozen=True)
class SW:
    """The original self-Wiener rule, i.e. GSW with threshold 2."""

    name = "SW"
    lam = 2.0


@dataclass(frozen=True)
class ST:
    """Soft thresholding at ``tau`` in normalized (``|y|/sigma``) units."""

    tau: float

    def __post_init__(self):
        tau = float(self.tau)
        if not np.isfinite(tau) or tau <= 0:
            raise DomainError(f"soft threshold must be positive, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)

    @property
    def name(self) -> str:
        return "ST"


@dataclass(frozen=True)
class JS:
    """Positive-part James-Stein shrinkage toward zero."""

    name = "JS"


@dataclass(frozen=True)
class OracleMMSE:
    """Per-component Wiener gain with the true SNR (needs the clean signal)."""

    name = "Oracle"


ShrinkageRule = Union[LS, GSW, SW, ST, JS, OracleMMSE]

_RULE_RE = re.compile(r"^\s*([A-Za-z]+)\s*(?:\(\s*([^()]*?)\s*\))?\s*$")


def parse_rule(text: str, default_lambda: Optional[float] = None) -> ShrinkageRule:
    """Parse a rule spec such as ``"gsw(4.09)"``, ``"st"`` or ``"oracle"``.

    ``gsw`` and ``st`` without an argument take ``default_lambda``.
    """
    m = _RULE_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse rule {text!r}")
    kind, arg = m.group(1).lower(), m.group(2)
    if kind in ("ls", "sw", "js", "oracle", "oraclemmse", "mmse"):
        if arg:
            raise DomainError(f"rule {kind!r} takes no parameter")
        return {"ls": LS(), "sw": SW(), "js": JS()}.get(kind, OracleMMSE())
    if kind in ("gsw", "st"):
        if arg:
            try:
                value = float(arg)
            except ValueError:
                raise DomainError(f"bad parameter in rule {text!r}") from None
        elif default_lambda is not None:
            value = default_lambda
        else:
            raise DomainError(f"rule {text!r} needs a threshold")
        return GSW(value) if kind == "gsw" else ST(value)
    raise DomainError(f"unknown rule {kind!r}")


def rule_label(rule: ShrinkageRule) -> str:
    """Stable text label used in result tables, e.g. ``GSW(4.0949)``."""
    if isinstance(rule, GSW):
        return f"GSW({rule.lam:.6g})"
    if isinstance(rule, ST):
        return f"ST({rule.tau:.6g})"
    return rule.name


# ---------------------------------------------------------------------------
# Gains

def gsw_gain(r, lam):
    """GSW shrinkage factor as a function of the normalized magnitude ``r``.

    Zero on ``r <= lam``; ``(1 + sqrt(1 - 4/r^2)) / 2`` above it. This form
    is algebraically equal to ``2 r^-2 / (1 - sqrt(1 - 4 r^-2))`` for r > 2
    but does not cancel catastrophically for large ``r``.
    """
    lam = check_threshold(lam)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(np.isnan(r_arr)):
        raise DomainError("gain argument must be non-negative")
    gain = np.zeros_like(r_arr)
    keep = r_arr > lam
    rk = r_arr[keep]
    gain[keep] = 0.5 * (1.0 + np.sqrt(1.0 - 4.0 / (rk * rk)))
    if np.ndim(r) == 0:
        return float(gain)
    return gain


def soft_gain(r, tau):
    """Soft-threshold factor ``max(1 - tau/r, 0)``; zero at ``r = 0``."""
    r_arr = np.asarray(r, dtype=float)
    gain = np.zeros_like(r_arr)
    keep = r_arr > tau
    gain[keep] = 1.0 - tau / r_arr[keep]
    if np.ndim(r) == 0:
        return float(gain)
    return gain


def _js_constant(n: int, field: Field) -> float:
    # A complex n-vector is a real 2n-vector with per-part variance sigma^2/2.
    c = n - 1 if field is Field.COMPLEX else n - 2
    return float(max(c, 0))


def denoise_array(rule: ShrinkageRule, y, sigma, field: Field, truth=None) -> np.ndarray:
    """Apply ``rule`` to raw arrays without building an ObservationVector.

    ``y`` may carry leading batch axes; the last axis indexes components.
    ``sigma`` is a scalar or broadcasts against ``y``. JS shrinks each row
    (last-axis vector) with its own factor. No validation is done here; use
    :func:`denoise` for checked input.
    """
    if isinstance(rule, LS):
        return y.copy()
    if isinstance(rule, OracleMMSE):
        if truth is None:
            raise TypeError("the oracle MMSE rule needs the true signal")
        snr = np.abs(truth) ** 2 / (np.asarray(sigma) ** 2)
        return y * (snr / (1.0 + snr))
    if isinstance(rule, JS):
        if np.ndim(sigma) != 0:
            raise UnsupportedConfigurationError(
                "James-Stein shrinkage supports homoscedastic noise only")
        energy = np.sum(np.abs(y) ** 2, axis=-1, keepdims=True)
        c = _js_constant(y.shape[-1], field)
        with np.errstate(divide="ignore"):
            factor = np.maximum(1.0 - c * sigma * sigma / energy, 0.0)
        factor = np.where(energy > 0, factor, 0.0)
        return y * factor
    r = np.abs(y) / sigma
    if isinstance(rule, (GSW, SW)):
        return y * gsw_gain(r, rule.lam)
    if isinstance(rule, ST):
        return y * soft_gain(r, rule.tau)
    raise TypeError(f"not a shrinkage rule: {rule!r}")


def denoise(rule: ShrinkageRule, y: ObservationVector, truth=None) -> np.ndarray:
    """Denoise an observation vector with one of the shrinkage rules.

    Args:
        rule: LS, GSW, SW, ST, JS or OracleMMSE instance.
        y: the observation and its noise model.
        truth: the clean signal; required by OracleMMSE and rejected otherwise.

    Raises:
        TypeError: truth missing for OracleMMSE, or supplied for another rule.
        UnsupportedConfigurationError: JS with heteroscedastic noise.
    """
    if isinstance(rule, OracleMMSE):
        if truth is None:
            raise TypeError("the oracle MMSE rule needs the true signal")
        truth = np.asarray(truth)
        if truth.shape != y.values.shape:
            raise DomainError("truth must have the same shape as the observation")
    elif truth is not None:
        raise TypeError(f"{rule_label(rule)} does not take a true signal")
    return denoise_array(rule, y.values, y.noise.sigmas, y.field, truth)


def transform_denoise(rule: ShrinkageRule, y: ObservationVector, U, truth=None,
                      atol: float = 1e-10) -> np.ndarray:
    """Denoise in the coefficient domain of a unitary transform.

    Returns ``U @ denoise(rule, U^H y)``. White noise stays white under a
    unitary map, so the rules apply unchanged to the coefficients.

    Raises:
        DomainError: ``U`` is not unitary to ``atol``, or is complex while
            the observation is real.
        UnsupportedConfigurationError: heteroscedastic noise.
    """
    U = np.asarray(U)
    n = len(y)
    if U.shape != (n, n):
        raise DomainError(f"transform must be {n}x{n}, got {U.shape}")
    if not y.noise.homoscedastic:
        raise UnsupportedConfigurationError(
            "transform-domain denoising requires homoscedastic noise")
    if y.field is Field.REAL and np.iscomplexobj(U):
        raise DomainError("a real observation needs a real orthogonal transform")
    gram = U.conj().T @ U
    if not np.allclose(gram, np.eye(n), rtol=0.0, atol=atol):
        raise DomainError("transform is not unitary")
    coeffs = ObservationVector(U.conj().T @ y.values, y.noise)
    coeff_truth = None if truth is None else U.conj().T @ np.asarray(truth)
    return U @ denoise(rule, coeffs, coeff_truth)
