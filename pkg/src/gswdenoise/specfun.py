"""Special functions and quadrature used by the risk formulas.

Everything here is a pure function of its arguments. Scalar inputs give
Python floats back; array inputs give arrays of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NumericalError, QuadratureError

__all__ = [
    "QuadratureSpec",
    "check_threshold",
    "integrate",
    "gaussian_pdf",
    "gaussian_q",
    "marcum_q1",
    "exceedance_prob_complex",
    "exceedance_prob_real",
    "rho_gsw_complex",
    "rho_gsw_complex_merged",
    "rho_gsw_real",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Tail of the exponential weight beyond lambda^2 that is kept in the rho integrals.
_TAIL_SPAN = 60.0

_MARCUM_MAX_TERMS = 100_000


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy controls for :func:`integrate`."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


DEFAULT_QUAD = QuadratureSpec()


def check_threshold(lam) -> float:
    """Validate a shrinkage threshold and return it as a float.

    Thresholds below 2 are rejected: the gain's square root ``sqrt(1 - 4/r^2)``
    must be real on the whole pass region ``r > lam``.
    """
    lam = float(lam)
    if not math.isfinite(lam) or lam < 2.0:
        raise DomainError(f"threshold must be a finite value >= 2, got {lam!r}")
    return lam


def _check_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _clamp_probability(p):
    """Clip to [0, 1]; overshoot larger than 1e-12 indicates a real bug."""
    if __debug__:
        over = np.max(np.maximum(np.asarray(p) - 1.0, -np.asarray(p)), initial=0.0)
        assert over < 1e-12, f"probability overshoot {over:g}"
    return np.clip(p, 0.0, 1.0)


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (7, 15) quadrature

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights belong to the Kronrod nodes with odd index (1, 3, 5, 7).
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    kronrod = half * np.dot(_KWEIGHTS, fx)
    gauss = half * np.dot(_GWEIGHTS, fx)
    return kronrod, abs(kronrod - gauss)


def integrate(f, a: float, b: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integrate a vectorized function over a finite interval ``[a, b]``.

    Panels are bisected worst-first until the summed error estimate drops
    below ``max(abs_tol, rel_tol * |I|)``.

    Raises:
        QuadratureError: if ``quad.max_subdivisions`` bisections were not
            enough. The exception carries the current estimate and its error.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a == b:
        return 0.0
    value, err = _gk15(f, a, b)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    for _ in range(quad.max_subdivisions):
        if total_err <= max(quad.abs_tol, quad.rel_tol * abs(total)):
            return float(total)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        left, left_err = _gk15(f, lo, mid)
        right, right_err = _gk15(f, mid, hi)
        total += left + right - val
        total_err += left_err + right_err + neg_err
        heapq.heappush(heap, (-left_err, lo, mid, left))
        heapq.heappush(heap, (-right_err, mid, hi, right))
    # Recompute from panels to shed accumulated rounding in the running sums.
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    if total_err <= max(quad.abs_tol, quad.rel_tol * abs(total)):
        return float(total)
    raise QuadratureError(
        f"quadrature did not converge after {quad.max_subdivisions} subdivisions "
        f"(estimate {total:.17g}, error estimate {total_err:.3g})",
        estimate=total,
        error_estimate=total_err,
    )


# ---------------------------------------------------------------------------
# Gaussian helpers

def gaussian_pdf(x):
    """Standard normal density."""
    arr = _check_finite(x)
    return _scalar_or_array(_INV_SQRT_2PI * np.exp(-0.5 * arr * arr), x)


def gaussian_q(x):
    """Standard normal survival function ``Q(x) = P(G > x)``."""
    arr = _check_finite(x)
    return _scalar_or_array(special.ndtr(-arr), x)


# ---------------------------------------------------------------------------
# Marcum Q_1

def _marcum_q1_scalar(a: float, b: float, tol: float) -> float:
    beta = 0.5 * b * b
    if beta == 0.0:  # b == 0, or so small that b^2 underflows
        return 1.0
    alpha = 0.5 * a * a
    if alpha == 0.0:
        return math.exp(-beta)
    log_alpha = math.log(alpha)
    log_beta = math.log(beta)

    # Q1 = sum_k Pois(k; alpha) * P(Pois(beta) <= k). The complementary sum
    # is accumulated too: near Q1 = 1 it is small and immune to the relative
    # rounding carried by the Poisson weights.
    total = 0.0
    complement = 0.0
    cdf_beta = 0.0
    tail_bound = math.inf
    for k in range(_MARCUM_MAX_TERMS):
        lgk = math.lgamma(k + 1.0)
        cdf_beta = min(cdf_beta + math.exp(k * log_beta - beta - lgk), 1.0)
        w = math.exp(k * log_alpha - alpha - lgk)
        total += w * cdf_beta
        complement += w * (1.0 - cdf_beta)
        ratio = alpha / (k + 1.0)
        if ratio < 1.0:
            # Past the Poisson mode the weights shrink at least geometrically,
            # and each tail factor is at most 1.
            tail_bound = w * ratio / (1.0 - ratio)
            if tail_bound <= tol:
                return total if total <= complement else 1.0 - complement
    raise NumericalError(
        f"Marcum Q1 series did not converge in {_MARCUM_MAX_TERMS} terms "
        f"(a={a:g}, b={b:g}, partial sum {total:.17g}, "
        f"truncation bound {tail_bound:.3g})",
        estimate=total,
        error_estimate=tail_bound,
    )


def marcum_q1(a, b, tol: float = 1e-15):
    """Marcum Q-function of order one.

    ``Q1(a, b)`` is the probability that a Rician radius with noncentrality
    ``a`` (unit per-dimension variance) exceeds ``b``. It is evaluated as a
    Poisson mixture of chi-square tails; the series stops once the Poisson
    mass not yet summed is below ``tol``, which bounds the truncation error.

    Raises:
        DomainError: for negative or non-finite arguments.
        NumericalError: if the series needs more than 1e5 terms.
    """
    a_arr = _check_finite(a, "a")
    b_arr = _check_finite(b, "b")
    if np.any(a_arr < 0) or np.any(b_arr < 0):
        raise DomainError("Marcum Q1 arguments must be non-negative")
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    out = np.empty(a_arr.shape)
    for idx in np.ndindex(a_arr.shape):
        out[idx] = _marcum_q1_scalar(float(a_arr[idx]), float(b_arr[idx]), tol)
    out = _clamp_probability(out)
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        return float(out)
    return out


def exceedance_prob_complex(eta_abs, lam):
    """``P(|eta + xi| > lam)`` for standard circular complex normal ``xi``."""
    lam = check_threshold(lam)
    eta = _check_finite(eta_abs, "eta_abs")
    if np.any(eta < 0):
        raise DomainError("eta_abs must be non-negative")
    return marcum_q1(math.sqrt(2.0) * eta, math.sqrt(2.0) * lam)


def exceedance_prob_real(eta, lam):
    """``P(|eta + g| > lam)`` for a standard real normal ``g``."""
    lam = check_threshold(lam)
    arr = _check_finite(eta, "eta")
    p = special.ndtr(arr - lam) + special.ndtr(-lam - arr)
    return _scalar_or_array(_clamp_probability(p), eta)


# ---------------------------------------------------------------------------
# Residual-variance constants rho(lambda)
#
# Both complex-field paths are written after factoring out exp(-lam^2) and
# substituting t = lam^2 + s^2, which removes the square-root branch point
# of sqrt(t^2 - 4t) at t = 4 and keeps the integral O(lam^2) for every lam.

def _rho_complex_tail(lam2: float, quad: QuadratureSpec) -> float:
    # (1/2) * int_0^inf sqrt((lam2+u)(lam2+u-4)) e^{-u} du, with u = s^2
    def integrand(s):
        u = s * s
        return s * np.sqrt((lam2 + u) * (lam2 - 4.0 + u)) * np.exp(-u)

    return integrate(integrand, 0.0, math.sqrt(_TAIL_SPAN), quad)


def rho_gsw_complex(lam, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Residual noise variance of the GSW rule on pure complex noise.

    Equals ``E[|xi|^2 g(|xi|)^2]`` for standard circular complex normal
    ``xi``: a closed-form term plus a one-dimensional tail integral.
    """
    lam = check_threshold(lam)
    lam2 = lam * lam
    bracket = 0.5 * (lam2 - 1.0) + _rho_complex_tail(lam2, quad)
    return math.exp(-lam2) * bracket


def rho_gsw_complex_merged(lam, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Same constant as :func:`rho_gsw_complex`, integrated as a single term.

    Uses ``int_{lam^2}^inf [(t - 2)/2 + sqrt(t^2 - 4t)/2] e^{-t} dt`` with no
    closed-form piece, so it exercises a separate evaluation path.
    """
    lam = check_threshold(lam)
    lam2 = lam * lam

    def integrand(s):
        u = s * s
        t = lam2 + u
        return s * ((t - 2.0) + np.sqrt(t * (t - 4.0))) * np.exp(-u)

    return math.exp(-lam2) * integrate(integrand, 0.0, math.sqrt(_TAIL_SPAN), quad)


def rho_gsw_real(lam) -> float:
    """Residual noise variance of the GSW rule on pure real Gaussian noise."""
    lam = check_threshold(lam)
    root = math.sqrt(lam * lam - 4.0)
    return float(
        (lam + root) * gaussian_pdf(lam)
        + math.exp(-2.0) * gaussian_q(root)
        - gaussian_q(lam)
    )
