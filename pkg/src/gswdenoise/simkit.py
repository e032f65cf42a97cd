"""Seeded Monte Carlo engine for the sparse-vector denoising experiment.

Every random draw comes from a :class:`RandomStream`, a ``(seed, stream_id)``
pair mapped onto an independent numpy ``SeedSequence`` child. A sweep gives
each (noise level, trial) its own stream, so results do not depend on how
trials are scheduled across threads.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import DomainError
from .shrinkage import (
    Field,
    OracleMMSE,
    ShrinkageRule,
    denoise_array,
    gsw_gain,
    parse_rule,
    rule_label,
)
from .specfun import check_threshold

__all__ = [
    "RandomStream",
    "PhaseMode",
    "LambdaRule",
    "ExperimentConfig",
    "SweepResult",
    "db_to_sigma",
    "sigma_to_db",
    "db_grid",
    "gen_sparse_signal",
    "sample_noise",
    "empirical_mse",
    "run_sweep",
    "mc_rho_oracle",
    "mc_exceedance_prob",
    "THREADS_ENV",
]

THREADS_ENV = "GSWDENOISE_THREADS"

_UINT64 = (1 << 64) - 1
# Streams with this bit set are reserved for draws that are not per-trial.
_AUX_STREAM = 1 << 63
# Keep each batch of random draws under ~2**20 scalars.
_CHUNK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class RandomStream:
    """Reproducible, independent random stream keyed by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed & _UINT64, spawn_key=(self.stream_id & _UINT64,))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RandomStream):
        return stream.generator()
    raise TypeError(f"expected a RandomStream or numpy Generator, got {type(stream).__name__}")


class PhaseMode(str, enum.Enum):
    UNIT_REAL = "unit_real"
    RANDOM_PHASE = "random_phase"


@dataclass(frozen=True)
class LambdaRule:
    """Either a fixed threshold or ``factor * sqrt(2 ln N)``."""

    kind: str  # "fixed" | "universal"
    value: float

    def __post_init__(self):
        if self.kind not in ("fixed", "universal"):
            raise DomainError(f"unknown lambda rule {self.kind!r}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise DomainError("lambda rule parameter must be positive")

    @classmethod
    def fixed(cls, lam: float) -> "LambdaRule":
        return cls("fixed", float(lam))

    @classmethod
    def universal(cls, factor: float = 1.1) -> "LambdaRule":
        return cls("universal", float(factor))

    def resolve(self, n: int) -> float:
        if self.kind == "fixed":
            lam = self.value
        else:
            lam = self.value * math.sqrt(2.0 * math.log(n))
        return check_threshold(lam)

    def __str__(self):
        return f"{self.kind}({self.value!r})"


def db_to_sigma(db):
    """Noise std for an inverse noise power ``10 log10(1/sigma^2)`` in dB."""
    return 10.0 ** (-np.asarray(db, dtype=float) / 20.0)


def sigma_to_db(sigma):
    return -20.0 * np.log10(np.asarray(sigma, dtype=float)) + 0.0  # no "-0" at 0 dB


def db_grid(start: float = 0.0, stop: float = 25.0, step: float = 1.0) -> np.ndarray:
    """Sigma values for an inclusive dB grid."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return db_to_sigma(start + step * np.arange(count))


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of a Monte Carlo sweep.

    ``phase_mode`` defaults to random phases in the complex field and to
    ``+magnitude`` entries in the real field. ``rules`` may hold rule objects
    or rule strings (see
    :func:`gswdenoise.shrinkage.parse_rule`); ``gsw`` and ``st`` without an
    explicit threshold use the one resolved from ``lambda_rule``.
    """

    N: int = 1000
    K: int = 10
    field: Field = Field.COMPLEX
    nonzero_magnitude: float = 1.0
    phase_mode: Optional[PhaseMode] = None
    sigma_grid: Tuple[float, ...] = tuple(db_grid(0.0, 25.0, 1.0))
    trials: int = 1000
    seed: int = 0
    rules: Tuple[Union[str, ShrinkageRule], ...] = ("gsw", "sw", "st", "js", "ls", "oracle")
    lambda_rule: LambdaRule = LambdaRule.universal(1.1)
    fixed_signal: bool = False

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("field", Field.parse(self.field))
        if self.phase_mode is None:
            default = PhaseMode.RANDOM_PHASE if self.field is Field.COMPLEX else PhaseMode.UNIT_REAL
            set_("phase_mode", default)
        try:
            set_("phase_mode", PhaseMode(self.phase_mode))
        except ValueError:
            raise DomainError(f"phase_mode: unknown value {self.phase_mode!r}") from None
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")
        if int(self.K) != self.K or not 1 <= self.K <= self.N:
            raise DomainError("K must be an integer with 1 <= K <= N")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        set_("N", int(self.N))
        set_("K", int(self.K))
        set_("trials", int(self.trials))
        set_("seed", int(self.seed))
        if not (math.isfinite(self.nonzero_magnitude) and self.nonzero_magnitude > 0):
            raise DomainError("nonzero_magnitude must be positive")
        if self.phase_mode is PhaseMode.RANDOM_PHASE and self.field is Field.REAL:
            raise DomainError("random phases need the complex field")
        grid = np.asarray(self.sigma_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise DomainError("sigma_grid must be a non-empty list")
        if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
            raise DomainError("sigma_grid entries must be positive")
        steps = np.diff(grid)
        if grid.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise DomainError("sigma_grid must be strictly monotone")
        set_("sigma_grid", tuple(float(s) for s in grid))
        try:
            lam = self.lambda_rule.resolve(self.N)
        except DomainError as exc:
            raise DomainError(f"lambda_rule: {exc}") from None
        try:
            rules = tuple(parse_rule(r, lam) if isinstance(r, str) else r for r in self.rules)
        except DomainError as exc:
            raise DomainError(f"rules: {exc}") from None
        if not rules:
            raise DomainError("at least one rule is required")
        labels = [rule_label(r) for r in rules]
        if len(set(labels)) != len(labels):
            raise DomainError(f"duplicate rules: {labels}")
        set_("rules", rules)

    @property
    def lam(self) -> float:
        return self.lambda_rule.resolve(self.N)

    @property
    def rule_labels(self) -> List[str]:
        return [rule_label(r) for r in self.rules]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


# ---------------------------------------------------------------------------
# Draws

def gen_sparse_signal(cfg: ExperimentConfig, stream) -> np.ndarray:
    """K-sparse signal with equal-magnitude entries on a uniform random support."""
    rng = _as_generator(stream)
    dtype = complex if cfg.field is Field.COMPLEX else float
    x = np.zeros(cfg.N, dtype=dtype)
    support = rng.choice(cfg.N, size=cfg.K, replace=False)
    if cfg.phase_mode is PhaseMode.RANDOM_PHASE:
        x[support] = cfg.nonzero_magnitude * np.exp(2j * np.pi * rng.random(cfg.K))
    else:
        x[support] = cfg.nonzero_magnitude
    return x


def sample_noise(shape, sigma, field: Field, stream) -> np.ndarray:
    """White Gaussian noise; complex draws are circular with ``E|n|^2 = sigma^2``."""
    rng = _as_generator(stream)
    shape = (shape,) if np.ndim(shape) == 0 else tuple(shape)
    if Field.parse(field) is Field.COMPLEX:
        g = rng.standard_normal(shape + (2,))
        return (sigma / math.sqrt(2.0)) * (g[..., 0] + 1j * g[..., 1])
    return sigma * rng.standard_normal(shape)


def _mean_stderr(samples: np.ndarray) -> Tuple[float, float]:
    n = samples.shape[0]
    mean = float(np.mean(samples))
    if n < 2:
        return mean, math.nan
    return mean, float(np.std(samples, ddof=1) / math.sqrt(n))


def _chunk_rows(n_rows: int, row_len: int):
    rows = max(1, _CHUNK_ELEMENTS // max(row_len, 1))
    for start in range(0, n_rows, rows):
        yield min(rows, n_rows - start)


def _squared_errors(rule, x, sigma, field, trials, rng) -> np.ndarray:
    out = np.empty(trials)
    pos = 0
    truth = x if isinstance(rule, OracleMMSE) else None
    for rows in _chunk_rows(trials, x.shape[0]):
        y = x + sample_noise((rows, x.shape[0]), sigma, field, rng)
        est = denoise_array(rule, y, sigma, field, truth)
        out[pos:pos + rows] = np.sum(np.abs(est - x) ** 2, axis=-1)
        pos += rows
    return out


def empirical_mse(rule: ShrinkageRule, x, sigma: float, trials: int, stream,
                  field: Optional[Field] = None) -> Tuple[float, float]:
    """Monte Carlo MSE ``E||x_hat - x||^2`` of a rule at a fixed signal.

    Returns ``(mean, stderr)``; stderr is the sample standard deviation of
    the per-trial squared errors over ``sqrt(trials)``.
    """
    if trials < 2:
        raise DomainError("empirical_mse needs at least two trials")
    x = np.atleast_1d(np.asarray(x))
    field = Field.of(x) if field is None else Field.parse(field)
    x = x.astype(complex if field is Field.COMPLEX else float)
    errors = _squared_errors(rule, x, float(sigma), field, int(trials), _as_generator(stream))
    return _mean_stderr(errors)


# ---------------------------------------------------------------------------
# Sweeps

@dataclass
class SweepResult:
    """Empirical MSE per (noise level, rule) plus analytical reference curves.

    ``mean`` and ``stderr`` have shape ``(len(sigmas), len(rules))``;
    ``stderr`` is NaN when only one trial was run.
    """

    config: ExperimentConfig
    sigmas: np.ndarray
    rules: List[str]
    mean: np.ndarray
    stderr: np.ndarray
    trials: int
    analytic_oracle: np.ndarray
    analytic_ls: np.ndarray
    inv_sigma2_db: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        self.inv_sigma2_db = sigma_to_db(self.sigmas)

    def curve(self, rule: str) -> Tuple[np.ndarray, np.ndarray]:
        """``(mean, stderr)`` arrays over the grid for one rule label."""
        for j, label in enumerate(self.rules):
            if label == rule or label.split("(")[0] == rule:
                return self.mean[:, j], self.stderr[:, j]
        raise KeyError(rule)

    def rows(self):
        """One dict per (sigma, rule), grid-major."""
        for i, sigma in enumerate(self.sigmas):
            for j, rule in enumerate(self.rules):
                yield {
                    "sigma": float(sigma),
                    "inv_sigma2_db": float(self.inv_sigma2_db[i]),
                    "rule": rule,
                    "mse_mean": float(self.mean[i, j]),
                    "mse_stderr": float(self.stderr[i, j]),
                    "trials": self.trials,
                    "analytic_oracle": float(self.analytic_oracle[i]),
                    "analytic_ls": float(self.analytic_ls[i]),
                }


def _thread_count(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise DomainError("thread count must be at least 1")
    return threads


def _sweep_point(cfg: ExperimentConfig, index: int, fixed_x) -> np.ndarray:
    """Per-trial squared errors at one grid point, shape ``(trials, rules)``."""
    sigma = cfg.sigma_grid[index]
    xs = np.empty((cfg.trials, cfg.N), dtype=complex if cfg.field is Field.COMPLEX else float)
    ys = np.empty_like(xs)
    for t in range(cfg.trials):
        rng = RandomStream(cfg.seed, (index << 32) | t).generator()
        xs[t] = fixed_x if fixed_x is not None else gen_sparse_signal(cfg, rng)
        # common random numbers: every rule sees this same noisy draw
        ys[t] = xs[t] + sample_noise(cfg.N, sigma, cfg.field, rng)
    errors = np.empty((cfg.trials, len(cfg.rules)))
    for j, rule in enumerate(cfg.rules):
        truth = xs if isinstance(rule, OracleMMSE) else None
        est = denoise_array(rule, ys, sigma, cfg.field, truth)
        errors[:, j] = np.sum(np.abs(est - xs) ** 2, axis=-1)
    return errors


def run_sweep(cfg: ExperimentConfig, threads: Optional[int] = None) -> SweepResult:
    """Run every rule over the whole noise grid.

    Each realization draws a fresh support, fresh phases and fresh noise
    unless ``cfg.fixed_signal`` is set. Grid points are spread over
    ``threads`` workers (default: ``$GSWDENOISE_THREADS`` or all CPUs); the
    output is identical for any worker count.
    """
    fixed_x = None
    if cfg.fixed_signal:
        fixed_x = gen_sparse_signal(cfg, RandomStream(cfg.seed, _AUX_STREAM))
    n_points = len(cfg.sigma_grid)
    workers = min(_thread_count(threads), n_points)
    if workers == 1:
        per_point = [_sweep_point(cfg, i, fixed_x) for i in range(n_points)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(lambda i: _sweep_point(cfg, i, fixed_x), range(n_points)))

    mean = np.empty((n_points, len(cfg.rules)))
    stderr = np.empty_like(mean)
    for i, errors in enumerate(per_point):
        for j in range(len(cfg.rules)):
            mean[i, j], stderr[i, j] = _mean_stderr(errors[:, j])

    sigmas = np.asarray(cfg.sigma_grid)
    snr = cfg.nonzero_magnitude ** 2 / sigmas ** 2
    return SweepResult(
        config=cfg,
        sigmas=sigmas,
        rules=cfg.rule_labels,
        mean=mean,
        stderr=stderr,
        trials=cfg.trials,
        analytic_oracle=cfg.K * sigmas ** 2 * snr / (1.0 + snr),
        analytic_ls=cfg.N * sigmas ** 2,
    )


# ---------------------------------------------------------------------------
# Monte Carlo oracles

def mc_rho_oracle(lam: float, field: Field, samples: int, stream) -> Tuple[float, float]:
    """Plain Monte Carlo estimate of ``E[|xi|^2 g(|xi|)^2]`` on pure noise.

    This is the GSW mean-square output on unit-variance noise, i.e. the
    residual-variance constant, estimated without any of the closed forms.
    Rare-event limited: for large ``lam`` every draw may fall below it.
    """
    lam = check_threshold(lam)
    if samples < 10_000:
        raise DomainError("mc_rho_oracle needs at least 1e4 samples")
    rng = _as_generator(stream)
    field = Field.parse(field)
    values = np.empty(samples)
    pos = 0
    for rows in _chunk_rows(samples, 1):
        xi = sample_noise(rows, 1.0, field, rng)
        r = np.abs(xi)
        values[pos:pos + rows] = (r * gsw_gain(r, lam)) ** 2
        pos += rows
    return _mean_stderr(values)


def mc_exceedance_prob(eta_abs: float, lam: float, samples: int, stream,
                       field: Field = Field.COMPLEX) -> Tuple[float, float]:
    """Empirical ``P(|eta + xi| > lam)`` for unit-variance noise ``xi``."""
    rng = _as_generator(stream)
    hits = 0
    for rows in _chunk_rows(samples, 1):
        z = eta_abs + sample_noise(rows, 1.0, field, rng)
        hits += int(np.count_nonzero(np.abs(z) > lam))
    p = hits / samples
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / samples)
