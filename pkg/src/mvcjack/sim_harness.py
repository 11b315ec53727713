"""Monte Carlo coverage experiments for the mixture errors-in-variables fit.

Two-component design: observation j (1-based) has concentrations
(j/n, 1 - j/n).  Each replicate draws a sample, fits both components,
builds the joint ellipsoid and per-coordinate intervals at the requested
level, and records whether the configured true coefficients are covered.
Replicates that fail numerically count as failures, not as misses.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ConfigError,
    DegenerateSlope,
    LeverageAtOne,
    SingularACM,
    SingularGram,
    StatisticEvaluationError,
)
from .eiv_regression import PairedSample, fit_mixture_eiv
from .inference import chi2_quantile_2df, normal_quantile, t_statistic
from .mvc_core import ConcentrationMatrix

_REPLICATE_ERRORS = (
    DegenerateSlope,
    LeverageAtOne,
    SingularACM,
    SingularGram,
    StatisticEvaluationError,
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one coverage experiment (two-component design)."""

    n: int
    replications: int
    coefficients: tuple[tuple[float, float], ...]  # per component (b0, b1)
    regressor_dists: tuple[tuple[float, float], ...]  # per component (mean, variance)
    error_kind: str = "normal"  # "normal" or "student_t"
    error_var: float = 1.0  # variance for normal, scale^2 for student_t
    error_df: Optional[float] = None
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n < 10:
            raise ConfigError(f"sample size must be >= 10, got {self.n}")
        if self.replications < 1:
            raise ConfigError(f"replication count must be >= 1, got {self.replications}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if len(self.coefficients) != 2 or len(self.regressor_dists) != 2:
            raise ConfigError("exactly two components are expected")
        if any(var <= 0.0 for _, var in self.regressor_dists):
            raise ConfigError("regressor variances must be positive")
        if self.error_kind not in ("normal", "student_t"):
            raise ConfigError(f"unknown error kind {self.error_kind!r}")
        if self.error_kind == "normal" and self.error_var < 0.0:
            raise ConfigError("error variance must be nonnegative")
        if self.error_kind == "student_t":
            if self.error_df is None or self.error_df <= 4.0:
                raise ConfigError("student_t errors need df > 4 (moment condition floor)")
            if self.error_var <= 0.0:
                raise ConfigError("student_t scale must be positive")


@dataclass(frozen=True)
class ComponentCoverage:
    """Covering frequencies for one component's intervals and joint set."""

    b0: float
    b1: float
    joint: float


@dataclass(frozen=True)
class CoverageReport:
    """Aggregated covering frequencies over all effective replicates."""

    n: int
    replications: int
    effective: int
    failures: int
    components: tuple[ComponentCoverage, ...] = field(default=())


def preset(name: str, n: int, replications: int = 1000, alpha: float = 0.05, seed: int = 20191107) -> ExperimentConfig:
    """Built-in experiment presets exp1, exp2, exp3."""
    base = dict(
        n=n,
        replications=replications,
        coefficients=((0.5, 2.0), (-0.5, -1.0 / 3.0)),
        regressor_dists=((0.0, 2.0), (1.0, 2.0)),
        alpha=alpha,
        seed=seed,
    )
    if name == "exp1":
        return ExperimentConfig(error_kind="normal", error_var=0.25, **base)
    if name == "exp2":
        return ExperimentConfig(error_kind="normal", error_var=2.0, **base)
    if name == "exp3":
        return ExperimentConfig(error_kind="student_t", error_var=1.0, error_df=14.0, **base)
    raise ConfigError(f"unknown preset {name!r}; expected exp1, exp2 or exp3")


def _replicate_rng(cfg: ExperimentConfig, replicate: int) -> np.random.Generator:
    # One independent stream per replicate; splittable seeding keeps results
    # identical no matter how replicates are scheduled across threads.
    return np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(replicate,)))


def student_t_sample(df: float, scale: float, rng: np.random.Generator) -> float:
    """One draw of scale * T with T Student-t distributed with ``df`` degrees of freedom."""
    return float(scale * rng.standard_t(df))


def _draw_errors(cfg: ExperimentConfig, rng: np.random.Generator, size: int) -> np.ndarray:
    if cfg.error_kind == "normal":
        return np.sqrt(cfg.error_var) * rng.standard_normal(size)
    return np.sqrt(cfg.error_var) * rng.standard_t(cfg.error_df, size=size)


def design_concentrations(n: int) -> ConcentrationMatrix:
    """The two-component design: observation j has concentrations (j/n, 1 - j/n)."""
    p1 = np.arange(1, n + 1) / n
    return ConcentrationMatrix(np.column_stack([p1, 1.0 - p1]))


def gen_sample(cfg: ExperimentConfig, replicate: int) -> PairedSample:
    """Draw one synthetic sample; deterministic in (seed, replicate)."""
    rng = _replicate_rng(cfg, replicate)
    n = cfg.n
    p = design_concentrations(n)

    kappa = (rng.random(n) >= p.probs[:, 0]).astype(np.intp)  # 0 = component 1
    b0 = np.array([c[0] for c in cfg.coefficients])[kappa]
    b1 = np.array([c[1] for c in cfg.coefficients])[kappa]
    mean = np.array([r[0] for r in cfg.regressor_dists])[kappa]
    sd = np.sqrt(np.array([r[1] for r in cfg.regressor_dists]))[kappa]

    x_true = mean + sd * rng.standard_normal(n)
    y_true = b0 + b1 * x_true
    x_obs = x_true + _draw_errors(cfg, rng, n)
    y_obs = y_true + _draw_errors(cfg, rng, n)
    return PairedSample(x_obs=x_obs, y_obs=y_obs, concentrations=p)


def _replicate_outcome(cfg: ExperimentConfig, replicate: int):
    """Coverage indicators (b0, b1, joint) per component, or None on failure."""
    sample = gen_sample(cfg, replicate)
    try:
        fits = fit_mixture_eiv(sample)
        radius2 = chi2_quantile_2df(1.0 - cfg.alpha)
        lam = normal_quantile(1.0 - cfg.alpha / 2.0)
        out = []
        for k, fit in enumerate(fits):
            true = np.array(cfg.coefficients[k])
            est = np.array([fit.coefficients.b0, fit.coefficients.b1])
            joint = t_statistic(true, est, fit.acm) <= radius2
            half = lam * np.sqrt(np.diag(fit.acm.v) / cfg.n)
            marg = np.abs(true - est) <= half
            out.append((bool(marg[0]), bool(marg[1]), bool(joint)))
        return out
    except _REPLICATE_ERRORS:
        return None


def worker_count() -> int:
    """Worker-thread cap from MVCJACK_THREADS (0 or unset = auto)."""
    raw = os.environ.get("MVCJACK_THREADS", "0")
    try:
        requested = int(raw)
    except ValueError as exc:
        raise ConfigError(f"MVCJACK_THREADS must be an integer, got {raw!r}") from exc
    if requested < 0:
        raise ConfigError(f"MVCJACK_THREADS must be nonnegative, got {requested}")
    return requested if requested > 0 else (os.cpu_count() or 1)


def run_experiment(cfg: ExperimentConfig) -> CoverageReport:
    """Run all replicates and aggregate covering frequencies.

    Deterministic for a fixed config: replicates carry independent seeded
    streams and the aggregation is a sum of indicator counts.
    """
    reps = range(cfg.replications)
    workers = worker_count()
    if workers > 1 and cfg.replications > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda r: _replicate_outcome(cfg, r), reps))
    else:
        outcomes = [_replicate_outcome(cfg, r) for r in reps]

    failures = sum(1 for o in outcomes if o is None)
    effective = cfg.replications - failures
    counts = np.zeros((2, 3), dtype=np.int64)
    for o in outcomes:
        if o is not None:
            counts += np.array(o, dtype=np.int64)
    denom = max(effective, 1)
    components = tuple(
        ComponentCoverage(
            b0=float(counts[k, 0] / denom),
            b1=float(counts[k, 1] / denom),
            joint=float(counts[k, 2] / denom),
        )
        for k in range(2)
    )
    return CoverageReport(
        n=cfg.n,
        replications=cfg.replications,
        effective=effective,
        failures=failures,
        components=components,
    )
