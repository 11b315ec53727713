"""Confidence ellipsoids and intervals from a point estimate and its jackknife covariance.

The quadratic statistic is T(t) = n (t - center)^T Vhat^{-1} (t - center);
at the true parameter it is asymptotically chi-square with 2 degrees of
freedom, so the level-(1-alpha) set is {t : T(t) <= -2 ln(alpha)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NegativeVariance, SingularACM, UnsupportedDimension
from .jackknife import JackknifeACM

BOUNDARY_POINTS = 256


@dataclass(frozen=True)
class ConfidenceEllipsoid:
    """Elliptical confidence set: {t : (t-center)^T shape_inv (t-center) <= radius2}."""

    center: np.ndarray
    shape_inv: np.ndarray
    radius2: float
    alpha: float

    def t_statistic(self, t) -> float:
        delta = np.asarray(t, dtype=float) - self.center
        return float(delta @ self.shape_inv @ delta)

    def contains(self, t) -> bool:
        return self.t_statistic(t) <= self.radius2

    def boundary(self, num_points: int = BOUNDARY_POINTS) -> np.ndarray:
        """(num_points, 2) polyline tracing the ellipse boundary."""
        if self.center.shape[0] != 2:
            raise UnsupportedDimension("boundary emission is only defined for 2-d parameters")
        # shape_inv = n * inv(Vhat); the boundary is center + sqrt(radius2) * L u
        # with L L^T = inv(shape_inv), parameterized over the unit circle.
        w, q = np.linalg.eigh(self.shape_inv)
        half_axes = q * np.sqrt(self.radius2 / w)
        theta = np.linspace(0.0, 2.0 * math.pi, num_points, endpoint=False)
        circle = np.stack([np.cos(theta), np.sin(theta)])
        return self.center[None, :] + (half_axes @ circle).T


@dataclass(frozen=True)
class ConfidenceInterval:
    """Symmetric asymptotic confidence interval for a scalar coordinate."""

    low: float
    upp: float
    alpha: float


def chi2_quantile_2df(prob: float) -> float:
    """Quantile of the chi-square distribution with 2 df: -2 ln(1 - prob)."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must be in (0, 1), got {prob!r}")
    return -2.0 * math.log1p(-prob)


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(prob: float) -> float:
    """Standard normal quantile, accurate to better than 1e-9.

    Safeguarded Newton iteration on the erfc-based CDF; no lookup tables,
    so results are bit-reproducible across platforms.
    """
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must be in (0, 1), got {prob!r}")
    lo, hi = -40.0, 40.0
    x = 0.0
    for _ in range(200):
        f = _normal_cdf(x) - prob
        if f == 0.0:
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        step = f / pdf if pdf > 0.0 else 0.0
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)  # bisection fallback keeps the bracket
        if abs(x_new - x) < 1e-13 * (1.0 + abs(x_new)):
            return x_new
        x = x_new
    return x


def _check_nonsingular(v: JackknifeACM) -> np.ndarray:
    eigvals = np.linalg.eigvalsh(v.v)
    trace = float(np.trace(v.v))
    if eigvals[0] <= 1e-12 * max(trace, 0.0) or trace <= 0.0:
        raise SingularACM(
            f"covariance estimate is numerically singular (min eigenvalue {eigvals[0]!r}, trace {trace!r})"
        )
    return eigvals


def t_statistic(t, center, v: JackknifeACM) -> float:
    """Quadratic deviation n (t - center)^T Vhat^{-1} (t - center)."""
    _check_nonsingular(v)
    delta = np.asarray(t, dtype=float) - np.asarray(center, dtype=float)
    return float(v.n) * float(delta @ np.linalg.solve(v.v, delta))


def ellipsoid(center, v: JackknifeACM, n: int, alpha: float) -> ConfidenceEllipsoid:
    """Level-(1 - alpha) confidence ellipsoid for a 2-d parameter."""
    center = np.asarray(center, dtype=float)
    if center.shape != (2,) or v.v.shape != (2, 2):
        raise UnsupportedDimension(f"confidence ellipsoids are defined for 2-d parameters, got shape {center.shape}")
    _check_nonsingular(v)
    shape_inv = float(n) * np.linalg.inv(v.v)
    shape_inv = (shape_inv + shape_inv.T) / 2.0
    return ConfidenceEllipsoid(
        center=center,
        shape_inv=shape_inv,
        radius2=chi2_quantile_2df(1.0 - alpha),
        alpha=alpha,
    )


def interval(est: float, v_ii: float, n: int, alpha: float) -> ConfidenceInterval:
    """Symmetric interval est +/- lambda_{alpha/2} sqrt(v_ii / n)."""
    if v_ii < 0.0:
        raise NegativeVariance(f"variance entry is negative: {v_ii!r}")
    half = normal_quantile(1.0 - alpha / 2.0) * math.sqrt(v_ii / n)
    return ConfidenceInterval(low=est - half, upp=est + half, alpha=alpha)
