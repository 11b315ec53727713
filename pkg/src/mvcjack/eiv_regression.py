"""Orthogonal (errors-in-variables) regression on weighted mixture moments.

The observable vector per subject is expanded to (X, Y, X^2, Y^2, X*Y);
weighted component means of that vector carry everything the fit needs.
The slope is the total-least-squares root

    b1 = (S_YY - S_XX + sqrt((S_XX - S_YY)^2 + 4 S_XY^2)) / (2 S_XY),

appropriate when both variables carry error of equal variance, and the
intercept is b0 = m_Y - b1 * m_X.  The whole fit is exposed as a
``SmoothStatistic`` so the jackknife supplies its covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSlope, DimensionMismatch
from .jackknife import JackknifeACM, SmoothStatistic, jackknife_acm_all
from .mvc_core import (
    ConcentrationMatrix,
    ObservationMatrix,
    gram,
    minimax_weights,
    weighted_means,
)


@dataclass(frozen=True)
class PairedSample:
    """Observed (X_j, Y_j) pairs with per-observation concentrations."""

    x_obs: np.ndarray
    y_obs: np.ndarray
    concentrations: ConcentrationMatrix

    def __post_init__(self):
        x = np.asarray(self.x_obs, dtype=float)
        y = np.asarray(self.y_obs, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise DimensionMismatch(f"x and y must be equal-length vectors, got {x.shape} and {y.shape}")
        if x.shape[0] != self.concentrations.n:
            raise DimensionMismatch(
                f"sample length {x.shape[0]} does not match concentration rows {self.concentrations.n}"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DimensionMismatch("sample contains non-finite values")
        object.__setattr__(self, "x_obs", x)
        object.__setattr__(self, "y_obs", y)

    @property
    def n(self) -> int:
        return self.x_obs.shape[0]


@dataclass(frozen=True)
class RegressionCoefficients:
    """Fitted line y = b0 + b1 * x for one mixture component."""

    b0: float
    b1: float
    component: int = 0


@dataclass(frozen=True)
class ComponentFit:
    """Per-component fit: coefficients plus their jackknife covariance."""

    coefficients: RegressionCoefficients
    acm: JackknifeACM


def expand_observations(s: PairedSample) -> ObservationMatrix:
    """n x 5 observation matrix with columns X, Y, X^2, Y^2, X*Y."""
    x, y = s.x_obs, s.y_obs
    return ObservationMatrix(np.column_stack([x, y, x * x, y * y, x * y]))


def centered_moments(mu):
    """Centered second moments (S_XX, S_YY, S_XY, m_X, m_Y) from a 5-vector of raw moments.

    ``mu`` may carry leading batch dimensions; the moment axis is last.
    """
    mu = np.asarray(mu, dtype=float)
    m_x, m_y, m_xx, m_yy, m_xy = np.moveaxis(mu, -1, 0)
    return m_xx - m_x * m_x, m_yy - m_y * m_y, m_xy - m_x * m_y, m_x, m_y


def _slope_guard(s_xx, s_yy, s_xy):
    eps = 1e-12 * np.maximum(np.maximum(s_xx, s_yy), 1.0)
    bad = np.abs(s_xy) <= eps
    if np.any(bad):
        idx = int(np.argmax(bad)) if np.ndim(bad) else None
        raise DegenerateSlope(
            f"cross-moment {np.min(np.abs(s_xy))!r} below threshold; slope undefined"
            + (f" (batch index {idx})" if idx is not None else "")
        )


def _slope(s_xx, s_yy, s_xy):
    _slope_guard(s_xx, s_yy, s_xy)
    diff = s_yy - s_xx
    return (diff + np.sqrt(diff * diff + 4.0 * s_xy * s_xy)) / (2.0 * s_xy)


def orthogonal_fit(s_xx, s_yy, s_xy, m_x, m_y, component: int = 0) -> RegressionCoefficients:
    """Total-least-squares line through the centered moments."""
    b1 = float(_slope(s_xx, s_yy, s_xy))
    return RegressionCoefficients(b0=float(m_y - b1 * m_x), b1=b1, component=component)


def _eval_coefficients(mu):
    s_xx, s_yy, s_xy, m_x, m_y = centered_moments(mu)
    b1 = _slope(s_xx, s_yy, s_xy)
    b0 = m_y - b1 * m_x
    return np.stack([b0, b1], axis=-1)


def _jacobian_coefficients(mu: np.ndarray) -> np.ndarray:
    """Analytic 2 x 5 Jacobian of (b0, b1) in the raw moments (m_X, m_Y, m_XX, m_YY, m_XY)."""
    s_xx, s_yy, s_xy, m_x, m_y = centered_moments(mu)
    _slope_guard(s_xx, s_yy, s_xy)
    diff = s_yy - s_xx
    root = np.sqrt(diff * diff + 4.0 * s_xy * s_xy)
    b1 = (diff + root) / (2.0 * s_xy)

    # Partials of b1 in the centered moments.
    db1_dsxx = -(1.0 + diff / root) / (2.0 * s_xy)
    db1_dsyy = (1.0 + diff / root) / (2.0 * s_xy)
    db1_dsxy = (4.0 * s_xy * s_xy / root - (diff + root)) / (2.0 * s_xy * s_xy)

    # Chain rule through S_XX = m_XX - m_X^2, S_YY = m_YY - m_Y^2, S_XY = m_XY - m_X m_Y.
    db1 = np.array(
        [
            db1_dsxx * (-2.0 * m_x) + db1_dsxy * (-m_y),
            db1_dsyy * (-2.0 * m_y) + db1_dsxy * (-m_x),
            db1_dsxx,
            db1_dsyy,
            db1_dsxy,
        ]
    )
    db0 = np.array([-b1, 1.0, 0.0, 0.0, 0.0]) - m_x * db1
    return np.vstack([db0, db1])


def regression_statistic(component: int = 0) -> SmoothStatistic:
    """The fit as a smooth map from the 5-vector of raw moments to (b0, b1)."""
    return SmoothStatistic(
        dim_in=5,
        dim_out=2,
        eval=_eval_coefficients,
        jacobian=_jacobian_coefficients,
        vectorized=True,
    )


def fit_mixture_eiv(s: PairedSample) -> list[ComponentFit]:
    """Fit every mixture component and attach its jackknife covariance."""
    xi = expand_observations(s)
    p = s.concentrations
    means = weighted_means(xi, minimax_weights(p, gram(p)))
    acms = jackknife_acm_all(xi, p, regression_statistic())
    fits = []
    for k in range(p.n_components):
        b0, b1 = _eval_coefficients(means.means[k])
        fits.append(
            ComponentFit(
                coefficients=RegressionCoefficients(b0=float(b0), b1=float(b1), component=k),
                acm=acms[k],
            )
        )
    return fits
