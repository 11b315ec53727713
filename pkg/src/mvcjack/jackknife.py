"""Jackknife estimation of the asymptotic covariance of plug-in statistics.

For a smooth map H applied to a weighted component mean, the estimator is

    V_hat = n * sum_i (theta_loo_i - theta_hat) (theta_loo_i - theta_hat)^T,

where theta_loo_i re-estimates with observation i removed.  Two code paths
are provided: a naive one that rebuilds the weight matrix from scratch for
every deletion (quadratic cost, used as an oracle), and a fast one based on
a rank-one update of the Gram inverse (linear cost).  They share no
shortcuts, so their agreement is a meaningful check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import LeverageAtOne, SingularGram, StatisticEvaluationError
from .mvc_core import (
    ComponentMeans,
    ConcentrationMatrix,
    GramMatrix,
    ObservationMatrix,
    gram,
    minimax_weights,
    weighted_means,
)

EPS_LEVERAGE = 1e-10


@dataclass(frozen=True)
class SmoothStatistic:
    """A smooth map from a d-dimensional mean vector to a q-vector.

    ``eval`` maps a length-``dim_in`` vector to a length-``dim_out`` vector.
    If ``vectorized`` is true, ``eval`` additionally accepts an (n, dim_in)
    array and returns an (n, dim_out) array; the jackknife loop exploits
    this to evaluate all leave-one-out means in one call.
    ``jacobian``, when given, maps a mean vector to the (dim_out, dim_in)
    matrix of partial derivatives.
    """

    dim_in: int
    dim_out: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    vectorized: bool = False


@dataclass(frozen=True)
class LeverageVector:
    """Leverages h_i = p_i^T Gram^{-1} p_i; all strictly below 1."""

    h: np.ndarray


@dataclass(frozen=True)
class JackknifeACM:
    """Symmetric q x q jackknife covariance estimate for one component."""

    v: np.ndarray
    component: int
    n: int


def leverages(p: ConcentrationMatrix, g: GramMatrix) -> LeverageVector:
    """Leverage of every observation; errors if any deletion degenerates the Gram matrix."""
    h = np.einsum("jm,ml,jl->j", p.probs, g.inverse, p.probs)
    worst = int(np.argmax(h))
    if h[worst] >= 1.0 - EPS_LEVERAGE:
        raise LeverageAtOne(worst, float(h[worst]))
    return LeverageVector(h)


def loo_gram_inverse(g: GramMatrix, p_i: np.ndarray, h_i: float) -> np.ndarray:
    """Inverse of the Gram matrix after deleting one observation.

    Rank-one (Sherman-Morrison) update:
    inv(Gram - p_i p_i^T) = inv + inv p_i p_i^T inv / (1 - h_i).
    """
    if h_i >= 1.0 - EPS_LEVERAGE:
        raise LeverageAtOne(-1, float(h_i))
    u = g.inverse @ p_i
    return g.inverse + np.outer(u, u) / (1.0 - h_i)


def loo_mean_update(
    means: ComponentMeans,
    a_i: np.ndarray,
    p_i: np.ndarray,
    h_i: float,
    xi_i: np.ndarray,
) -> np.ndarray:
    """Leave-one-out component means via the rank-one update.

    Returns the M x d matrix of means with observation i removed:
    means + outer(a_i, p_i^T means - xi_i) / (1 - h_i).
    """
    if h_i >= 1.0 - EPS_LEVERAGE:
        raise LeverageAtOne(-1, float(h_i))
    return means.means + np.outer(a_i, p_i @ means.means - xi_i) / (1.0 - h_i)


def _pairwise_outer_sum(dev: np.ndarray) -> np.ndarray:
    # Pairwise recursion keeps accumulated rounding error O(log n); a plain
    # running sum over n up to 1e6 terms would lose digits the oracle test
    # could catch.
    if dev.shape[0] <= 256:
        return dev.T @ dev
    mid = dev.shape[0] // 2
    return _pairwise_outer_sum(dev[:mid]) + _pairwise_outer_sum(dev[mid:])


def _eval_statistic(stat: SmoothStatistic, mu: np.ndarray, index=None) -> np.ndarray:
    try:
        out = np.asarray(stat.eval(mu), dtype=float)
    except Exception as exc:  # noqa: BLE001 - converted to a typed error with context
        raise StatisticEvaluationError(index, exc) from exc
    if not np.all(np.isfinite(out)):
        raise StatisticEvaluationError(index, ValueError("non-finite statistic value"))
    return out


def _eval_statistic_rows(stat: SmoothStatistic, mus: np.ndarray) -> np.ndarray:
    """Evaluate the statistic at every row of an (n, d) array of means."""
    if stat.vectorized:
        try:
            out = np.asarray(stat.eval(mus), dtype=float)
            if out.shape == (mus.shape[0], stat.dim_out) and np.all(np.isfinite(out)):
                return out
        except Exception:
            pass  # fall through to the row loop to report the failing index
    out = np.empty((mus.shape[0], stat.dim_out))
    for i in range(mus.shape[0]):
        out[i] = _eval_statistic(stat, mus[i], index=i)
    return out


def _acm_from_loo(theta_loo: np.ndarray, theta_hat: np.ndarray, component: int, n: int) -> JackknifeACM:
    dev = theta_loo - theta_hat
    v = float(n) * _pairwise_outer_sum(dev)
    return JackknifeACM(v=(v + v.T) / 2.0, component=component, n=n)


def jackknife_acm_all(
    xi: ObservationMatrix,
    p: ConcentrationMatrix,
    stat: SmoothStatistic,
) -> list[JackknifeACM]:
    """Fast-path jackknife covariance estimates for every component at once.

    Linear in n: the leave-one-out means come from the rank-one Gram
    update, never from refitting the weights.
    """
    g = gram(p)
    a = minimax_weights(p, g)
    h = leverages(p, g).h
    means = weighted_means(xi, a)

    # r[i] = p_i^T means - xi_i, shared by all components.
    r = p.probs @ means.means - xi.data
    scale = a.weights / (1.0 - h)[:, None]  # (n, M)

    out = []
    for k in range(p.n_components):
        loo_k = means.means[k][None, :] + scale[:, k, None] * r
        theta_hat = _eval_statistic(stat, means.means[k], index=None)
        theta_loo = _eval_statistic_rows(stat, loo_k)
        out.append(_acm_from_loo(theta_loo, theta_hat, component=k, n=xi.n))
    return out


def jackknife_acm_fast(
    xi: ObservationMatrix,
    p: ConcentrationMatrix,
    stat: SmoothStatistic,
    k: int,
) -> JackknifeACM:
    """Fast-path jackknife covariance estimate for component ``k``."""
    return jackknife_acm_all(xi, p, stat)[k]


def jackknife_acm_naive(
    xi: ObservationMatrix,
    p: ConcentrationMatrix,
    stat: SmoothStatistic,
    k: int,
) -> JackknifeACM:
    """Jackknife covariance by the literal definition; the fast-path oracle.

    For every deletion the weight matrix is recomputed from scratch from
    the concentration matrix with row i zeroed out (the zero row is a
    placeholder keeping observation numbering intact).  Quadratic in n.
    """
    g = gram(p)
    a = minimax_weights(p, g)
    leverages(p, g)  # same degenerate-deletion guard as the fast path
    means = weighted_means(xi, a)
    theta_hat = _eval_statistic(stat, means.means[k], index=None)

    n = xi.n
    theta_loo = np.empty((n, stat.dim_out))
    for i in range(n):
        p_del = p.probs.copy()
        p_del[i] = 0.0
        xi_del = xi.data.copy()
        xi_del[i] = 0.0
        gamma_del = p_del.T @ p_del
        det = float(np.linalg.det(gamma_del))
        if not det > 0.0:
            raise SingularGram(f"Gram matrix singular after deleting observation {i}")
        a_del = p_del @ np.linalg.inv(gamma_del)
        mean_del = a_del[:, k] @ xi_del
        theta_loo[i] = _eval_statistic(stat, mean_del, index=i)
    return _acm_from_loo(theta_loo, theta_hat, component=k, n=n)
