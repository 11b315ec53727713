"""Mixture samples with varying concentrations: weights and weighted means.

Each observation j carries a known vector of mixing probabilities
p_j = (p_j^(1), ..., p_j^(M)).  Component means are estimated by weighted
sample means with the minimax weights a = p @ inv(p.T @ p), which satisfy
the unbiasedness condition a.T @ p = I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EntryOutOfRange,
    RowSumViolation,
    SingularGram,
)

ENTRY_TOL = 1e-12
ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ObservationMatrix:
    """n x d matrix of observed variables, one observation per row."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DimensionMismatch(f"observations must be a nonempty 2-d matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DimensionMismatch("observations contain non-finite entries")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ConcentrationMatrix:
    """Validated n x M matrix of per-observation mixing probabilities."""

    probs: np.ndarray

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @property
    def n_components(self) -> int:
        return self.probs.shape[1]


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix of the concentration columns with its inverse and determinant."""

    gamma: np.ndarray
    inverse: np.ndarray
    det: float


@dataclass(frozen=True)
class WeightMatrix:
    """n x M minimax weights; column k holds the weights for component k."""

    weights: np.ndarray


@dataclass(frozen=True)
class ComponentMeans:
    """M x d matrix of weighted component means, one component per row."""

    means: np.ndarray


def validate_concentrations(probs) -> ConcentrationMatrix:
    """Validate a raw n x M concentration matrix.

    Entries may stray outside [0, 1] by at most ``ENTRY_TOL`` (they are
    clamped); row sums may deviate from 1 by at most ``ROW_SUM_TOL`` (rows
    are renormalized).  Larger violations raise.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 2 or p.size == 0:
        raise DimensionMismatch(f"concentrations must be a nonempty 2-d matrix, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise EntryOutOfRange("concentrations contain non-finite entries")
    if np.any(p < -ENTRY_TOL) or np.any(p > 1.0 + ENTRY_TOL):
        bad = np.argwhere((p < -ENTRY_TOL) | (p > 1.0 + ENTRY_TOL))[0]
        raise EntryOutOfRange(
            f"concentration entry at row {bad[0]}, column {bad[1]} is outside [0, 1]: {p[bad[0], bad[1]]!r}"
        )
    p = np.clip(p, 0.0, 1.0)
    sums = p.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > ROW_SUM_TOL):
        row = int(np.argmax(off > ROW_SUM_TOL))
        raise RowSumViolation(row, float(sums[row]))
    return ConcentrationMatrix(p / sums[:, None])


def gram(p: ConcentrationMatrix) -> GramMatrix:
    """Gram matrix p.T @ p of the concentration columns, with inverse.

    Raises ``SingularGram`` when the determinant falls below the
    scale-aware threshold 1e-12 * n**M (entries of the Gram matrix grow
    like n), signalling linearly dependent concentration columns.
    """
    g = p.probs.T @ p.probs
    g = (g + g.T) / 2.0
    det = float(np.linalg.det(g))
    threshold = 1e-12 * float(p.n) ** p.n_components
    if not det > threshold:
        raise SingularGram(f"Gram determinant {det!r} below threshold {threshold!r}; concentration columns are dependent")
    return GramMatrix(gamma=g, inverse=np.linalg.inv(g), det=det)


def minimax_weights(p: ConcentrationMatrix, g: GramMatrix) -> WeightMatrix:
    """Minimax weights a = p @ inv(Gram); satisfy a.T @ p = identity."""
    return WeightMatrix(p.probs @ g.inverse)


def weighted_means(xi: ObservationMatrix, a: WeightMatrix) -> ComponentMeans:
    """Weighted component means: row k is sum_j a_j^(k) * xi_j."""
    if xi.n != a.weights.shape[0]:
        raise DimensionMismatch(
            f"observation count {xi.n} does not match weight rows {a.weights.shape[0]}"
        )
    return ComponentMeans(a.weights.T @ xi.data)
