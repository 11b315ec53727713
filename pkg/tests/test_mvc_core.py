import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvcjack import (
    EntryOutOfRange,
    ObservationMatrix,
    RowSumViolation,
    SingularGram,
    gram,
    minimax_weights,
    validate_concentrations,
    weighted_means,
)
from conftest import random_concentrations

INDICATOR = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
MIXED = np.array([[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]])


class TestValidateConcentrations:
    def test_indicator_design_valid(self):
        p = validate_concentrations(INDICATOR)
        assert p.n == 4 and p.n_components == 2
        np.testing.assert_array_equal(p.probs, INDICATOR)

    def test_row_sum_violation(self):
        with pytest.raises(RowSumViolation) as exc:
            validate_concentrations([[1.0, 0.0], [0.6, 0.6]])
        assert exc.value.row == 1

    def test_clamped_within_tolerance(self):
        p = validate_concentrations([[1.0 + 1e-15, -1e-15]])
        assert np.all(p.probs >= 0.0) and np.all(p.probs <= 1.0)
        np.testing.assert_allclose(p.probs.sum(axis=1), 1.0, atol=1e-15)

    def test_entry_out_of_range(self):
        with pytest.raises(EntryOutOfRange):
            validate_concentrations([[1.5, -0.5]])

    def test_near_one_row_sum_renormalized(self):
        p = validate_concentrations([[0.3000000001, 0.7]])
        np.testing.assert_allclose(p.probs.sum(axis=1), 1.0, atol=1e-15)


class TestGram:
    def test_indicator_design(self):
        g = gram(validate_concentrations(INDICATOR))
        np.testing.assert_allclose(g.gamma, [[2.0, 0.0], [0.0, 2.0]])
        np.testing.assert_allclose(g.inverse, [[0.5, 0.0], [0.0, 0.5]])
        assert g.det == pytest.approx(4.0)

    def test_rank_one_design_is_singular(self):
        with pytest.raises(SingularGram):
            gram(validate_concentrations(np.full((4, 2), 0.5)))

    def test_mixed_design_matches_direct_product(self):
        # Oracle: entrywise double loop over p^T p.
        g = gram(validate_concentrations(MIXED))
        oracle = np.array([[sum(MIXED[j, a] * MIXED[j, b] for j in range(3)) for b in range(2)] for a in range(2)])
        np.testing.assert_allclose(g.gamma, [[1.25, 0.25], [0.25, 1.25]], atol=1e-14)
        np.testing.assert_allclose(g.gamma, oracle, atol=1e-14)


class TestMinimaxWeights:
    def test_single_component_is_uniform(self):
        p = validate_concentrations(np.ones((7, 1)))
        a = minimax_weights(p, gram(p))
        np.testing.assert_allclose(a.weights, 1.0 / 7.0)

    def test_indicator_design_group_averaging(self):
        p = validate_concentrations(INDICATOR)
        a = minimax_weights(p, gram(p))
        np.testing.assert_allclose(a.weights, INDICATOR / 2.0)

    def test_matches_linear_solve_oracle(self):
        p = validate_concentrations(MIXED)
        g = gram(p)
        a = minimax_weights(p, g)
        oracle = np.linalg.solve(g.gamma, p.probs.T).T
        np.testing.assert_allclose(a.weights, oracle, atol=1e-12)


class TestWeightedMeans:
    def test_single_component_ordinary_mean(self):
        p = validate_concentrations(np.ones((3, 1)))
        xi = ObservationMatrix(np.array([[1.0], [2.0], [3.0]]))
        means = weighted_means(xi, minimax_weights(p, gram(p)))
        assert means.means[0, 0] == pytest.approx(2.0)

    def test_indicator_design_group_means(self):
        p = validate_concentrations(INDICATOR)
        xi = ObservationMatrix(np.array([[10.0], [20.0], [30.0], [40.0]]))
        means = weighted_means(xi, minimax_weights(p, gram(p)))
        np.testing.assert_allclose(means.means.ravel(), [15.0, 35.0])

    def test_matches_naive_double_loop(self):
        p = validate_concentrations(MIXED)
        a = minimax_weights(p, gram(p))
        xi = ObservationMatrix(np.array([[1.0], [2.0], [3.0]]))
        means = weighted_means(xi, a)
        for k in range(2):
            naive = sum(a.weights[j, k] * xi.data[j, 0] for j in range(3))
            assert means.means[k, 0] == pytest.approx(naive, abs=1e-13)


@given(n=st.integers(5, 60), m=st.integers(1, 3), seed=st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_unbiasedness_identity(n, m, seed):
    rng = np.random.default_rng(seed)
    p = random_concentrations(rng, n, m)
    a = minimax_weights(p, gram(p))
    assert np.max(np.abs(a.weights.T @ p.probs - np.eye(m))) < 1e-10


@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_indicator_exactness(seed):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=12)
    labels[:2] = [0, 1]  # both components occupied
    p = validate_concentrations(np.eye(2)[labels])
    xi = ObservationMatrix(rng.standard_normal((12, 3)))
    means = weighted_means(xi, minimax_weights(p, gram(p)))
    for k in range(2):
        np.testing.assert_allclose(means.means[k], xi.data[labels == k].mean(axis=0), atol=1e-13)


def test_permutation_equivariance(rng):
    p = random_concentrations(rng, 30, 2)
    xi = ObservationMatrix(rng.standard_normal((30, 2)))
    means = weighted_means(xi, minimax_weights(p, gram(p)))
    perm = rng.permutation(30)
    p2 = validate_concentrations(p.probs[perm])
    xi2 = ObservationMatrix(xi.data[perm])
    means2 = weighted_means(xi2, minimax_weights(p2, gram(p2)))
    np.testing.assert_allclose(means.means, means2.means, atol=1e-12)


def test_row_replication_scales_gram_and_weights(rng):
    p = random_concentrations(rng, 10, 2)
    g = gram(p)
    a = minimax_weights(p, g)
    r = 3
    p_rep = validate_concentrations(np.repeat(p.probs, r, axis=0))
    g_rep = gram(p_rep)
    a_rep = minimax_weights(p_rep, g_rep)
    np.testing.assert_allclose(g_rep.gamma, r * g.gamma, rtol=1e-12)
    np.testing.assert_allclose(a_rep.weights, np.repeat(a.weights, r, axis=0) / r, rtol=1e-10)


def test_max_weight_shrinks_with_replication(rng):
    # Weight decay: max |a| behaves like C/n under row replication.
    p = random_concentrations(rng, 15, 2)
    a = minimax_weights(p, gram(p))
    p4 = validate_concentrations(np.repeat(p.probs, 4, axis=0))
    a4 = minimax_weights(p4, gram(p4))
    assert np.max(np.abs(a4.weights)) == pytest.approx(np.max(np.abs(a.weights)) / 4.0, rel=1e-10)
