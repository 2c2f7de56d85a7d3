import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ridgecov.model import DataSet, PenaltyPair, SparsityGraph, loglik, sums_of_squares
from ridgecov.penalty_bounds import build_grid
from ridgecov.selection import (AllPairsFailed, BadFoldCount, best_pair, cross_validate,
                                make_folds, split_moments)
from ridgecov.simulate import sample_gaussian
from ridgecov import gicf


def fold_sizes(plan):
    return sorted(Counter(plan.assignments.tolist()).values(), reverse=True)


def test_fold_sizes_examples():
    assert fold_sizes(make_folds(10, 5, 0)) == [2] * 5
    assert fold_sizes(make_folds(7, 3, 0)) == [3, 2, 2]
    assert fold_sizes(make_folds(100, 5, 9)) == [20] * 5


@given(st.integers(2, 200), st.data())
def test_folds_balanced_and_deterministic(n, data):
    M = data.draw(st.integers(2, n))
    seed = data.draw(st.integers(0, 2**31))
    plan = make_folds(n, M, seed)
    sizes = fold_sizes(plan)
    assert len(sizes) == M and sizes[0] - sizes[-1] <= 1
    np.testing.assert_array_equal(plan.assignments, make_folds(n, M, seed).assignments)


@pytest.mark.parametrize("n, M", [(5, 1), (5, 6), (3, 0)])
def test_bad_fold_count(n, M):
    with pytest.raises(BadFoldCount):
        make_folds(n, M, 0)


def sample(p, n, seed, Sigma=None):
    return sample_gaussian(np.eye(p) if Sigma is None else Sigma, n, seed)


def test_single_candidate():
    Y = sample(4, 200, 1)
    res = cross_validate(Y, SparsityGraph.complete(4), [PenaltyPair(0, 0)], make_folds(200, 5, 0))
    assert res.best == PenaltyPair(0, 0) and res.per_fold_failures == 0


def test_score_decomposition():
    Y = sample(5, 60, 2)
    G = SparsityGraph.banded(5, 2)
    plan = make_folds(60, 4, 3)
    grid = build_grid(sums_of_squares(Y.values), G, 3, 3)
    res = cross_validate(Y, G, grid, plan, warm_start=False)
    for pair in grid:
        total = 0.0
        for m in range(plan.M):
            tr, te = plan.train_rows(m), plan.test_rows(m)
            S_tr = sums_of_squares(Y.values[tr])
            Sigma = gicf.fit(S_tr, len(tr), G, pair).sigma_hat
            total += loglik(sums_of_squares(Y.values[te]), Sigma)
        assert res.scores[pair] == pytest.approx(total, abs=1e-10)


def test_grid_order_and_warm_start_do_not_move_best():
    Y = sample(6, 40, 4)
    G = SparsityGraph.complete(6)
    plan = make_folds(40, 5, 5)
    grid = list(build_grid(sums_of_squares(Y.values), G, 4, 4))
    reference = cross_validate(Y, G, grid, plan)
    random.Random(0).shuffle(grid)
    shuffled = cross_validate(Y, G, grid, plan)
    assert shuffled.best == reference.best
    assert shuffled.scores == reference.scores
    cold = cross_validate(Y, G, grid, plan, warm_start=False)
    assert cold.best == reference.best


def test_tie_break_prefers_larger_penalties():
    scores = {PenaltyPair(0.1, 0.0): 1.0, PenaltyPair(0.2, 0.0): 1.0,
              PenaltyPair(0.2, 0.3): 1.0, PenaltyPair(0.3, 0.0): 0.5}
    assert best_pair(scores) == PenaltyPair(0.2, 0.3)


def test_diagonal_truth_prefers_large_lambda():
    p, n = 8, 40
    hits = 0
    for seed in range(10):
        Y = sample(p, n, 100 + seed, np.diag(np.linspace(1, 3, p)))
        G = SparsityGraph.complete(p)
        grid = build_grid(sums_of_squares(Y.values), G, 10, 3, include_lambda_zero=False)
        res = cross_validate(Y, G, grid, make_folds(n, 5, seed))
        levels = grid.lambda_levels
        hits += res.best.lam >= levels[len(levels) // 2]
    assert hits >= 8


def test_centering_uses_training_means_only():
    rng = np.random.default_rng(0)
    Y = rng.normal(size=(12, 3)) + 5.0
    train, test = np.arange(8), np.arange(8, 12)
    S_tr, S_te = split_moments(DataSet(Y), train, test, center=True)
    mu = Y[train].mean(axis=0)
    np.testing.assert_allclose(S_tr, sums_of_squares(Y[train] - mu))
    np.testing.assert_allclose(S_te, sums_of_squares(Y[test] - mu))
    assert not np.allclose(S_te, sums_of_squares(Y[test] - Y[test].mean(axis=0)))


def test_failed_folds_score_minus_infinity():
    # p > training rows with kappa = 0 leaves a singular S on every fold
    Y = sample(6, 5, 6)
    G = SparsityGraph.complete(6)
    plan = make_folds(5, 5, 0)
    with pytest.raises(AllPairsFailed):
        cross_validate(Y, G, [PenaltyPair(0, 0)], plan)
    res = cross_validate(Y, G, [PenaltyPair(0, 0), PenaltyPair(0, 1.0)], plan)
    assert res.scores[PenaltyPair(0, 0)] == -np.inf
    assert res.per_fold_failures == plan.M
    assert res.best == PenaltyPair(0, 1.0)
