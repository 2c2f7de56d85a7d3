import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ridgecov import gicf
from ridgecov.model import PenaltyPair, SparsityGraph
from ridgecov.penalty_bounds import (DegenerateDiagonal, DegenerateGridWarning, OutOfRange,
                                     build_grid, in_feasible_set, kappa_max, kappa_path,
                                     lambda_max)

from oracles import random_spd

seeds = st.integers(0, 2**32 - 1)
K2 = SparsityGraph.complete(2)
S_A = np.array([[2.0, 1.0], [1.0, 2.0]])
S_B = np.array([[1.0, 0.5], [0.5, 1.0]])


def test_lambda_max_examples():
    assert lambda_max(S_A, K2, 0.0) == pytest.approx(0.25)
    assert lambda_max(S_A, K2, 1.0) == pytest.approx(1 / 9)
    assert lambda_max(random_spd(np.random.default_rng(0), 4), SparsityGraph.empty(4), 0) == 0


def test_lambda_max_degenerate_diagonal():
    with pytest.raises(DegenerateDiagonal):
        lambda_max(np.array([[0.0, 0.0], [0.0, 1.0]]), K2, 0.0)


def test_kappa_max_examples():
    assert kappa_max(S_B, K2, 0.25) == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
    assert kappa_max(S_B, K2, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_kappa_max_out_of_range():
    for lam in (0.0, -1.0, 0.51):
        with pytest.raises(OutOfRange):
            kappa_max(S_B, K2, lam)


def random_instance(seed, p=None):
    rng = np.random.default_rng(seed)
    p = p or int(rng.integers(2, 8))
    S = random_spd(rng, p)
    pairs = [(j, k) for j in range(p) for k in range(j + 1, p)]
    keep = rng.random(len(pairs)) < 0.6
    keep[rng.integers(len(pairs))] = True
    return rng, S, SparsityGraph(p, frozenset(q for q, z in zip(pairs, keep) if z))


@given(seeds)
def test_boundary_identity(seed):
    rng, S, G = random_instance(seed)
    lam = lambda_max(S, G, 0.0) * (1 - rng.random())
    assert lambda_max(S, G, kappa_max(S, G, lam)) == pytest.approx(lam, rel=0, abs=1e-10)


@given(seeds)
def test_lambda_max_strictly_decreasing(seed):
    _, S, G = random_instance(seed)
    values = [lambda_max(S, G, k) for k in (0, 0.5, 1, 2, 4, 1e6)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-9 * values[0]


@given(seeds)
def test_equivalence_of_bounds(seed):
    rng, S, G = random_instance(seed)
    lam = lambda_max(S, G, 0.0) * (1 - rng.random())
    kmax = kappa_max(S, G, lam)
    for kappa in np.linspace(0, 3 * kmax + 1, 50):
        if abs(kappa - kmax) < 1e-9:
            continue
        assert (lam <= lambda_max(S, G, kappa)) == (kappa <= kmax)


def test_grid_for_diagonal_sample_is_origin():
    with pytest.warns(DegenerateGridWarning):
        grid = build_grid(np.diag([1.0, 2.0, 3.0]), SparsityGraph.complete(3), 5, 5)
    assert list(grid) == [PenaltyPair(0, 0)] and grid.degenerate


def test_grid_small_example():
    grid = build_grid(S_B, K2, 2, 1, include_lambda_zero=False)
    assert grid.lambda_levels == (0.25, 0.5)
    # kappa_max(0.5) / kappa_max(0.25) = 0, so the second level also gets one value
    assert grid.per_lambda_kappa_counts == (1, 1)
    assert list(grid) == [PenaltyPair(0.25, 0.0), PenaltyPair(0.5, 0.0)]


def test_grid_kappa_counts_follow_scaling_rule():
    _, S, G = random_instance(4, p=6)
    grid = build_grid(S, G, 6, 12, include_lambda_zero=False)
    k1 = kappa_max(S, G, grid.lambda_levels[0])
    for lam, count in zip(grid.lambda_levels[1:], grid.per_lambda_kappa_counts[1:]):
        assert count == math.floor(12 * kappa_max(S, G, lam) / k1) + 1
    assert grid.per_lambda_kappa_counts[0] == 12


def test_grid_zero_level_borrows_half_second_level():
    _, S, G = random_instance(5, p=5)
    grid = build_grid(S, G, 5, 7)
    assert grid.lambda_levels[0] == 0
    zero_level = [pt.kappa for pt in grid if pt.lam == 0]
    assert max(zero_level) == pytest.approx(kappa_max(S, G, grid.lambda_levels[1] / 2))
    ceiling = build_grid(S, G, 5, 7, kappa_ceiling=3.0)
    assert max(pt.kappa for pt in ceiling if pt.lam == 0) == 3.0


@given(seeds, st.integers(2, 8), st.integers(1, 8), st.booleans())
def test_grid_points_are_feasible_and_distinct(seed, r, s1, zero):
    _, S, G = random_instance(seed)
    grid = build_grid(S, G, r, s1, include_lambda_zero=zero)
    assert len(set(grid)) == len(grid)
    assert all(in_feasible_set(pt, S, G) for pt in grid)
    assert grid.lambda_levels[-1] == lambda_max(S, G, 0.0)


def test_kappa_path():
    grid = kappa_path(3.0, 30)
    assert len(grid) == 30 and grid.points[0] == PenaltyPair(0, 0)
    assert grid.points[-1] == PenaltyPair(0, 3.0)


@given(seeds, st.sampled_from([0.0, 0.5]))
def test_diagonal_fixed_point_just_above_boundary(seed, kappa):
    rng, S, G = random_instance(seed)
    lam = lambda_max(S, G, kappa) * (1 + 1e-6)
    res = gicf.fit(S, 50, G, PenaltyPair(lam, kappa))
    np.testing.assert_array_equal(res.sigma_hat, np.diag(np.diag(S) + kappa))
