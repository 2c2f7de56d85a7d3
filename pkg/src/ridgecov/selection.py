"""M-fold cross-validated loglikelihood over a penalty grid."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from itertools import groupby

import numpy as np

from . import gicf
from .linalg import NotPositiveDefinite
from .model import DataSet, PenaltyPair, loglik, sums_of_squares

FIT_FAILURES = (NotPositiveDefinite, gicf.DegenerateVariance, gicf.NonFiniteValue)


class BadFoldCount(ValueError):
    pass


class AllPairsFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class CvPlan:
    M: int
    assignments: np.ndarray
    seed: int

    def test_rows(self, m):
        return np.flatnonzero(self.assignments == m)

    def train_rows(self, m):
        return np.flatnonzero(self.assignments != m)


@dataclass
class CvResult:
    best: PenaltyPair
    scores: dict
    per_fold_failures: int
    fold_scores: dict = field(default_factory=dict)


def make_folds(n, M, seed):
    """Deal a seeded random permutation of ``range(n)`` into ``M`` folds."""
    if not 2 <= M <= n:
        raise BadFoldCount(f"need 2 <= M <= n, got M={M}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[perm] = np.arange(n) % M
    return CvPlan(M, assignments, seed)


def split_moments(Y, train, test, center):
    """Training and held-out second-moment matrices for one fold.

    When ``center`` is set both parts are centered with the training means.
    """
    values = Y.values if isinstance(Y, DataSet) else np.asarray(Y, dtype=float)
    Ytr, Yte = values[train], values[test]
    if center:
        mu = Ytr.mean(axis=0)
        Ytr, Yte = Ytr - mu, Yte - mu
    return sums_of_squares(Ytr), sums_of_squares(Yte)


def best_pair(scores):
    """Argmax of ``scores``; ties go to the larger lam, then the larger kappa."""
    return max(scores, key=lambda pair: (scores[pair], pair.lam, pair.kappa))


def _fit_path(S, n, G, pairs, config, warm_start):
    """Fit each pair of a single lam level in increasing kappa order."""
    out = {}
    previous = None
    for pair in pairs:
        result = None
        if warm_start and previous is not None:
            try:
                result = gicf.fit(S, n, G, pair,
                                  dataclasses.replace(config, warm_start=previous))
            except FIT_FAILURES:
                result = None
        if result is None:
            try:
                result = gicf.fit(S, n, G, pair, config)
            except FIT_FAILURES:
                out[pair] = None
                continue
        out[pair] = result.sigma_hat
        previous = result.sigma_hat
    return out


def cross_validate(Y, G, grid, plan, config=gicf.GicfConfig(), center=False,
                   warm_start=True):
    """Sum of held-out loglikelihoods for every pair in ``grid``.

    Parameters
    ----------
    Y : DataSet
    G : SparsityGraph
    grid : iterable of PenaltyPair
    plan : CvPlan
    config : GicfConfig
        ``config.warm_start`` is ignored; paths along kappa are warm started
        from the previous solution when ``warm_start`` is true.
    center : bool
        Center each split with its training column means.

    Raises
    ------
    AllPairsFailed
        If no pair could be fitted on every fold.
    """
    pairs = sorted(set(grid))
    if not pairs:
        raise ValueError("empty penalty grid")
    config = dataclasses.replace(config, warm_start=None)
    fold_scores = {pair: [] for pair in pairs}
    failures = 0
    for m in range(plan.M):
        S_train, S_test = split_moments(Y, plan.train_rows(m), plan.test_rows(m), center)
        n_train = len(plan.train_rows(m))
        for _, level in groupby(pairs, key=lambda pair: pair.lam):
            fitted = _fit_path(S_train, n_train, G, list(level), config, warm_start)
            for pair, Sigma in fitted.items():
                if Sigma is None:
                    failures += 1
                    fold_scores[pair].append(-np.inf)
                else:
                    fold_scores[pair].append(loglik(S_test, Sigma))
    scores = {pair: float(np.sum(v)) for pair, v in fold_scores.items()}
    if all(s == -np.inf for s in scores.values()):
        raise AllPairsFailed("every penalty pair failed on at least one fold")
    return CvResult(best_pair(scores), scores, failures, fold_scores)
