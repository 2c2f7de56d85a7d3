"""Desk-scale simulation studies and the sonar classification study.

Each function is a pure function of its seed, so scripts and the
acceptance tests share one implementation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evaluate, gicf, penalty_bounds, selection
from .model import PenaltyPair, SparsityGraph, sums_of_squares
from .simulate import BandedSpec, make_banded_sigma, sample_gaussian

# kappa used by the covglasso arm when a training split is rank deficient
SINGULAR_KAPPA = 1e-8


def _simulated(p, n, density, seed):
    truth = make_banded_sigma(BandedSpec(p, target_density=density, seed=seed))
    return truth, sample_gaussian(truth.sigma, n, seed + 1)


def ridge_path_kappa(n, seed, p=20, density=0.3, folds=5, kappa_ceiling=3.0,
                     kappa_count=30, config=gicf.GicfConfig()):
    """CV-selected kappa with lambda = 0 and the true graph imposed."""
    truth, Y = _simulated(p, n, density, seed)
    grid = penalty_bounds.kappa_path(kappa_ceiling, kappa_count)
    plan = selection.make_folds(n, folds, seed)
    return selection.cross_validate(Y, truth.graph, grid, plan, config).best.kappa


@dataclass(frozen=True)
class ArmComparison:
    n: int
    seed: int
    ridge_rmse: float
    ridge_penalty: PenaltyPair
    lasso_rmse: float
    lasso_penalty: PenaltyPair


def ridge_vs_lasso(n, seed, p=20, density=0.3, folds=5, r=10, s1=10,
                   config=gicf.GicfConfig()):
    """RMSE of CV-tuned estimates with kappa free and with kappa pinned.

    Both arms search the same lambda levels on the complete graph. The
    pinned arm uses kappa = 0 when every training split has more rows than
    columns and ``SINGULAR_KAPPA`` otherwise.
    """
    truth, Y = _simulated(p, n, density, seed)
    G = SparsityGraph.complete(p)
    S = sums_of_squares(Y)
    plan = selection.make_folds(n, folds, seed)
    grid = penalty_bounds.build_grid(S, G, r, s1)

    free = selection.cross_validate(Y, G, grid, plan, config).best
    full_rank = min(len(plan.train_rows(m)) for m in range(folds)) > p
    pinned_kappa = 0.0 if full_rank else SINGULAR_KAPPA
    lasso_grid = [PenaltyPair(lam, pinned_kappa) for lam in grid.lambda_levels]
    pinned = selection.cross_validate(Y, G, lasso_grid, plan, config).best

    def refit_rmse(pen):
        return evaluate.rmse(gicf.fit(S, n, G, pen, config).sigma_hat, truth.sigma)

    return ArmComparison(n, seed, refit_rmse(free), free, refit_rmse(pinned), pinned)


# bands reported for the sonar classes in earlier banded analyses
SONAR_BANDS = {"M": 31, "R": 17}


def load_sonar(path):
    """Features and R/M labels from the UCI sonar file (60 values then a label)."""
    from .cli import read_labeled
    X, labels = read_labeled(path)
    if X.shape[1] != 60 or not set(labels) <= {"R", "M"}:
        raise ValueError(f"{path}: expected 60 features and R/M labels")
    return X, labels


def sonar_graphs(labels, p, banded):
    if not banded:
        return {c: SparsityGraph.complete(p) for c in set(labels)}
    return {c: SparsityGraph.banded(p, SONAR_BANDS[c]) for c in set(labels)}


def sonar_error(X, labels, banded=False, mode="both", seed=0, outer_folds=5, inner_folds=10,
                r=10, s1=10, config=gicf.GicfConfig()):
    """Cross-validated QDA test error (percent) on the sonar data."""
    graphs = sonar_graphs(labels, np.shape(X)[1], banded)
    report = evaluate.qda_cross_validated_error(X, labels, graphs, mode, outer_folds,
                                                inner_folds, r, s1, seed, config)
    return report.error_rate
