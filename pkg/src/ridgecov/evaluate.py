"""Estimation-quality metrics and a quadratic discriminant classifier built
on penalized covariance estimates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import gicf, linalg, penalty_bounds, selection
from .model import DataSet, PenaltyPair, SparsityGraph, center_columns, sums_of_squares


class BadClassCount(ValueError):
    pass


def rmse(est, truth):
    """Frobenius norm of the error divided by ``p**2``."""
    est, truth = np.asarray(est, dtype=float), np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {truth.shape}")
    return float(np.linalg.norm(est - truth, "fro") / est.shape[0] ** 2)


def entropy_loss(est, truth):
    """``tr(est truth^-1) + log|truth| - log|est|``; equals p when est == truth."""
    L = linalg.cholesky(truth)
    M = solve_triangular(L, solve_triangular(L, est, lower=True).T, lower=True)
    return float(np.trace(M) + linalg.log_det(truth) - linalg.log_det(est))


@dataclass(frozen=True)
class EdgeConfusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @staticmethod
    def _ratio(a, b):
        return a / b if b else 0.0

    @property
    def tpr(self):
        return self._ratio(self.tp, self.tp + self.fn)

    @property
    def tnr(self):
        return self._ratio(self.tn, self.tn + self.fp)

    @property
    def ppv(self):
        return self._ratio(self.tp, self.tp + self.fp)

    @property
    def f1(self):
        return self._ratio(2 * self.ppv * self.tpr, self.ppv + self.tpr)


def edge_confusion(est, G_true, zero_tol=1e-12):
    """Compare the support of ``est`` with the edges of ``G_true``."""
    est = np.asarray(est)
    p = est.shape[0]
    if G_true.p != p:
        raise ValueError("graph and estimate disagree on p")
    upper = np.triu_indices(p, 1)
    predicted = (np.abs(est) > zero_tol)[upper]
    actual = G_true.adjacency()[upper]
    return EdgeConfusion(tp=int(np.sum(predicted & actual)),
                         fp=int(np.sum(predicted & ~actual)),
                         tn=int(np.sum(~predicted & ~actual)),
                         fn=int(np.sum(~predicted & actual)))


@dataclass(frozen=True, eq=False)
class QdaModel:
    labels: tuple
    sigma_hat: dict
    mu_hat: dict
    pi_hat: dict
    _precision: dict = field(default_factory=dict, repr=False)
    _log_det: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for label in self.labels:
            self._precision[label] = linalg.inverse(self.sigma_hat[label])
            self._log_det[label] = linalg.log_det(self.sigma_hat[label])

    def scores(self, X):
        """Discriminant scores, one column per label."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty((X.shape[0], len(self.labels)))
        for c, label in enumerate(self.labels):
            R = X - self.mu_hat[label]
            maha = np.einsum("ij,jk,ik->i", R, self._precision[label], R)
            out[:, c] = -self._log_det[label] - maha + 2 * np.log(self.pi_hat[label])
        return out


def _per_class(value, labels):
    if isinstance(value, dict):
        return {label: value[label] for label in labels}
    return {label: value for label in labels}


def qda_fit(datasets, G, pen, config=gicf.GicfConfig()):
    """Per-class means, proportions, and penalized covariance estimates.

    ``G`` and ``pen`` may be single values or dicts keyed by class label.
    """
    labels = tuple(sorted(datasets))
    if len(labels) < 2:
        raise BadClassCount("QDA needs at least two classes")
    graphs, pens = _per_class(G, labels), _per_class(pen, labels)
    total = sum(datasets[label].n for label in labels)
    sigma, mu, pi = {}, {}, {}
    for label in labels:
        data = datasets[label]
        mu[label] = data.values.mean(axis=0)
        S = sums_of_squares(center_columns(data))
        sigma[label] = gicf.fit(S, data.n, graphs[label], pens[label], config).sigma_hat
        pi[label] = data.n / total
    return QdaModel(labels, sigma, mu, pi)


def qda_classify(model, x):
    """Label with the largest discriminant score; ties go to the first label."""
    return model.labels[int(np.argmax(model.scores(x)[0]))]


def qda_predict(model, X):
    return [model.labels[k] for k in np.argmax(model.scores(X), axis=1)]


PENALTY_MODES = ("both", "lasso", "ridge", "none")


def select_penalty(data, G, mode, r, s1, folds, seed, config=gicf.GicfConfig()):
    """Cross-validated penalty pair for one class (data centered per split)."""
    if mode == "none":
        return PenaltyPair(0.0, 0.0)
    S = sums_of_squares(center_columns(data))
    grid = penalty_bounds.build_grid(S, G, r, s1, include_lambda_zero=True)
    points = list(grid)
    if mode == "lasso":
        points = [pt for pt in points if pt.kappa == 0]
    elif mode == "ridge":
        points = [pt for pt in points if pt.lam == 0]
    plan = selection.make_folds(data.n, min(folds, data.n), seed)
    return selection.cross_validate(data, G, points, plan, config, center=True).best


@dataclass
class QdaReport:
    fold_errors: list
    fold_sizes: list
    failed_folds: list
    penalties: list

    @property
    def error_rate(self):
        """Misclassification percentage pooled over the successful folds."""
        ok = [k for k in range(len(self.fold_errors)) if k not in self.failed_folds]
        wrong = sum(self.fold_errors[k] * self.fold_sizes[k] for k in ok)
        size = sum(self.fold_sizes[k] for k in ok)
        return 100.0 * wrong / size if size else float("nan")


def qda_cross_validated_error(X, labels, G, mode="both", outer_folds=5, inner_folds=10,
                              r=10, s1=10, seed=0, config=gicf.GicfConfig()):
    """Test error of penalized QDA under outer K-fold cross-validation.

    Within each outer training split the penalties of every class are chosen
    by an inner cross-validation on that class alone.
    """
    if mode not in PENALTY_MODES:
        raise ValueError(f"mode must be one of {PENALTY_MODES}")
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    classes = tuple(sorted(set(labels.tolist())))
    if len(classes) < 2:
        raise BadClassCount("QDA needs at least two classes")
    graphs = _per_class(G, classes)
    outer = selection.make_folds(len(labels), outer_folds, seed)
    report = QdaReport([], [], [], [])
    for m in range(outer.M):
        train, test = outer.train_rows(m), outer.test_rows(m)
        report.fold_sizes.append(len(test))
        per_class = {c: DataSet(X[train][labels[train] == c]) for c in classes}
        try:
            if any(per_class[c].n < 2 for c in classes):
                raise BadClassCount(f"a class has fewer than 2 training rows in fold {m}")
            pens = {c: select_penalty(per_class[c], graphs[c], mode, r, s1, inner_folds,
                                      seed * 7919 + 31 * m + k, config)
                    for k, c in enumerate(classes)}
            model = qda_fit(per_class, graphs, pens, config)
        except (BadClassCount, selection.AllPairsFailed) + selection.FIT_FAILURES:
            report.failed_folds.append(m)
            report.fold_errors.append(float("nan"))
            report.penalties.append(None)
            continue
        predicted = np.array(qda_predict(model, X[test]), dtype=labels.dtype)
        report.fold_errors.append(float(np.mean(predicted != labels[test])))
        report.penalties.append(pens)
    return report
