"""Generalized iterative conditional fitting.

Maximizes ``-log|Sigma| - tr(Sigma^-1 S) - lam * sum_{j!=k} |sigma_jk|
- kappa * tr(Sigma^-1)`` over positive definite matrices whose zero pattern
contains that of a :class:`~ridgecov.model.SparsityGraph`.

The ridge term is handled by replacing ``S`` with ``S + kappa * I`` (the
second-moment matrix of the data stacked on ``sqrt(n * kappa) * I``), so the
augmented design is never materialized. Each outer sweep visits every vertex
``i``, regresses variable ``i`` on the pseudo-predictors
``Y_{-i} Sigma_{-i,-i}^{-1}`` restricted to the neighbours of ``i``, and
solves the resulting lasso regression with unknown error variance by
coordinate descent. All cross products are expressed through ``S + kappa*I``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from . import linalg
from .linalg import NotPositiveDefinite
from .model import FitResult, PenaltyPair, SparsityGraph, objective, ridge_augment

_OK, _DEGENERATE, _NONFINITE = 0, 1, 2
TAU_RTOL = 1e-12


class DegenerateVariance(ArithmeticError):
    """The residual variance of a conditional regression collapsed to zero."""


class NonFiniteValue(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class GicfConfig:
    """Solver controls.

    ``outer_tolerance`` bounds the max-abs change of the estimate over one
    sweep, relative to the mean diagonal of ``S + kappa*I``.
    ``inner_tolerance`` bounds the max-abs change of the regression
    coefficients over one coordinate cycle, relative to ``s_ii + kappa``.
    ``warm_start`` of ``None`` starts from ``diag(S + kappa*I)``.
    """

    max_outer_iterations: int = 500
    outer_tolerance: float = 1e-6
    max_inner_iterations: int = 200
    inner_tolerance: float = 1e-8
    warm_start: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.max_outer_iterations < 1 or self.max_inner_iterations < 1:
            raise ValueError("iteration caps must be >= 1")
        if not (self.outer_tolerance > 0 and self.inner_tolerance > 0):
            raise ValueError("tolerances must be > 0")


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """Lasso regression of variable ``i`` on its pseudo-predictors.

    ``gram`` and ``moment`` are the cross products of the augmented
    pseudo-predictors with themselves and with the augmented response, i.e.
    they include the factor ``n``.
    """

    i: int
    boundary: np.ndarray
    gram: np.ndarray
    moment: np.ndarray
    s_kappa_ii: float
    n: int


def soft_threshold(x, lam):
    return np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)


@njit(cache=True)
def _soft(x, lam):
    if x > lam:
        return x - lam
    if x < -lam:
        return x + lam
    return 0.0


@njit(cache=True)
def _residual_variance(gram, moment, s_ii, beta):
    d = beta.shape[0]
    cross = 0.0
    quad = 0.0
    for j in range(d):
        if beta[j] == 0.0:
            continue
        cross += beta[j] * moment[j]
        row = 0.0
        for m in range(d):
            row += gram[j, m] * beta[m]
        quad += beta[j] * row
    return s_ii - (2.0 * cross - quad)


@njit(cache=True)
def _descend(gram, moment, s_ii, beta, lam, max_iter, tol):
    """Coordinate descent on per-sample cross products; updates ``beta``.

    Returns ``(tau, iterations, status)``.
    """
    d = beta.shape[0]
    threshold = tol * s_ii
    it = 0
    while it < max_iter:
        it += 1
        tau = _residual_variance(gram, moment, s_ii, beta)
        if not np.isfinite(tau):
            return tau, it, _NONFINITE
        if tau <= TAU_RTOL * s_ii:
            return tau, it, _DEGENERATE
        delta = 0.0
        for j in range(d):
            if gram[j, j] <= 0.0:
                new = 0.0
            else:
                r = moment[j]
                for m in range(d):
                    if m != j:
                        r -= gram[j, m] * beta[m]
                new = _soft(r / tau, lam) / (gram[j, j] / tau)
            if not np.isfinite(new):
                return tau, it, _NONFINITE
            change = abs(new - beta[j])
            if change > delta:
                delta = change
            beta[j] = new
        if delta <= threshold:
            break
    tau = _residual_variance(gram, moment, s_ii, beta)
    if not np.isfinite(tau):
        return tau, it, _NONFINITE
    if tau <= TAU_RTOL * s_ii:
        return tau, it, _DEGENERATE
    return tau, it, _OK


@njit(cache=True)
def _sweep(Sigma, Sk, nbr_ptr, nbr_idx, lam, max_inner, inner_tol):
    """One pass over all vertices, in place on ``Sigma``.

    Returns ``(status, vertex)``.
    """
    p = Sigma.shape[0]
    rest = np.empty(p - 1, dtype=np.int64)
    A = np.empty((p - 1, p - 1))
    S_rest = np.empty((p - 1, p - 1))
    s_col = np.empty(p - 1)
    for i in range(p):
        k = 0
        for j in range(p):
            if j != i:
                rest[k] = j
                k += 1
        s_ii = Sk[i, i]
        start, stop = nbr_ptr[i], nbr_ptr[i + 1]
        d = stop - start
        if d == 0:
            # the Schur complement is exactly tau when no covariances remain
            for a in range(p - 1):
                Sigma[rest[a], i] = 0.0
                Sigma[i, rest[a]] = 0.0
            Sigma[i, i] = s_ii
            continue
        pos = np.empty(d, dtype=np.int64)
        for a in range(d):
            j = nbr_idx[start + a]
            pos[a] = j if j < i else j - 1
        for a in range(p - 1):
            s_col[a] = Sk[rest[a], i]
            for b in range(p - 1):
                A[a, b] = Sigma[rest[a], rest[b]]
                S_rest[a, b] = Sk[rest[a], rest[b]]
        # columns bd(i) of inv(Sigma_{-i,-i}), solved afresh: a precision matrix
        # carried across vertices by rank-one updates drifts when Sigma is
        # badly conditioned (tiny kappa with singular S)
        E = np.zeros((p - 1, d))
        for b in range(d):
            E[pos[b], b] = 1.0
        W = np.linalg.solve(A, E)
        SW = S_rest @ W
        gram = W.T @ SW
        for a in range(d):
            for b in range(a):
                avg = 0.5 * (gram[a, b] + gram[b, a])
                gram[a, b] = avg
                gram[b, a] = avg
        moment = W.T @ s_col
        beta = np.empty(d)
        for a in range(d):
            beta[a] = Sigma[nbr_idx[start + a], i]
        tau, _, status = _descend(gram, moment, s_ii, beta, lam, max_inner, inner_tol)
        if status != _OK:
            return status, i
        quad = 0.0
        for a in range(d):
            for b in range(d):
                quad += beta[a] * W[pos[a], b] * beta[b]
        for a in range(p - 1):
            Sigma[rest[a], i] = 0.0
            Sigma[i, rest[a]] = 0.0
        for b in range(d):
            j = nbr_idx[start + b]
            Sigma[j, i] = beta[b]
            Sigma[i, j] = beta[b]
        Sigma[i, i] = tau + quad
    return _OK, -1


def _neighbour_lists(G):
    ptr = [0]
    idx = []
    for i in range(G.p):
        bd = G.boundary(i)
        idx.extend(bd.tolist())
        ptr.append(len(idx))
    return np.array(ptr, dtype=np.int64), np.array(idx, dtype=np.int64)


def _raise_for(status, i):
    if status == _DEGENERATE:
        raise DegenerateVariance(
            f"residual variance of vertex {i} collapsed; use kappa > 0 for singular S")
    if status == _NONFINITE:
        raise NonFiniteValue(f"non-finite update at vertex {i}")


def build_regression(Sigma, S_kappa, i, G, n):
    """Cross products of the augmented pseudo-predictors for vertex ``i``.

    With ``W`` the columns ``bd(i)`` of ``inv(Sigma_{-i,-i})``, the Gram
    matrix is ``n W' S_kappa_{-i,-i} W`` and the moment vector is
    ``n W' S_kappa_{-i,i}``.
    """
    Sigma = np.asarray(Sigma, dtype=float)
    S_kappa = np.asarray(S_kappa, dtype=float)
    p = Sigma.shape[0]
    rest = linalg.complement(p, i)
    bd = G.boundary(i)
    if bd.size == 0:
        return RegressionProblem(i, bd, np.zeros((0, 0)), np.zeros(0),
                                 float(S_kappa[i, i]), n)
    A_inv = linalg.inverse(linalg.submatrix(Sigma, rest, rest))
    W = A_inv[:, np.searchsorted(rest, bd)]
    gram = n * W.T @ linalg.submatrix(S_kappa, rest, rest) @ W
    moment = n * W.T @ S_kappa[rest, i]
    return RegressionProblem(i, bd, 0.5 * (gram + gram.T), moment, float(S_kappa[i, i]), n)


def gicf_step(problem, sigma_start, lam, config=GicfConfig()):
    """Penalized regression of one variable with unknown error variance.

    Alternates the closed-form residual-variance update with one cycle of
    soft-thresholded coordinate updates until the coefficients settle.

    Returns
    -------
    tau : float
        Residual variance at the returned coefficients.
    sigma : ndarray
        Covariances of variable ``i`` with its neighbours.
    """
    beta = np.array(sigma_start, dtype=float)
    if beta.shape != problem.boundary.shape:
        raise ValueError("sigma_start must have one entry per neighbour")
    if beta.size == 0:
        return problem.s_kappa_ii, beta
    tau, _, status = _descend(problem.gram / problem.n, problem.moment / problem.n,
                              problem.s_kappa_ii, beta, float(lam),
                              config.max_inner_iterations, config.inner_tolerance)
    _raise_for(status, problem.i)
    return tau, beta


def fit(S, n, G, pen, config=GicfConfig()):
    """Penalized maximum likelihood estimate of a covariance matrix.

    Parameters
    ----------
    S : ndarray, shape (p, p)
        Second-moment matrix ``Y.T @ Y / n``.
    n : int
        Number of observations behind ``S``.
    G : SparsityGraph
        Allowed nonzero off-diagonal positions.
    pen : PenaltyPair
    config : GicfConfig

    Returns
    -------
    FitResult
        ``objective_trace`` holds the penalized loglikelihood after each sweep.

    Raises
    ------
    NotPositiveDefinite
        If ``kappa == 0`` and ``S`` is singular.
    """
    S = linalg.as_symmetric(S)
    p = S.shape[0]
    if G.p != p:
        raise ValueError(f"graph has {G.p} vertices, S is {p} x {p}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if pen.kappa == 0:
        linalg.cholesky(S)
    Sk = ridge_augment(S, pen.kappa)

    if config.warm_start is None:
        Sigma = np.diag(np.diag(Sk))
    else:
        Sigma = linalg.as_symmetric(config.warm_start)
        off_graph = ~G.adjacency() & ~np.eye(p, dtype=bool)
        if Sigma.shape != (p, p) or np.any(Sigma[off_graph] != 0):
            raise ValueError("warm start must be p x p and adapted to the graph")
        linalg.cholesky(Sigma)

    if p == 1:
        Sigma = Sk.copy()
        return FitResult(Sigma, [objective(S, Sigma, pen)], 0, True, pen)

    ptr, idx = _neighbour_lists(G)
    scale = np.mean(np.diag(Sk))
    trace = []
    converged = False
    it = 0
    for it in range(1, config.max_outer_iterations + 1):
        previous = Sigma.copy()
        status, vertex = _sweep(Sigma, Sk, ptr, idx, pen.lam,
                                config.max_inner_iterations, config.inner_tolerance)
        _raise_for(status, vertex)
        if not np.all(np.isfinite(Sigma)):
            raise NonFiniteValue("estimate became non-finite")
        trace.append(objective(S, Sigma, pen))
        if np.max(np.abs(Sigma - previous)) < config.outer_tolerance * scale:
            converged = True
            break
    return FitResult(Sigma, trace, it, converged, pen)
