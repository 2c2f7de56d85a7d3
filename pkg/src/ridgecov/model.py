"""Shared vocabulary: sparsity graphs, data sets, penalties, fit results,
and the penalized Gaussian loglikelihood they feed into."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg


@dataclass(frozen=True)
class SparsityGraph:
    """Undirected graph on ``p`` vertices; an edge allows a nonzero covariance.

    Edges are stored as canonical ``(min, max)`` pairs.
    """

    p: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("graph needs at least one vertex")
        canon = set()
        for j, k in self.edges:
            j, k = int(j), int(k)
            if j == k:
                raise ValueError(f"self-loop at vertex {j}")
            if not (0 <= j < self.p and 0 <= k < self.p):
                raise ValueError(f"edge ({j}, {k}) out of range for p={self.p}")
            canon.add((min(j, k), max(j, k)))
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def complete(cls, p):
        return cls(p, frozenset(itertools.combinations(range(p), 2)))

    @classmethod
    def empty(cls, p):
        return cls(p, frozenset())

    @classmethod
    def banded(cls, p, bands):
        return cls(p, frozenset((j, k) for j in range(p)
                                for k in range(j + 1, min(p, j + bands + 1))))

    @classmethod
    def from_adjacency(cls, A):
        A = np.asarray(A)
        p = A.shape[0]
        return cls(p, frozenset((j, k) for j, k in zip(*np.nonzero(np.triu(A, 1)))))

    @classmethod
    def from_support(cls, Sigma, zero_tol=0.0):
        """Graph of off-diagonal entries with ``|Sigma[j, k]| > zero_tol``."""
        return cls.from_adjacency(np.abs(np.asarray(Sigma)) > zero_tol)

    def boundary(self, i):
        """Sorted neighbours of vertex ``i``."""
        return np.array(sorted(k if j == i else j for j, k in self.edges if i in (j, k)),
                        dtype=np.intp)

    def adjacency(self):
        A = np.zeros((self.p, self.p), dtype=bool)
        for j, k in self.edges:
            A[j, k] = A[k, j] = True
        return A

    def density(self):
        pairs = self.p * (self.p - 1) // 2
        return len(self.edges) / pairs if pairs else 0.0

    def __contains__(self, pair):
        j, k = pair
        return (min(j, k), max(j, k)) in self.edges

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class DataSet:
    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float, ndmin=2)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"data must be a non-empty n x p matrix, got {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def rows(self, index):
        return DataSet(self.values[np.asarray(index)], centered=False)


@dataclass(frozen=True, order=True)
class PenaltyPair:
    """Off-diagonal l1 weight ``lam`` and ridge weight ``kappa``."""

    lam: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        for name in ("lam", "kappa"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)


@dataclass
class FitResult:
    sigma_hat: np.ndarray
    objective_trace: list
    outer_iterations: int
    converged: bool
    penalty: PenaltyPair


def sums_of_squares(Y):
    """``S = Y.T @ Y / n`` for a :class:`DataSet` or raw array."""
    values = Y.values if isinstance(Y, DataSet) else np.asarray(Y, dtype=float)
    S = values.T @ values / values.shape[0]
    return 0.5 * (S + S.T)


def center_columns(Y):
    values = Y.values if isinstance(Y, DataSet) else np.asarray(Y, dtype=float)
    return DataSet(values - values.mean(axis=0), centered=True)


def ridge_augment(S, kappa):
    """``S + kappa * I``; the sample moments of the ridge-augmented data."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    S = np.array(S, dtype=float)
    S[np.diag_indices_from(S)] += kappa
    return S


def loglik(S, Sigma):
    """Gaussian loglikelihood ``-log|Sigma| - tr(Sigma^-1 S)`` (scaled by 2/n)."""
    Theta = linalg.inverse(Sigma)
    return -linalg.log_det(Sigma) - np.sum(Theta * S)


def penalty_value(Sigma, pen):
    Sigma = np.asarray(Sigma)
    off = np.abs(Sigma).sum() - np.abs(np.diag(Sigma)).sum()
    ridge = np.trace(linalg.inverse(Sigma)) if pen.kappa else 0.0
    return pen.lam * off + pen.kappa * ridge


def objective(S, Sigma, pen):
    """Penalized loglikelihood maximized by the solver."""
    return loglik(S, Sigma) - penalty_value(Sigma, pen)
