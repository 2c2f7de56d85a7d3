"""Sparse and ridge-regularized covariance estimation by generalized
iterative conditional fitting."""
from .linalg import NotPositiveDefinite
from .model import DataSet, FitResult, PenaltyPair, SparsityGraph
from .gicf import GicfConfig, fit

__all__ = ["DataSet", "FitResult", "GicfConfig", "NotPositiveDefinite",
           "PenaltyPair", "SparsityGraph", "fit"]
