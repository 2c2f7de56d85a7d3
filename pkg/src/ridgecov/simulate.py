"""Banded covariance matrices with a calibrated condition number, and
Gaussian samples from them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .model import DataSet, SparsityGraph


@dataclass(frozen=True)
class BandedSpec:
    """Either ``bands`` or ``target_density`` must be given."""

    p: int
    bands: Optional[int] = None
    target_density: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if (self.bands is None) == (self.target_density is None):
            raise ValueError("give exactly one of bands and target_density")
        if self.bands is not None and not 0 <= self.bands < self.p:
            raise ValueError(f"bands must lie in [0, p), got {self.bands}")
        if self.target_density is not None and not 0 < self.target_density <= 1:
            raise ValueError("target_density must lie in (0, 1]")

    def resolved_bands(self):
        if self.bands is not None:
            return self.bands
        return bands_for_density(self.p, self.target_density)


def band_density(p, b):
    """Edge density of the graph with ``|i - j| <= b``."""
    pairs = p * (p - 1) // 2
    return sum(p - k for k in range(1, b + 1)) / pairs if pairs else 0.0


def bands_for_density(p, target):
    # ties resolve to the smaller b because min keeps the first minimizer
    return min(range(p), key=lambda b: abs(band_density(p, b) - target))


@dataclass(frozen=True)
class BandedCovariance:
    sigma: np.ndarray
    graph: SparsityGraph
    bands: int
    diagonal: float
    target_reached: bool


def make_banded_sigma(spec):
    """Banded covariance with random +-1 off-diagonals and condition number p.

    The diagonal constant ``c`` solves
    ``(c + mu_max) / (c + mu_min) = p`` where ``mu`` are the eigenvalues of
    the off-diagonal band. Without bands the target is unreachable and the
    identity is returned with ``target_reached`` false.
    """
    p, b = spec.p, spec.resolved_bands()
    graph = SparsityGraph.banded(p, b)
    rng = np.random.default_rng(spec.seed)
    band = np.zeros((p, p))
    if graph.edges:
        j, k = np.array(sorted(graph.edges)).T
        band[j, k] = rng.choice((-1.0, 1.0), size=j.size)
        band += band.T
    if b == 0 or p == 1:
        return BandedCovariance(np.eye(p), graph, b, 1.0, p == 1)
    mu = linalg.eigenvalues(band)
    c = (mu[-1] - p * mu[0]) / (p - 1)
    sigma = band + c * np.eye(p)
    return BandedCovariance(sigma, graph, b, float(c), True)


def sample_gaussian(Sigma, n, seed):
    """``n`` zero-mean Gaussian rows with covariance ``Sigma``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    L = linalg.cholesky(Sigma)
    z = np.random.default_rng(seed).standard_normal((n, L.shape[0]))
    return DataSet(z @ L.T)
