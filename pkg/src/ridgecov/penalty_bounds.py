"""Largest useful penalties and the finite penalty grid.

For a fixed ridge level the estimate started from ``diag(S + kappa*I)`` stays
diagonal once ``lam >= lambda_max(kappa)``; ``kappa_max(lam)`` inverts that
boundary. Together they bound the region of penalty pairs worth searching.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import PenaltyPair


class DegenerateDiagonal(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class DegenerateGridWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PenaltyGrid:
    points: tuple
    lambda_levels: tuple
    per_lambda_kappa_counts: tuple
    degenerate: bool = False

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _edge_arrays(S, G):
    S = np.asarray(S, dtype=float)
    if not G.edges:
        return S, np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    i, j = np.array(sorted(G.edges)).T
    return S, i, j


def lambda_max(S, G, kappa):
    """``max |s_ij| / ((s_ii + kappa)(s_jj + kappa))`` over the edges of ``G``."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    S, i, j = _edge_arrays(S, G)
    if i.size == 0:
        return 0.0
    di, dj = S[i, i] + kappa, S[j, j] + kappa
    if np.any(di <= 0) or np.any(dj <= 0):
        raise DegenerateDiagonal("non-positive diagonal entry of S + kappa*I on an edge")
    return float(np.max(np.abs(S[i, j]) / (di * dj)))


def kappa_max(S, G, lam):
    """Largest ridge level at which ``lam`` still does not exceed ``lambda_max``."""
    top = lambda_max(S, G, 0.0)
    if not (lam > 0) or lam > top:
        raise OutOfRange(f"lam must lie in (0, {top:.6g}], got {lam}")
    S, i, j = _edge_arrays(S, G)
    half_sum = 0.5 * (S[i, i] + S[j, j])
    g = np.abs(S[i, j]) / lam - S[i, i] * S[j, j]
    ok = g >= 0
    if not ok.any():
        # only reachable through rounding at lam == lambda_max(0)
        return 0.0
    kappas = np.sqrt(half_sum[ok] ** 2 + g[ok]) - half_sum[ok]
    return float(max(np.max(kappas), 0.0))


def _levels(upper, count, include_zero):
    if include_zero:
        levels = [upper * k / (count - 1) for k in range(count)]
    else:
        levels = [upper * k / count for k in range(1, count + 1)]
    levels[-1] = upper
    return levels


def kappa_path(kappa_ceiling, count, lam=0.0):
    """Grid of ``count`` ridge levels equally spaced on ``[0, kappa_ceiling]``."""
    if count < 1 or kappa_ceiling < 0:
        raise ValueError("need count >= 1 and kappa_ceiling >= 0")
    kappas = _levels(kappa_ceiling, count, True) if count > 1 else [0.0]
    points = tuple(dict.fromkeys(PenaltyPair(lam, k) for k in kappas))
    return PenaltyGrid(points, (lam,), (len(points),))


def build_grid(S, G, r, s1, include_lambda_zero=True, kappa_ceiling=None):
    """Finite subset of the feasible penalty region.

    ``r`` lasso levels are spread evenly over ``[0, lambda_max(0)]`` (zero
    excluded unless ``include_lambda_zero``). Level ``i`` receives ``s_i``
    ridge levels evenly spaced on ``[0, kappa_max(lam_i)]``, with ``s_1 = s1``
    and ``s_i = floor(s1 * kappa_max(lam_i) / kappa_max(lam_1)) + 1``. A zero
    lasso level borrows the ridge range of ``lam_2 / 2`` unless
    ``kappa_ceiling`` is given.
    """
    if r < 2 or s1 < 1:
        raise ValueError("need r >= 2 and s1 >= 1")
    top = lambda_max(S, G, 0.0)
    if top == 0:
        warnings.warn("S is diagonal on the graph; grid reduced to (0, 0)",
                      DegenerateGridWarning, stacklevel=2)
        return PenaltyGrid((PenaltyPair(0.0, 0.0),), (0.0,), (1,), degenerate=True)

    lams = _levels(top, r, include_lambda_zero)
    ceilings = []
    for k, lam in enumerate(lams):
        if lam == 0:
            ceilings.append(kappa_max(S, G, lams[1] / 2) if kappa_ceiling is None
                            else float(kappa_ceiling))
        else:
            ceilings.append(kappa_max(S, G, min(lam, top)))

    points, counts = [], []
    for k, (lam, ceiling) in enumerate(zip(lams, ceilings)):
        if k == 0:
            count = s1
        elif ceilings[0] > 0:
            count = math.floor(s1 * ceiling / ceilings[0]) + 1
        else:
            count = 1
        kappas = np.linspace(0.0, ceiling, count) if count > 1 else np.zeros(1)
        counts.append(count)
        points.extend(PenaltyPair(lam, float(kap)) for kap in kappas)
    points = tuple(dict.fromkeys(points))
    return PenaltyGrid(points, tuple(lams), tuple(counts))


def in_feasible_set(pair, S, G, rtol=1e-12):
    """Whether ``pair`` lies in the searchable penalty region (up to rounding)."""
    top = lambda_max(S, G, 0.0)
    if pair.lam > top * (1 + rtol):
        return False
    if pair.lam == 0:
        return True
    return pair.kappa <= kappa_max(S, G, min(pair.lam, top)) * (1 + rtol) + rtol
