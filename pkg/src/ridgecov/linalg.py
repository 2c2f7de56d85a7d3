"""Dense symmetric linear algebra used throughout the package.

Matrices are plain square ``numpy`` arrays; symmetry is a caller contract
that :func:`as_symmetric` enforces when a matrix enters the package.
"""
import numpy as np
from scipy.linalg import solve_triangular

PD_RTOL = 1e-12


class NotPositiveDefinite(np.linalg.LinAlgError):
    """A matrix required to be positive definite failed factorization."""


def as_symmetric(A):
    """Return ``A`` as a float array, averaged with its transpose."""
    A = np.array(A, dtype=float, ndmin=2)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    return 0.5 * (A + A.T)


def cholesky(A):
    """Lower-triangular ``L`` with ``L @ L.T == A``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot falls to ``1e-12 * max(diag(A))`` or below.
    """
    A = np.asarray(A, dtype=float)
    p = A.shape[0]
    scale = np.max(np.diag(A)) if p else 0.0
    threshold = PD_RTOL * scale if scale > 0 else 0.0
    L = np.zeros_like(A)
    for j in range(p):
        pivot = A[j, j] - L[j, :j] @ L[j, :j]
        if not np.isfinite(pivot) or pivot <= threshold:
            raise NotPositiveDefinite(f"pivot {pivot:.3g} at index {j}")
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def log_det(A):
    L = cholesky(A)
    return 2.0 * np.sum(np.log(np.diag(L)))


def inverse(A):
    """Inverse of a positive definite matrix through its Cholesky factor."""
    L = cholesky(A)
    Linv = solve_triangular(L, np.eye(L.shape[0]), lower=True)
    out = Linv.T @ Linv
    return 0.5 * (out + out.T)


def submatrix(A, rows, cols):
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    return np.asarray(A)[np.ix_(rows, cols)]


def complement(p, i):
    """Indices ``{0..p-1}`` without ``i``, in increasing order."""
    return np.delete(np.arange(p), i)


def eigenvalues(A):
    """Eigenvalues of a symmetric matrix in ascending order."""
    return np.linalg.eigvalsh(np.asarray(A, dtype=float))


def condition_number(A):
    """Ratio of largest to smallest eigenvalue of a PD matrix."""
    w = eigenvalues(A)
    if w[0] <= PD_RTOL * max(w[-1], 0.0):
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g}")
    return w[-1] / w[0]
