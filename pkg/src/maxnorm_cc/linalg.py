"""Small dense linear-algebra kernels shared by the solvers and baselines."""

from __future__ import annotations

import numpy as np

__all__ = ["symmetric_eigendecomposition", "eigenvalue_soft_threshold", "shrink_eigenvalues"]


def symmetric_eigendecomposition(M, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching orthonormal eigenvectors.

    Raises ``ValueError`` when ``M`` is not symmetric to within ``tol``
    (absolute, entrywise).
    """
    m = np.asarray(M, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if m.size and np.max(np.abs(m - m.T)) > tol:
        raise ValueError("matrix is not symmetric")
    w, V = np.linalg.eigh(0.5 * (m + m.T))
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def eigenvalue_soft_threshold(M, theta: float) -> np.ndarray:
    """Shrink the eigenvalues of the symmetrized ``M`` toward zero by ``theta``.

    For symmetric input this is singular-value soft-thresholding with the
    eigenvalue signs preserved.
    """
    if theta < 0:
        raise ValueError("threshold must be nonnegative")
    m = np.asarray(M, dtype=float)
    sym = 0.5 * (m + m.T)
    if theta == 0:
        return sym
    return shrink_eigenvalues(sym, theta)[0]


def shrink_eigenvalues(sym: np.ndarray, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Soft-threshold a symmetric matrix; also returns the shrunk eigenvalues."""
    w, V = np.linalg.eigh(sym)
    w = np.sign(w) * np.maximum(np.abs(w) - theta, 0.0)
    return (V * w) @ V.T, w
