"""Affinity/clustering matrix types and the two disagreement objectives."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "AffinityMatrix",
    "Partition",
    "ClusteringMatrix",
    "CandidateMatrix",
    "incidence_matrix",
    "is_valid_clustering",
    "partition_from_matrix",
    "absolute_disagreement",
    "linear_disagreement",
]

SYMMETRY_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _as_matrix(M) -> np.ndarray:
    if isinstance(M, (AffinityMatrix, ClusteringMatrix, CandidateMatrix)):
        return M.entries
    return np.asarray(M, dtype=float)


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric matrix of pairwise affinities in [0, 1] with unit diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"affinity matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("affinity matrix has non-finite entries")
        if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("affinity matrix is not symmetric")
        if a.size and (a.min() < 0.0 or a.max() > 1.0):
            raise ValueError("affinity entries must lie in [0, 1]")
        if not np.all(np.diag(a) == 1.0):
            raise ValueError("affinity matrix must have unit diagonal")
        object.__setattr__(self, "entries", _frozen(0.5 * (a + a.T)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.entries == 0.0) | (self.entries == 1.0)))


@dataclass(frozen=True)
class Partition:
    """Assignment of ``n`` nodes to clusters ``0..k-1``.

    Use :meth:`from_labels` to build one from arbitrary hashable labels; the
    constructor itself insists on contiguous integer ids.
    """

    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if lab.size == 0:
            raise ValueError("partition must contain at least one node")
        if not np.issubdtype(lab.dtype, np.integer):
            if not np.all(np.mod(lab, 1) == 0):
                raise ValueError("cluster ids must be integers")
        lab = lab.astype(np.int64)
        present = np.unique(lab)
        if present[0] != 0 or present[-1] != present.size - 1:
            raise ValueError("cluster ids must be contiguous 0..k-1")
        lab = lab.copy()
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Relabel by order of first appearance (node 0 is always cluster 0)."""
        mapping: dict = {}
        out = []
        for lab in labels:
            if lab not in mapping:
                mapping[lab] = len(mapping)
            out.append(mapping[lab])
        return cls(np.array(out, dtype=np.int64))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Partition":
        """Consecutive blocks: the first ``sizes[0]`` nodes form cluster 0, etc."""
        if len(sizes) == 0 or any(int(s) < 1 for s in sizes):
            raise ValueError("sizes must be a nonempty list of positive integers")
        return cls(np.repeat(np.arange(len(sizes)), [int(s) for s in sizes]))

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.labels == i)

    def canonical(self) -> "Partition":
        return Partition.from_labels(self.labels.tolist())

    def same_clusters(self, other: "Partition") -> bool:
        """Equality up to relabeling of cluster ids."""
        return self.n == other.n and np.array_equal(
            self.canonical().labels, other.canonical().labels
        )

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())


@dataclass(frozen=True)
class ClusteringMatrix:
    """Binary, symmetric, transitive incidence matrix of a partition."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if not is_valid_clustering(m, tol=0.0):
            raise ValueError("matrix is not a valid clustering matrix")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CandidateMatrix:
    """Relaxed solver iterate.

    ``entries`` always equals ``L @ R.T`` when factors are attached; build it
    with :meth:`from_factors` to keep the two in sync.  ``Z`` is the sparse
    part of the loss-function and dual methods, ``multiplier`` the dual
    method's Lagrange multiplier.
    """

    entries: np.ndarray
    L: Optional[np.ndarray] = None
    R: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None
    multiplier: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("candidate matrix must be square")
        if (self.L is None) != (self.R is None):
            raise ValueError("factors must be given together")
        if self.L is not None:
            L = _frozen(self.L)
            R = _frozen(self.R)
            if L.shape != R.shape or L.shape[0] != e.shape[0]:
                raise ValueError("factor shapes do not match the candidate")
            e = L @ R.T
            object.__setattr__(self, "L", L)
            object.__setattr__(self, "R", R)
        object.__setattr__(self, "entries", _frozen(e))
        for name in ("Z", "multiplier"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _frozen(v))

    @classmethod
    def from_factors(cls, L: np.ndarray, R: np.ndarray, **extra) -> "CandidateMatrix":
        return cls(np.asarray(L) @ np.asarray(R).T, L=L, R=R, **extra)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def rank(self) -> Optional[int]:
        return None if self.L is None else self.L.shape[1]


def incidence_matrix(p: Partition) -> ClusteringMatrix:
    lab = p.labels
    return ClusteringMatrix((lab[:, None] == lab[None, :]).astype(float))


def partition_from_matrix(M, tol: float = 1e-6) -> Partition:
    """Recover the partition encoded by a (near-)valid clustering matrix."""
    m = _as_matrix(M)
    if not is_valid_clustering(m, tol):
        raise ValueError("matrix is not a valid clustering matrix")
    b = m >= 0.5
    return Partition.from_labels(int(np.argmax(row)) for row in b)


def is_valid_clustering(M, tol: float = 1e-6) -> bool:
    """True iff ``M`` is within ``tol`` of a valid clustering matrix.

    Entries are rounded at 0.5; the rounded matrix must be symmetric with a
    unit diagonal and consist of disjoint all-ones blocks (transitivity).
    """
    m = _as_matrix(M)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if m.size == 0:
        return True
    b = (m >= 0.5).astype(float)
    if np.max(np.abs(m - b)) > tol:
        return False
    if not np.array_equal(b, b.T) or not np.all(np.diag(b) == 1.0):
        return False
    # Transitive iff every row equals the row of its first member.
    first = np.argmax(b, axis=1)
    return bool(np.array_equal(b, b[first]))


def _check_dims(A, K) -> tuple[np.ndarray, np.ndarray]:
    a, k = _as_matrix(A), _as_matrix(K)
    if a.shape != k.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {k.shape}")
    return a, k


def absolute_disagreement(A, K) -> float:
    """Entrywise l1 distance ``sum |A_uv - K_uv|`` over all pairs, diagonal included."""
    a, k = _check_dims(A, K)
    return float(np.abs(a - k).sum())


def linear_disagreement(A, K) -> float:
    """``sum K_uv (1 - 2 A_uv) + sum A_uv``.

    The constant ``sum A_uv`` is kept so the value coincides with
    :func:`absolute_disagreement` whenever ``A`` and ``K`` are binary.
    """
    a, k = _check_dims(A, K)
    return float((k * (1.0 - 2.0 * a)).sum() + a.sum())
