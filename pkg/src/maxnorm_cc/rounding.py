"""Single-linkage hierarchies and disagreement-based level selection."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import AffinityMatrix, CandidateMatrix, Partition, _as_matrix, absolute_disagreement

__all__ = [
    "Hierarchy",
    "column_distances",
    "single_linkage",
    "slink",
    "select_best",
    "round_to_valid",
]


@dataclass(frozen=True)
class Hierarchy:
    """Agglomeration from singletons (level 0) to a single cluster (level n-1).

    ``merges[t] = (a, b, distance)`` turns level ``t`` into level ``t + 1``;
    clusters are identified by their smallest member node, with ``a < b``.
    """

    levels: tuple[Partition, ...]
    merges: tuple[tuple[int, int, float], ...]

    @property
    def n(self) -> int:
        return self.levels[0].n

    def level_with_k(self, k: int) -> Partition:
        return self.levels[self.n - k]

    def write_merge_log(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "cluster_a", "cluster_b", "distance"])
            for t, (a, b, d) in enumerate(self.merges):
                w.writerow([t, a, b, repr(float(d))])


def column_distances(M, metric: str = "l2") -> np.ndarray:
    names = {"l2": "euclidean", "l1": "cityblock"}
    if metric not in names:
        raise ValueError(f"unknown metric {metric!r}")
    cols = np.ascontiguousarray(_as_matrix(M).T)
    return cdist(cols, cols, names[metric])


def single_linkage(dist) -> Hierarchy:
    """Greedy single-linkage agglomeration over a node distance matrix.

    Ties go to the lexicographically smallest ``(a, b)`` pair of cluster ids.
    """
    d = np.array(dist, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError("distance matrix must be square")
    labels = np.arange(n)
    levels = [Partition.from_labels(labels.tolist())]
    merges = []
    # Cluster-level distances, indexed by representative (smallest member).
    cd = d.copy()
    np.fill_diagonal(cd, np.inf)
    alive = np.ones(n, dtype=bool)
    for _ in range(n - 1):
        masked = np.where(alive[:, None] & alive[None, :], cd, np.inf)
        iu = np.triu_indices(n, 1)
        vals = masked[iu]
        best = vals.min()
        # triu_indices are in row-major order, so argmax on equality is the
        # lexicographically smallest pair.
        pos = int(np.argmax(vals == best))
        a, b = int(iu[0][pos]), int(iu[1][pos])
        merges.append((a, b, float(best)))
        merged = np.minimum(cd[a], cd[b])
        cd[a, :] = merged
        cd[:, a] = merged
        cd[a, a] = np.inf
        alive[b] = False
        labels = np.where(labels == b, a, labels)
        levels.append(Partition.from_labels(labels.tolist()))
    return Hierarchy(tuple(levels), tuple(merges))


def slink(M, metric: str = "l2") -> Hierarchy:
    """Single linkage on the columns of ``M`` (each column is a node profile)."""
    m = _as_matrix(M)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    return single_linkage(column_distances(m, metric))


def select_best(A: AffinityMatrix, h: Hierarchy) -> tuple[Partition, float]:
    """Level minimizing the absolute disagreement with ``A``; lowest level wins ties."""
    a = _as_matrix(A)
    if a.shape[0] != h.n:
        raise ValueError("affinity and hierarchy sizes differ")
    scores = [level_objective(a, p) for p in h.levels]
    best = int(np.argmin(scores))
    return h.levels[best], float(scores[best])


def level_objective(a: np.ndarray, p: Partition) -> float:
    lab = p.labels
    return absolute_disagreement(a, (lab[:, None] == lab[None, :]).astype(float))


def round_to_valid(Ktilde, A: AffinityMatrix, metric: str = "l2") -> Partition:
    """Round a relaxed solution by single linkage on its columns.

    The hierarchy is built from ``Ktilde`` but the level is chosen by the
    disagreement with the original affinities ``A``.
    """
    k = Ktilde.entries if isinstance(Ktilde, CandidateMatrix) else _as_matrix(Ktilde)
    a = _as_matrix(A)
    if k.shape != a.shape:
        raise ValueError("candidate and affinity sizes differ")
    k = 0.5 * (k + k.T)
    part, _ = select_best(a, slink(k, metric))
    return part
