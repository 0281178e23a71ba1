"""Competitors and the exhaustive oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import AffinityMatrix, Partition, _as_matrix
from .linalg import symmetric_eigendecomposition
from .rounding import select_best, single_linkage

__all__ = [
    "OracleResult",
    "bell_number",
    "restricted_growth_strings",
    "brute_force_optimal",
    "kmeans",
    "spectral_clustering",
]

DEFAULT_N_MAX = 12
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    partition: Partition
    objective: float
    partitions_examined: int


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def restricted_growth_strings(n: int):
    """Yield every set partition of ``n`` nodes as a label list, in lexicographic order."""
    if n == 0:
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[0..i])
    while True:
        yield list(a)
        i = n - 1
        while i > 0 and a[i] == m[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def brute_force_optimal(A: AffinityMatrix, n_max: int = DEFAULT_N_MAX) -> OracleResult:
    """Exact minimizer of the absolute disagreement over all set partitions.

    Enumerates restricted-growth strings depth first, accumulating the cost of
    each node's pairs with earlier nodes.  Ties prefer fewer clusters, then the
    lexicographically smaller label string.
    """
    a = _as_matrix(A)
    n = a.shape[0]
    if n > n_max:
        raise ValueError(f"n={n} exceeds the exhaustive-search limit n_max={n_max}")
    # Pair (u, v) counts twice: 2 (1 - A_uv) if together, 2 A_uv if apart.
    together = 2.0 * (1.0 - a)
    apart = 2.0 * a
    diag = float(np.abs(1.0 - np.diag(a)).sum())
    labels = [0] * n
    best = {"cost": np.inf, "k": n + 1, "labels": None}
    count = 0

    def visit(i: int, k: int, cost: float):
        nonlocal count
        if i == n:
            count += 1
            c = cost + diag
            bc = best["cost"]
            if c < bc - _TIE_TOL * max(1.0, abs(bc)) or (
                abs(c - bc) <= _TIE_TOL * max(1.0, abs(bc)) and k < best["k"]
            ):
                best.update(cost=c, k=k, labels=list(labels))
            return
        prev = labels[:i]
        base = float(apart[i, :i].sum())
        for b in range(k + 1):
            extra = 0.0
            for j, lj in enumerate(prev):
                if lj == b:
                    extra += together[i, j] - apart[i, j]
            labels[i] = b
            visit(i + 1, max(k, b + 1), cost + base + extra)
        labels[i] = 0

    labels[0] = 0
    visit(1, 1, 0.0)
    part = Partition(np.array(best["labels"], dtype=np.int64))
    return OracleResult(part, float(best["cost"]), count)


def kmeans(points, k: int, seed: int = 0, max_iter: int = 100, return_history: bool = False):
    """Lloyd's algorithm with k-means++ seeding.

    An empty cluster is reseeded with the point farthest from its centroid.
    With ``return_history`` the per-iteration inertia is returned as well.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    centers = [x[rng.integers(n)]]
    for _ in range(1, k):
        d2 = cdist(x, np.array(centers), "sqeuclidean").min(axis=1)
        total = d2.sum()
        if total == 0:
            # Duplicate points only: pick any point not already a centre.
            centers.append(x[rng.integers(n)])
        else:
            centers.append(x[rng.choice(n, p=d2 / total)])
    centers = np.array(centers)
    labels = None
    history = []
    for _ in range(max_iter):
        d2 = cdist(x, centers, "sqeuclidean")
        new = d2.argmin(axis=1)
        history.append(float(d2[np.arange(n), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
        for j in range(k):
            if not np.any(labels == j):
                far = int(np.argmax(cdist(x, centers, "sqeuclidean")[np.arange(n), labels]))
                labels[far] = j
                centers[j] = x[far]
    d2 = cdist(x, centers, "sqeuclidean")
    history.append(float(d2[np.arange(n), labels].sum()))
    part = Partition.from_labels(labels.tolist())
    return (part, history) if return_history else part


def spectral_clustering(A: AffinityMatrix, k: int, mode: str = "slink", seed: int = 0) -> Partition:
    """Cluster the rows of ``A`` projected on its top-``k`` eigenvectors.

    ``mode="slink"`` runs single linkage on embedding distances and picks the
    level with the smallest disagreement against ``A``; ``mode="kmeans"`` runs
    :func:`kmeans` with ``k`` clusters.
    """
    a = _as_matrix(A)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    w, V = symmetric_eigendecomposition(a)
    # Principal-component scores A V_k; unscaled eigenvectors would make the
    # embedding an orthogonal matrix (all rows equidistant) at k = n.
    emb = V[:, :k] * w[:k]
    if mode == "slink":
        part, _ = select_best(a, single_linkage(cdist(emb, emb)))
        return part
    if mode == "kmeans":
        return kmeans(emb, k, seed)
    raise ValueError(f"unknown mode {mode!r}")
