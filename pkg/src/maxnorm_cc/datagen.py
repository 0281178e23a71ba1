"""Synthetic instances: planted clusters, adversarial fixtures, kernel affinities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import AffinityMatrix, Partition, incidence_matrix
from .metrics import d_max

__all__ = [
    "NoiseSpec",
    "planted_clusters",
    "lemma1_objectives",
    "fig3_fixture",
    "FIG3_CLIQUE",
    "gaussian_kernel_affinity",
]

NOISE_MODELS = ("binary_flip", "fractional")


@dataclass(frozen=True)
class NoiseSpec:
    model: str = "binary_flip"
    rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in NOISE_MODELS:
            raise ValueError(f"noise model must be one of {NOISE_MODELS}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("noise rate must lie in [0, 1]")


def planted_clusters(sizes: Sequence[int], noise: NoiseSpec = NoiseSpec()):
    """Ideal block affinities for ``sizes`` corrupted by ``noise``.

    ``binary_flip`` flips each off-diagonal pair with probability ``rate``;
    ``fractional`` moves each off-diagonal pair toward 1/2 by ``rate * U``
    with ``U ~ Uniform(0, 1)``, so large rates can push an entry past 1/2.
    Returns ``(A, planted_partition, realized_d_max)``.
    """
    if len(sizes) == 0:
        raise ValueError("sizes must be nonempty")
    p = Partition.from_sizes(sizes)
    a = incidence_matrix(p).entries.copy()
    n = p.n
    rng = np.random.default_rng(noise.seed & 0xFFFFFFFFFFFFFFFF)
    iu = np.triu_indices(n, 1)
    vals = a[iu]
    if noise.model == "binary_flip":
        flip = rng.random(vals.size) < noise.rate
        vals = np.where(flip, 1.0 - vals, vals)
    else:
        step = noise.rate * rng.random(vals.size)
        vals = np.clip(vals + np.where(vals > 0.5, -step, step), 0.0, 1.0)
    a[iu] = vals
    a.T[iu] = vals
    A = AffinityMatrix(a)
    return A, p, d_max(A, p)


def lemma1_objectives(sizes: Sequence[int], gamma: float) -> tuple[float, float]:
    """Disagreements of the planted vs the alternative clustering at noise ``gamma``.

    These are the two costs of the adversarial construction in which every
    cluster is split into halves linked across clusters; the alternative wins
    (second value smaller) exactly when ``gamma > 2 / (5 + n^2 / sum s^2)``.
    """
    if not 0.0 <= gamma <= 0.5:
        raise ValueError("gamma must lie in [0, 1/2]")
    s = np.asarray(sizes, dtype=float)
    n = s.sum()
    sq = float(np.sum(s**2))
    b1 = gamma**2 * sq + gamma**2 / 2.0 * float(np.sum(s * (n - s)))
    b2 = gamma * (1.0 - 2.0 * gamma) * sq
    return b1, b2


FIG3_CLIQUE = 18
# Node A = 0 (left clique 0..17), node B = 18 (right clique 18..35).
FIG3_A_DROPPED = tuple(range(1, 5))
FIG3_A_ADDED = tuple(range(23, 34))
FIG3_B_DROPPED = tuple(range(19, 23))
FIG3_B_ADDED = tuple(range(5, 12))


def fig3_fixture() -> tuple[AffinityMatrix, Partition]:
    """Two 18-cliques with two rewired nodes.

    Node 0 loses its edges to nodes 1-4 and gains edges to 11 right-clique
    nodes (23-33).  Node 18 loses its edges to 19-22 and gains edges to left
    nodes 5-11.  The two rewired nodes are not linked to each other.
    """
    p = Partition.from_sizes([FIG3_CLIQUE, FIG3_CLIQUE])
    a = incidence_matrix(p).entries.copy()

    def link(u, vs, val):
        for v in vs:
            a[u, v] = a[v, u] = val

    link(0, FIG3_A_DROPPED, 0.0)
    link(0, FIG3_A_ADDED, 1.0)
    link(18, FIG3_B_DROPPED, 0.0)
    link(18, FIG3_B_ADDED, 1.0)
    a[0, 18] = a[18, 0] = 0.0
    return AffinityMatrix(a), p


def gaussian_kernel_affinity(points, sigma: float) -> AffinityMatrix:
    """``exp(-|x_u - x_v|^2 / (2 sigma^2))``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    sq = np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=-1)
    a = np.exp(-sq / (2.0 * sigma**2))
    np.fill_diagonal(a, 1.0)
    return AffinityMatrix(a)
