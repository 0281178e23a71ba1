"""Noise and recovery diagnostics for a planted clustering."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import AffinityMatrix, CandidateMatrix, Partition, _as_matrix

__all__ = [
    "GuaranteeReport",
    "disagreement_ratio",
    "disagreement_ratios",
    "d_max",
    "unbalanceness",
    "size_ratio",
    "lemma1_threshold",
    "check_recovery_guarantee",
    "variation_of_information",
    "exact_recovery",
]


def disagreement_ratios(A: AffinityMatrix, p: Partition) -> np.ndarray:
    """All node/cluster disagreement ratios as an ``n x k`` array."""
    a = _as_matrix(A)
    if a.shape[0] != p.n:
        raise ValueError("affinity and partition sizes differ")
    onehot = np.zeros((p.n, p.k))
    onehot[np.arange(p.n), p.labels] = 1.0
    frac = (a @ onehot) / p.sizes
    own = onehot.astype(bool)
    return np.where(own, 1.0 - frac, frac)


def disagreement_ratio(A: AffinityMatrix, p: Partition, u: int, i: int) -> float:
    if not 0 <= u < p.n:
        raise IndexError(f"node {u} out of range")
    if not 0 <= i < p.k:
        raise IndexError(f"cluster {i} out of range")
    a = _as_matrix(A)
    members = p.members(i)
    frac = a[u, members].sum() / members.size
    return float(1.0 - frac if p.labels[u] == i else frac)


def d_max(A: AffinityMatrix, p: Partition) -> float:
    return float(disagreement_ratios(A, p).max())


def unbalanceness(p: Partition) -> float:
    s = p.sizes.astype(float)
    return float(np.mean((s / s.min()) ** 2))


def size_ratio(p: Partition) -> float:
    """``n^2 / sum |C_i|^2``; equals ``k`` for balanced partitions."""
    s = p.sizes.astype(float)
    return float(p.n**2 / np.sum(s**2))


def lemma1_threshold(p: Partition) -> float:
    """Noise level beyond which the combinatorial optimum may miss ``p``."""
    return 2.0 / (5.0 + size_ratio(p))


@dataclass(frozen=True)
class GuaranteeReport:
    d_max: float
    unbalanceness: float
    k_star: int
    r: float
    lemma1_threshold: float
    theorem_holds: bool
    mu_low: float
    mu_high: float
    binary_input: bool

    def to_text(self) -> str:
        lines = []
        for key, val in asdict(self).items():
            if isinstance(val, bool):
                val = str(val).lower()
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key}={val}")
        return "\n".join(lines) + "\n"


def _mu_from_ratio(t: float) -> float:
    # (1 - mu) / mu = t  <=>  mu = 1 / (1 + t)
    return 1.0 / (1.0 + t)


def check_recovery_guarantee(A: AffinityMatrix, p: Partition) -> GuaranteeReport:
    """Evaluate the deterministic max-norm recovery conditions for ``p``.

    The admissible weight interval comes from bounding
    ``(1 - mu) k / (mu n^2)`` between ``(1 + D) / ((1 - 3D) |C_min|^2)`` and
    ``(1 - 3D) k / (D sum |C_i|^2)``.  With ``D = 0`` the upper bound is
    infinite, so ``mu_low = 0``.
    """
    a = _as_matrix(A)
    D = d_max(A, p)
    ub = unbalanceness(p)
    k, n = p.k, p.n
    s = p.sizes.astype(float)
    c_min = s.min()
    holds = False
    mu_low = mu_high = float("nan")
    if D < 1.0 / (k + 1):
        if D == 0.0:
            holds = True
            lo_t = 1.0 / c_min**2
            mu_high = _mu_from_ratio(lo_t * n**2 / k)
            mu_low = 0.0
        else:
            bound = (1.0 - 3.0 * D) ** 2 / ((1.0 + D) * D)
            if ub <= bound:
                lo_t = (1.0 + D) / ((1.0 - 3.0 * D) * c_min**2)
                hi_t = (1.0 - 3.0 * D) * k / (D * np.sum(s**2))
                # lo_t < (1-mu)k/(mu n^2) < hi_t; the map is decreasing in mu.
                mu_high = _mu_from_ratio(lo_t * n**2 / k)
                mu_low = _mu_from_ratio(hi_t * n**2 / k)
                holds = mu_low < mu_high
    binary = bool(np.all((a == 0.0) | (a == 1.0)))
    return GuaranteeReport(
        d_max=D,
        unbalanceness=ub,
        k_star=k,
        r=size_ratio(p),
        lemma1_threshold=lemma1_threshold(p),
        theorem_holds=bool(holds),
        mu_low=float(mu_low),
        mu_high=float(mu_high),
        binary_input=binary,
    )


def variation_of_information(p1: Partition, p2: Partition) -> float:
    """Variation of information in nats."""
    if p1.n != p2.n:
        raise ValueError("partitions cover different node counts")
    n = p1.n
    table = np.zeros((p1.k, p2.k))
    np.add.at(table, (p1.labels, p2.labels), 1.0)
    rows = np.broadcast_to(table.sum(axis=1)[:, None], table.shape)
    cols = np.broadcast_to(table.sum(axis=0)[None, :], table.shape)
    nz = table > 0
    c = table[nz]
    # H(1|2) + H(2|1), summed cell by cell; identical partitions give exact zeros.
    vi = -np.sum(c / n * (np.log(c / rows[nz]) + np.log(c / cols[nz])))
    return max(float(vi), 0.0)


def exact_recovery(Khat, p_true: Partition, threshold: float = 0.5) -> bool:
    k = Khat.entries if isinstance(Khat, CandidateMatrix) else _as_matrix(Khat)
    if k.shape != (p_true.n, p_true.n):
        return False
    lab = p_true.labels
    return bool(np.array_equal(k >= threshold, lab[:, None] == lab[None, :]))
