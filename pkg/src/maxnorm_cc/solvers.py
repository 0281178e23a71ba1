"""First-order solvers for the max-norm relaxation of correlation clustering.

All solvers take an :class:`~maxnorm_cc.core.AffinityMatrix` and a
:class:`SolverConfig` and return a ``(CandidateMatrix, SolveTrace)`` pair.
Subgradient steps use ``tau / sqrt(k)`` at iteration ``k``; steps on factor
rows are additionally divided by ``n`` so a single update moves a row by
``O(tau / sqrt(k))`` regardless of problem size.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .core import AffinityMatrix, CandidateMatrix, _as_matrix
from .linalg import shrink_eigenvalues

__all__ = [
    "SolverConfig",
    "SolveTrace",
    "project_max_norm_rows",
    "project_nonneg_max_norm_rows",
    "project_l1_sign",
    "z_subproblem_elementwise",
    "lagrangian_objective",
    "max_norm_bound",
    "solve_factorization",
    "solve_loss_function",
    "solve_dual_decomposition",
    "solve_tight_nonneg",
    "solve_trace_norm",
    "trace_norm_weight",
    "lambda_after",
    "write_sdp",
    "SOLVERS",
]

OBJECTIVES = ("absolute", "linear")
_ROW_SLACK = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Step sizes, budgets and seeds shared by every solver.

    ``rank_cap=None`` resolves to ``min(n, 20)``; ``restarts=None`` resolves
    to 3 for the nonnegative solver and 1 elsewhere.  ``penalized`` switches
    :func:`solve_factorization` from the constrained problem to the
    weighted form with weight ``mu``.
    """

    tau: float = 1.0
    outer_iters: int = 20
    iters: int = 2000
    lambda0: float = 1.0
    lambda_double_every: int = 100
    rank_cap: Optional[int] = None
    mu: float = 0.05
    objective: str = "absolute"
    seed: int = 0
    init_scale: float = 0.1
    restarts: Optional[int] = None
    penalized: bool = False

    def __post_init__(self):
        if self.tau <= 0 or self.lambda0 <= 0:
            raise ValueError("tau and lambda0 must be positive")
        for name in ("outer_iters", "iters", "lambda_double_every"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.rank_cap is not None and self.rank_cap < 1:
            raise ValueError("rank_cap must be >= 1")
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.init_scale < 0:
            raise ValueError("init_scale must be nonnegative")

    def rank(self, n: int) -> int:
        return self.rank_cap if self.rank_cap is not None else max(1, min(n, 20))

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


@dataclass
class SolveTrace:
    objectives: list = field(default_factory=list)
    best_objective: float = math.inf
    support_size: int = 0
    iterations: int = 0
    wall_time: float = 0.0
    supports: list = field(default_factory=list)

    def record(self, value: float, support: int = -1) -> bool:
        """Append one objective value; returns True when it is a new best."""
        self.objectives.append(float(value))
        self.supports.append(int(support))
        self.iterations += 1
        if value < self.best_objective:
            self.best_objective = float(value)
            return True
        return False

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "objective", "support_size"])
            for i, (obj, sup) in enumerate(zip(self.objectives, self.supports), 1):
                w.writerow([i, repr(obj), sup])


# -- projections and elementwise rules ---------------------------------------


def project_max_norm_rows(F) -> np.ndarray:
    """Rescale rows with l2 norm above one onto the unit sphere."""
    F = np.array(F, dtype=float)
    norms = np.linalg.norm(F, axis=1)
    # Rescaled rows can land an ulp above 1; the slack keeps this idempotent.
    over = norms > 1.0 + _ROW_SLACK
    F[over] /= norms[over, None]
    return F


def project_nonneg_max_norm_rows(F) -> np.ndarray:
    """Clamp to the nonnegative orthant, then rescale long rows."""
    return project_max_norm_rows(np.maximum(F, 0.0))


def project_l1_sign(before, after) -> np.ndarray:
    """Zero the entries whose sign flipped (or vanished) during an update.

    Entries that were exactly zero before the update keep their new value;
    otherwise an all-zero start could never move.
    """
    b = np.asarray(before, dtype=float)
    a = np.asarray(after, dtype=float)
    if b.shape != a.shape:
        raise ValueError(f"shape mismatch: {b.shape} vs {a.shape}")
    sb = np.sign(b)
    keep = (sb == 0) | (np.sign(a) == sb)
    return np.where(keep, a, 0.0)


def z_subproblem_elementwise(Lambda, A) -> np.ndarray:
    """``-sign(Lambda)`` where ``|Lambda| > 1``, else the affinity entry."""
    lam = np.asarray(Lambda, dtype=float)
    a = _as_matrix(A)
    if lam.shape != a.shape:
        raise ValueError("multiplier and affinity shapes differ")
    return np.where(np.abs(lam) > 1.0, -np.sign(lam), a)


# -- objectives --------------------------------------------------------------


def _objective(a: np.ndarray, k: np.ndarray, kind: str) -> float:
    if kind == "absolute":
        return float(np.abs(a - k).sum())
    return float((k * (1.0 - 2.0 * a)).sum() + a.sum())


def _descent(a: np.ndarray, k: np.ndarray, kind: str) -> np.ndarray:
    """Negative subgradient of the objective with respect to ``K``."""
    if kind == "absolute":
        return np.sign(a - k)
    return 2.0 * a - 1.0


def _support(a: np.ndarray, k: np.ndarray, tol: float = 1e-3) -> int:
    return int(np.count_nonzero(np.abs(a - k) > tol))


def _row_max(F: np.ndarray) -> float:
    return float(np.linalg.norm(F, axis=1).max(initial=0.0))


class LagrangianValue(NamedTuple):
    value: float
    estimated: bool


def max_norm_bound(K) -> tuple[float, bool]:
    """Max-norm value witnessed by ``K``'s factors.

    With factors this is ``max_row|L| * max_row|R|``, an upper bound.  Without
    them the diagonal bound ``max_i |K_ii|`` is returned with ``estimated``
    set, since recovering the true max-norm needs an SDP.
    """
    if isinstance(K, CandidateMatrix) and K.L is not None:
        return _row_max(K.L) * _row_max(K.R), False
    k = _as_matrix(K)
    return float(np.max(np.abs(np.diag(k)), initial=0.0)), True


def lagrangian_objective(A, K, mu: float) -> LagrangianValue:
    """``(1 - mu)/n^2 * |A - K|_1 + mu * max-norm bound``."""
    if not 0.0 < mu < 1.0:
        raise ValueError("mu must lie in (0, 1)")
    a = _as_matrix(A)
    k = K.entries if isinstance(K, CandidateMatrix) else _as_matrix(K)
    if a.shape != k.shape:
        raise ValueError("dimension mismatch")
    n = a.shape[0]
    bound, est = max_norm_bound(K)
    return LagrangianValue((1.0 - mu) / n**2 * float(np.abs(a - k).sum()) + mu * bound, est)


def lambda_after(cfg: SolverConfig, completed: int) -> float:
    """Loss weight once ``completed`` iterations have run (doubles on a fixed period)."""
    return cfg.lambda0 * 2.0 ** (completed // cfg.lambda_double_every)


# -- helpers -----------------------------------------------------------------


def _rng(cfg: SolverConfig, run: int = 0) -> np.random.Generator:
    return np.random.default_rng([cfg.seed & 0xFFFFFFFFFFFFFFFF, run])


def _init_factor(rng: np.random.Generator, n: int, r: int, scale: float) -> np.ndarray:
    return project_max_norm_rows(rng.uniform(0.0, scale, size=(n, r)))


def _affinity(A) -> np.ndarray:
    a = _as_matrix(A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("affinity must be square")
    return a


# -- factorization method ----------------------------------------------------


def solve_factorization(A, cfg: SolverConfig = SolverConfig()):
    """Projected subgradient descent on ``K = L R^T`` with unit-row factors.

    Each iteration steps both factors along ``Sign(A - L R^T)`` (or ``2A - 1``
    for the linear objective) and projects their rows back into the unit
    ball.  The best iterate is returned.

    With ``cfg.penalized`` the weighted problem
    ``(1 - mu)/n^2 |A - K|_1 + mu |K|_max`` is solved instead, writing
    ``K = s L R^T`` with unit-row factors and a free scale ``s >= 0`` that
    witnesses the max-norm.
    """
    a = _affinity(A)
    n = a.shape[0]
    r = cfg.rank(n)
    rng = _rng(cfg)
    L = _init_factor(rng, n, r, cfg.init_scale)
    R = _init_factor(rng, n, r, cfg.init_scale)
    trace = SolveTrace()
    start = time.perf_counter()
    if cfg.penalized:
        weight = cfg.mu * n**2 / (1.0 - cfg.mu)
        s = 1.0
        best = (L, R, s)
        for it in range(1, cfg.iters + 1):
            P = L @ R.T
            K = s * P
            val = _objective(a, K, cfg.objective) + weight * s * _row_max(L) * _row_max(R)
            if trace.record(val, _support(a, K)):
                best = (L, R, s)
            D = _descent(a, K, cfg.objective)
            eta = cfg.tau / math.sqrt(it)
            gs = weight - float((D * P).sum())
            L, R = (
                project_max_norm_rows(L + (eta / n) * (D @ R)),
                project_max_norm_rows(R + (eta / n) * (D.T @ L)),
            )
            s = max(0.0, s - eta * gs / n**2)
        L, R, s = best
        L = L * s
    else:
        best = (L, R)
        for it in range(1, cfg.iters + 1):
            K = L @ R.T
            if trace.record(_objective(a, K, cfg.objective), _support(a, K)):
                best = (L, R)
            D = _descent(a, K, cfg.objective)
            eta = cfg.tau / math.sqrt(it) / n
            L, R = (
                project_max_norm_rows(L + eta * (D @ R)),
                project_max_norm_rows(R + eta * (D.T @ L)),
            )
        L, R = best
    trace.wall_time = time.perf_counter() - start
    cand = CandidateMatrix.from_factors(L, R)
    trace.support_size = _support(a, cand.entries)
    return cand, trace


# -- loss-function method ----------------------------------------------------


def solve_loss_function(A, cfg: SolverConfig = SolverConfig()):
    """Sparse-plus-max-norm split ``A = Z + L R^T + residual``.

    Minimizes ``|Z|_1 + lambda |A - Z - L R^T|_F^2`` with ``lambda`` doubling
    every ``cfg.lambda_double_every`` iterations.  The ``Z`` step is a
    subgradient step followed by :func:`project_l1_sign`; the factor step is
    projected onto unit rows.  Steps are ``tau * lambda / sqrt(k)`` but capped
    at the inverse curvature of the quadratic term (1 for ``Z``, ``1/n`` for the
    factors) so large ``lambda`` cannot blow the iteration up.

    The trace records the objective at the final ``lambda`` so the values are
    comparable across iterations; ``K = A - Z`` is returned at the best one.
    """
    a = _affinity(A)
    n = a.shape[0]
    r = cfg.rank(n)
    rng = _rng(cfg)
    L = _init_factor(rng, n, r, cfg.init_scale)
    R = _init_factor(rng, n, r, cfg.init_scale)
    Z = np.zeros_like(a)
    lam_final = lambda_after(cfg, cfg.iters - 1)
    trace = SolveTrace()
    best = (Z, L, R)
    start = time.perf_counter()
    for it in range(1, cfg.iters + 1):
        lam = lambda_after(cfg, it - 1)
        res = a - Z - L @ R.T
        val = float(np.abs(Z).sum() + lam_final * (res**2).sum())
        if trace.record(val, _support(a, a - Z)):
            best = (Z, L, R)
        base = cfg.tau / math.sqrt(it)
        eta_z = min(base * lam, 1.0)
        eta_f = min(base * lam, 1.0) / n
        Z_new = project_l1_sign(Z, Z + eta_z * (res - np.sign(Z) / lam))
        L, R = (
            project_max_norm_rows(L + eta_f * (res @ R)),
            project_max_norm_rows(R + eta_f * (res.T @ L)),
        )
        Z = Z_new
    trace.wall_time = time.perf_counter() - start
    Z, L, R = best
    K = a - Z
    trace.support_size = _support(a, K)
    return CandidateMatrix(K, Z=Z), trace


# -- dual decomposition ------------------------------------------------------


def solve_dual_decomposition(A, cfg: SolverConfig = SolverConfig()):
    """Dual ascent on the split ``K = Z`` with ``|Z|_max <= 1``.

    Each outer round runs ``cfg.iters`` factorization steps on
    ``|A - K|_1 + <Lambda, K>`` (warm-started), sets ``Z`` by the elementwise
    threshold rule and moves ``Lambda`` by ``-tau/sqrt(t) (K - Z)``.  Rounds
    stop early once ``K`` and ``Z`` agree after rounding at 0.5.

    The returned candidate's entries are the final ``Z`` iterate, which
    coincides with ``K`` after rounding at convergence and equals ``A``
    exactly wherever the multiplier is inactive.  ``Z`` holds the residual
    ``A - Z_final`` and ``multiplier`` the last ``Lambda``.
    """
    a = _affinity(A)
    n = a.shape[0]
    r = cfg.rank(n)
    rng = _rng(cfg)
    L = _init_factor(rng, n, r, cfg.init_scale)
    R = _init_factor(rng, n, r, cfg.init_scale)
    lam = np.zeros_like(a)
    Zd = np.zeros_like(a)
    trace = SolveTrace()
    start = time.perf_counter()
    for t in range(1, cfg.outer_iters + 1):
        for j in range(1, cfg.iters + 1):
            K = L @ R.T
            D = _descent(a, K, cfg.objective) - lam
            eta = cfg.tau / math.sqrt(j) / n
            L, R = (
                project_max_norm_rows(L + eta * (D @ R)),
                project_max_norm_rows(R + eta * (D.T @ L)),
            )
        K = L @ R.T
        Zd = z_subproblem_elementwise(lam, a)
        trace.record(_objective(a, K, cfg.objective), _support(a, Zd))
        if np.array_equal(K >= 0.5, Zd >= 0.5):
            break
        lam = lam - (cfg.tau / math.sqrt(t)) * (K - Zd)
    trace.wall_time = time.perf_counter() - start
    trace.support_size = _support(a, Zd)
    return CandidateMatrix(Zd, Z=a - Zd, multiplier=lam), trace


# -- nonnegative symmetric factorization -------------------------------------


def _tight_run(a: np.ndarray, cfg: SolverConfig, run: int):
    n = a.shape[0]
    r = cfg.rank(n)
    R = project_nonneg_max_norm_rows(_rng(cfg, run).uniform(0.0, cfg.init_scale, (n, r)))
    best, best_val, vals, sups = R, math.inf, [], []
    for it in range(1, cfg.iters + 1):
        K = R @ R.T
        val = _objective(a, K, cfg.objective)
        vals.append(val)
        sups.append(_support(a, K))
        if val < best_val:
            best, best_val = R, val
        D = _descent(a, K, cfg.objective)
        eta = cfg.tau / math.sqrt(it) / n
        R = project_nonneg_max_norm_rows(R + eta * 2.0 * (D @ R))
    return best, best_val, vals, sups


def solve_tight_nonneg(A, cfg: SolverConfig = SolverConfig()):
    """Projected subgradient on ``K = R R^T`` with ``R >= 0`` and unit rows.

    The feasible set is nonconvex in ``R``, so ``cfg.restarts`` (default 3)
    independent starts are run and the best objective is kept.
    """
    a = _affinity(A)
    restarts = cfg.restarts if cfg.restarts is not None else 3
    start = time.perf_counter()
    runs = [_tight_run(a, cfg, i) for i in range(restarts)]
    R, _, vals, sups = min(runs, key=lambda x: x[1])
    trace = SolveTrace()
    for v, s in zip(vals, sups):
        trace.record(v, s)
    trace.wall_time = time.perf_counter() - start
    cand = CandidateMatrix.from_factors(R, R)
    trace.support_size = _support(a, cand.entries)
    return cand, trace


# -- trace-norm baseline -----------------------------------------------------


def trace_norm_weight(n: int) -> float:
    """Default trace-norm weight: the robust-PCA balance ``|A - K|_1 / sqrt(n) + |K|_*``.

    Expressed as ``mu`` in ``(1 - mu)/n^2 |A - K|_1 + mu |K|_*``.
    """
    c = math.sqrt(n)
    return c / (n**2 + c)


def solve_trace_norm(A, cfg: Optional[SolverConfig] = None):
    """Proximal subgradient on ``(1 - mu)/n^2 obj(A, K) + mu |K|_*``.

    A subgradient step on the data term is followed by eigenvalue
    soft-thresholding of the symmetrized iterate.  Starts from ``K = A``.
    Without a config, ``mu`` defaults to :func:`trace_norm_weight`.
    """
    a = _affinity(A)
    n = a.shape[0]
    if cfg is None:
        cfg = SolverConfig(mu=trace_norm_weight(n))
    weight = cfg.mu * n**2 / (1.0 - cfg.mu)
    scale = (1.0 - cfg.mu) / n**2
    K = a.copy()
    nuc = float(np.abs(np.linalg.eigvalsh(K)).sum())
    best = K
    trace = SolveTrace()
    start = time.perf_counter()
    for it in range(1, cfg.iters + 1):
        val = scale * _objective(a, K, cfg.objective) + cfg.mu * nuc
        if trace.record(val, _support(a, K)):
            best = K
        eta = cfg.tau / math.sqrt(it) / math.sqrt(n)
        step = K + eta * _descent(a, K, cfg.objective)
        K, w = shrink_eigenvalues(0.5 * (step + step.T), eta * weight)
        nuc = float(np.abs(w).sum())
    trace.wall_time = time.perf_counter() - start
    trace.support_size = _support(a, best)
    return CandidateMatrix(best), trace


SOLVERS = {
    "factor": solve_factorization,
    "loss": solve_loss_function,
    "dual": solve_dual_decomposition,
    "tight": solve_tight_nonneg,
    "trace": solve_trace_norm,
}


def write_sdp(A, path) -> None:
    """Export the max-norm SDP data in the sparse text format of ``docs/sdp_format.md``."""
    a = _as_matrix(A)
    n = a.shape[0]
    with open(path, "w") as fh:
        fh.write("# maxnorm-cc sdp v1\n")
        fh.write(f"n {n}\n")
        fh.write(f"psd_block {2 * n}\n")
        fh.write("objective l1\n")
        for i, j in zip(*np.nonzero(a)):
            fh.write(f"A {i} {j} {float(a[i, j])!r}\n")
        for i in range(n):
            for j in range(n):
                fh.write(f"K {i} {n + j}\n")
        for d in range(2 * n):
            fh.write(f"diag_le {d} 1.0\n")
