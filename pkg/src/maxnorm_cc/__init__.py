"""Correlation clustering by max-norm constrained relaxation and single-linkage rounding."""

from .core import (
    AffinityMatrix,
    CandidateMatrix,
    ClusteringMatrix,
    Partition,
    absolute_disagreement,
    incidence_matrix,
    is_valid_clustering,
    linear_disagreement,
    partition_from_matrix,
)
from .metrics import (
    GuaranteeReport,
    check_recovery_guarantee,
    d_max,
    disagreement_ratio,
    exact_recovery,
    lemma1_threshold,
    unbalanceness,
    variation_of_information,
)
from .rounding import Hierarchy, round_to_valid, select_best, slink
from .solvers import (
    SolverConfig,
    SolveTrace,
    solve_dual_decomposition,
    solve_factorization,
    solve_loss_function,
    solve_tight_nonneg,
    solve_trace_norm,
)
from .baselines import brute_force_optimal, kmeans, spectral_clustering
from .datagen import NoiseSpec, fig3_fixture, gaussian_kernel_affinity, planted_clusters

__version__ = "0.1.0"
