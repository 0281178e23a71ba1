import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxnorm_cc.baselines import (
    bell_number,
    brute_force_optimal,
    kmeans,
    restricted_growth_strings,
    spectral_clustering,
)
from maxnorm_cc.core import AffinityMatrix, Partition, absolute_disagreement, incidence_matrix
from maxnorm_cc.rounding import round_to_valid
from maxnorm_cc.solvers import SolverConfig, solve_tight_nonneg

from conftest import binary_affinities, fractional_affinities, ideal


def _objective(A, labels):
    return absolute_disagreement(A, incidence_matrix(Partition(np.array(labels))).entries)


def test_bell_numbers():
    assert [bell_number(n) for n in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]
    assert bell_number(12) == 4213597


@pytest.mark.parametrize("n", range(1, 8))
def test_rgs_enumeration(n):
    strings = list(restricted_growth_strings(n))
    assert len(strings) == bell_number(n)
    assert strings == sorted(strings)
    assert len({tuple(s) for s in strings}) == len(strings)
    for s in strings:
        Partition(np.array(s))  # contiguous ids by construction


def test_oracle_ideal():
    A, p = ideal([3, 2, 2])
    res = brute_force_optimal(A)
    assert res.partition.same_clusters(p) and res.objective == 0.0
    assert res.partitions_examined == bell_number(7)


def test_oracle_tie_prefers_fewer_clusters():
    a = np.eye(3)
    a[0, 1] = a[1, 0] = a[0, 2] = a[2, 0] = 1.0
    res = brute_force_optimal(AffinityMatrix(a))
    assert res.partition.k == 1 and res.objective == 2.0


def test_oracle_singletons():
    res = brute_force_optimal(AffinityMatrix(np.eye(3)))
    assert res.partition.k == 3 and res.objective == 0.0


def test_oracle_refuses_large():
    with pytest.raises(ValueError):
        brute_force_optimal(AffinityMatrix(np.eye(13)))
    with pytest.raises(ValueError):
        brute_force_optimal(AffinityMatrix(np.eye(5)), n_max=4)


def test_oracle_deterministic():
    rng = np.random.default_rng(0)
    a = np.triu(rng.integers(0, 2, (7, 7)).astype(float), 1)
    A = AffinityMatrix(a + a.T + np.eye(7))
    r1, r2 = brute_force_optimal(A), brute_force_optimal(A)
    assert r1.partition == r2.partition and r1.objective == r2.objective


@settings(max_examples=25)
@given(fractional_affinities(min_n=1, max_n=7))
def test_oracle_beats_every_partition(A):
    res = brute_force_optimal(A)
    assert res.objective == pytest.approx(_objective(A, res.partition.labels), abs=1e-9)
    for s in restricted_growth_strings(A.n):
        assert res.objective <= _objective(A, s) + 1e-9


@settings(max_examples=10)
@given(binary_affinities(min_n=2, max_n=8), st.integers(0, 100))
def test_rounded_never_beats_oracle(A, seed):
    res = brute_force_optimal(A)
    cand, _ = solve_tight_nonneg(A, SolverConfig(iters=300, seed=seed))
    part = round_to_valid(cand, A)
    assert _objective(A, part.labels) >= res.objective - 1e-9


def test_spectral_ideal():
    A, p = ideal([3, 3])
    assert spectral_clustering(A, 2).same_clusters(p)
    assert spectral_clustering(A, A.n).same_clusters(p)
    assert spectral_clustering(A, 2, mode="kmeans", seed=1).same_clusters(p)
    assert spectral_clustering(AffinityMatrix(np.ones((4, 4))), 1).k == 1
    with pytest.raises(ValueError):
        spectral_clustering(A, 0)
    with pytest.raises(ValueError):
        spectral_clustering(A, 2, mode="other")


def test_kmeans_examples():
    p = kmeans(np.array([0.0, 0.1, 10.0, 10.1]), 2, seed=3)
    assert p.same_clusters(Partition(np.array([0, 0, 1, 1])))
    pts = np.random.default_rng(0).normal(size=(5, 2))
    p, hist = kmeans(pts, 5, seed=0, return_history=True)
    assert p.k == 5 and hist[-1] == pytest.approx(0.0)
    assert kmeans(np.zeros((4, 2)), 1).k == 1
    with pytest.raises(ValueError):
        kmeans(pts, 6)


@given(st.integers(2, 30), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_kmeans_inertia_nonincreasing(n, k, seed):
    k = min(k, n)
    pts = np.random.default_rng(seed).normal(size=(n, 2))
    _, hist = kmeans(pts, k, seed=seed, return_history=True)
    assert all(b <= a + 1e-9 for a, b in itertools.pairwise(hist))
