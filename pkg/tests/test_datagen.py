import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxnorm_cc.core import AffinityMatrix, Partition, incidence_matrix
from maxnorm_cc.datagen import (
    FIG3_CLIQUE,
    NoiseSpec,
    fig3_fixture,
    gaussian_kernel_affinity,
    lemma1_objectives,
    planted_clusters,
)
from maxnorm_cc.metrics import d_max, disagreement_ratio, disagreement_ratios, lemma1_threshold


def test_noise_free_is_ideal():
    for model in ("binary_flip", "fractional"):
        A, p, dm = planted_clusters([3, 2], NoiseSpec(model, 0.0, 9))
        np.testing.assert_array_equal(A.entries, incidence_matrix(p).entries)
        assert dm == 0.0


def test_same_seed_same_matrix():
    a1, _, _ = planted_clusters([5, 5], NoiseSpec("binary_flip", 0.2, 123))
    a2, _, _ = planted_clusters([5, 5], NoiseSpec("binary_flip", 0.2, 123))
    a3, _, _ = planted_clusters([5, 5], NoiseSpec("binary_flip", 0.2, 124))
    np.testing.assert_array_equal(a1.entries, a2.entries)
    assert not np.array_equal(a1.entries, a3.entries)


def test_realized_dmax_consistent():
    A, p, dm = planted_clusters([4, 6], NoiseSpec("fractional", 0.5, 1))
    assert dm == d_max(A, p)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec("gaussian", 0.1)
    with pytest.raises(ValueError):
        NoiseSpec("binary_flip", 1.5)
    with pytest.raises(ValueError):
        planted_clusters([], NoiseSpec())


def test_fractional_moves_toward_half():
    A, p, _ = planted_clusters([5, 5], NoiseSpec("fractional", 0.3, 2))
    truth = incidence_matrix(p).entries
    off = ~np.eye(10, dtype=bool)
    assert np.all(np.abs(A.entries - truth)[off] <= 0.3)
    assert np.all(np.abs(A.entries - 0.5)[off] <= 0.5)


@given(
    st.lists(st.integers(1, 6), min_size=1, max_size=4),
    st.sampled_from(["binary_flip", "fractional"]),
    st.floats(0.0, 1.0),
    st.integers(0, 2**63 - 1),
)
def test_generator_output_valid(sizes, model, rate, seed):
    A, p, dm = planted_clusters(sizes, NoiseSpec(model, rate, seed))
    assert isinstance(A, AffinityMatrix)
    assert A.n == sum(sizes) and p.n == A.n
    assert 0.0 <= dm <= 1.0


def test_half_flip_dmax_near_half():
    # The max over n*k ratios only concentrates at 1/2 for large clusters.
    vals = [planted_clusters([500, 500], NoiseSpec("binary_flip", 0.5, s))[2] for s in range(100)]
    assert abs(np.mean(vals) - 0.5) <= 0.1


def test_half_flip_ratios_centered():
    means = []
    for s in range(100):
        A, p, _ = planted_clusters([10, 10, 10, 10], NoiseSpec("binary_flip", 0.5, s))
        means.append(disagreement_ratios(A, p).mean())
    assert abs(np.mean(means) - 0.5) <= 0.1


@pytest.mark.parametrize("m", range(2, 11))
def test_lemma1_crossing_two_clusters(m):
    b1, b2 = lemma1_objectives([m, m], 2 / 7)
    assert b1 == pytest.approx(12 * m * m / 49, rel=1e-15)
    assert b2 == pytest.approx(b1, rel=1e-14)
    assert lemma1_objectives([m, m], 0.0) == (0.0, 0.0)
    b1, b2 = lemma1_objectives([m, m], 0.3)
    assert b2 < b1


def test_lemma1_range():
    with pytest.raises(ValueError):
        lemma1_objectives([2, 2], 0.6)
    with pytest.raises(ValueError):
        lemma1_objectives([2, 2], -0.1)


@given(st.lists(st.integers(1, 30), min_size=1, max_size=6))
def test_lemma1_single_sign_change(sizes):
    thr = lemma1_threshold(Partition.from_sizes(sizes))
    grid = np.linspace(0.0, 0.5, 501)[1:]
    diff = np.array([np.subtract(*lemma1_objectives(sizes, g)) for g in grid])
    sign = np.sign(np.where(np.abs(diff) < 1e-9 * np.max(np.abs(diff)), 0.0, diff))
    nonzero = sign[sign != 0]
    assert np.count_nonzero(np.diff(nonzero)) <= 1
    assert np.all(sign[grid < thr - 1e-9] <= 0)
    assert np.all(sign[grid > thr + 1e-9] >= 0)


def test_fig3_fixture_shape():
    A, p = fig3_fixture()
    assert A.n == 2 * FIG3_CLIQUE and list(p.sizes) == [18, 18]
    assert A.is_binary and d_max(A, p) > 0
    assert disagreement_ratio(A, p, 0, 0) == pytest.approx(4 / 18)
    assert disagreement_ratio(A, p, 0, 1) == pytest.approx(11 / 18)
    assert A.entries[0, 18] == 0.0


def test_kernel_examples():
    sigma = 0.7
    d = math.sqrt(2 * sigma**2 * math.log(2))
    A = gaussian_kernel_affinity(np.array([[0.0, 0.0], [0.0, 0.0], [d, 0.0], [1e3, 0.0]]), sigma)
    assert A.entries[0, 1] == 1.0
    assert A.entries[0, 2] == pytest.approx(0.5)
    assert 0.0 <= A.entries[0, 3] < 1e-12
    assert np.all(np.diag(A.entries) == 1.0)
    with pytest.raises(ValueError):
        gaussian_kernel_affinity(np.zeros((2, 1)), 0.0)
