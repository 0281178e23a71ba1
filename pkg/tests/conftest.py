import numpy as np
import pytest
from hypothesis import settings, strategies as st

from maxnorm_cc.core import AffinityMatrix, Partition, incidence_matrix

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def ideal(sizes):
    p = Partition.from_sizes(sizes)
    return AffinityMatrix(incidence_matrix(p).entries), p


@st.composite
def partitions(draw, min_n=1, max_n=10):
    n = draw(st.integers(min_n, max_n))
    raw = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return Partition.from_labels(raw)


@st.composite
def binary_affinities(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    a = np.eye(n)
    a[np.triu_indices(n, 1)] = np.array(bits, dtype=float)
    a = np.triu(a) + np.triu(a, 1).T
    return AffinityMatrix(a)


@st.composite
def fractional_affinities(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    m = n * (n - 1) // 2
    vals = draw(st.lists(st.floats(0.0, 1.0), min_size=m, max_size=m))
    a = np.eye(n)
    a[np.triu_indices(n, 1)] = np.array(vals, dtype=float)
    a = np.triu(a) + np.triu(a, 1).T
    return AffinityMatrix(a)


@pytest.fixture
def two_pairs():
    """Clusters {0,1},{2,3} with the cross pair (0,2) switched on."""
    A, p = ideal([2, 2])
    a = A.entries.copy()
    a[0, 2] = a[2, 0] = 1.0
    return AffinityMatrix(a), p


# Acceptance verdicts, one line each, echoed in the terminal summary.
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
