import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from exnrule.distance import DistanceMetric, minkowski, nearest_in_pool, pairwise
from exnrule.errors import ConfigInvalidError, DimensionMismatchError, EmptyPoolError
from oracles import dist

# rounded so differences stay far from the underflow range of |d|**q
finite = st.floats(-1e3, 1e3, allow_nan=False).map(lambda x: round(x, 6))
qs = st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.5])


def test_pythagorean():
    assert minkowski([0, 0], [3, 4]) == 5.0


def test_manhattan():
    assert minkowski([0, 0], [3, 4], DistanceMetric(1)) == 7.0


def test_q3_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    exact = (mpmath.mpf(3) ** 3 + mpmath.mpf(4) ** 3) ** (mpmath.mpf(1) / 3)
    assert minkowski([0, 0], [3, 4], DistanceMetric(3)) == pytest.approx(float(exact), rel=1e-15)
    assert float(exact) == pytest.approx(91 ** (1 / 3), rel=1e-15)


def test_metric_validation():
    with pytest.raises(ConfigInvalidError):
        DistanceMetric(0.5)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        minkowski([0, 0], [1, 2, 3])


@given(st.integers(1, 6).flatmap(lambda p: st.tuples(*[arrays(float, p, elements=finite)] * 3)), qs)
def test_metric_axioms(abc, q):
    a, b, c = abc
    m = DistanceMetric(q)
    assert minkowski(a, b, m) == minkowski(b, a, m)
    assert (minkowski(a, b, m) == 0) == bool(np.array_equal(a, b))
    assert minkowski(a, c, m) <= minkowski(a, b, m) + minkowski(b, c, m) + 1e-9 * (1 + np.abs(np.r_[a, b, c]).max())


def test_nearest_unique():
    rows = np.array([[1.0], [2.0], [10.0]])
    assert nearest_in_pool([0, 1, 2], rows, [0.0]) == (0, 1.0)


def test_nearest_tie_takes_earlier_pool_position():
    rows = np.array([[1.0], [1.0]])
    assert nearest_in_pool([0, 1], rows, [0.0])[0] == 0
    assert nearest_in_pool([1, 0], rows, [0.0])[0] == 1


def test_nearest_matches_linear_scan(rng):
    for _ in range(50):
        rows = rng.normal(size=(20, 3))
        query = rng.normal(size=3)
        idx, d = nearest_in_pool(range(20), rows, query)
        ds = [dist(r.tolist(), query.tolist()) for r in rows]
        assert idx == int(np.argmin(ds))
        assert d == ds[idx]


def test_nearest_empty():
    with pytest.raises(EmptyPoolError):
        nearest_in_pool([], np.zeros((2, 1)), [0.0])


@given(st.integers(1, 5), st.integers(2, 15), st.floats(0.1, 50), st.integers(0, 2**32 - 1))
def test_nearest_scaling(p, n, c, seed):
    g = np.random.default_rng(seed)
    rows = g.normal(size=(n, p))
    query = g.normal(size=p)
    i1, d1 = nearest_in_pool(range(n), rows, query)
    i2, d2 = nearest_in_pool(range(n), rows * c, query * c)
    assert i1 == i2
    assert d2 == pytest.approx(c * d1, rel=1e-12)


def test_nearest_ignores_non_minimal_members(rng):
    rows = rng.normal(size=(10, 2))
    idx, _ = nearest_in_pool(range(10), rows, [0.0, 0.0])
    far = rows.copy()
    others = [j for j in range(10) if j != idx]
    far[others] += 100.0
    assert nearest_in_pool(range(10), far, [0.0, 0.0])[0] == idx


def test_pairwise_matches_scalar(rng):
    rows, qs_ = rng.normal(size=(7, 9)), rng.normal(size=(3, 9))
    D = pairwise(rows, qs_)
    for i in range(3):
        for j in range(7):
            assert D[i, j] == dist(rows[j].tolist(), qs_[i].tolist())
    assert math.isclose(D[0, 0], minkowski(rows[0], qs_[0]))
