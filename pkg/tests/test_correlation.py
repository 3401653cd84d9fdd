import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from citeindex.correlation import (
    auto_correlation,
    auto_correlation_table,
    consecutive_pairs,
    cross_index_correlation,
    pearson,
)
from citeindex.dataset import JournalYearRecord, Panel
from citeindex.errors import DegenerateSampleError, ShapeError
from citeindex.indices import IndexRow, index_table
from citeindex.rng import Stream

from oracles import naive_pearson


def test_pearson_examples():
    assert pearson([1, 2, 3], [1, 2, 3]).r_value == 1.0
    assert pearson([1, 2, 3], [3, 2, 1]).r_value == -1.0
    r = pearson([1, 2, 3], [1, 2, 4])
    assert r.r_value == pytest.approx(3 / math.sqrt(2 * 42 / 9), abs=1e-15)
    assert round(r.r_value, 3) == 0.982
    assert r.sample_size == 3


def test_pearson_errors():
    with pytest.raises(ShapeError):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(DegenerateSampleError):
        pearson([1], [2])
    with pytest.raises(DegenerateSampleError):
        pearson([2, 2, 2], [5, 5, 5])


def test_pearson_one_constant_is_degenerate():
    # zero variance in one sequence gives 0/0 in the coefficient
    with pytest.raises(DegenerateSampleError):
        pearson([1, 2, 3], [5, 5, 5])


def test_pearson_large_offset_stable():
    rng = np.random.default_rng(3)
    x = 1e9 + rng.normal(size=500)
    y = 1e9 + x - 1e9 + 0.1 * rng.normal(size=500)
    ref = naive_pearson(list(x - 1e9), list(y - 1e9))
    assert pearson(x, y).r_value == pytest.approx(ref, abs=1e-6)


vectors = st.integers(2, 60).flatmap(
    lambda k: st.tuples(
        st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=k, max_size=k),
        st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=k, max_size=k),
    )
)


def _spread(v):
    return max(v) - min(v) > 1e-3 * max(1.0, max(abs(a) for a in v))


@given(vectors)
def test_pearson_matches_oracle(xy):
    x, y = xy
    assume(_spread(x) and _spread(y))
    assert pearson(x, y).r_value == pytest.approx(naive_pearson(x, y), abs=1e-12)


@given(vectors)
def test_pearson_symmetric_and_bounded(xy):
    x, y = xy
    assume(_spread(x) and _spread(y))
    r = pearson(x, y).r_value
    assert r == pytest.approx(pearson(y, x).r_value, abs=1e-15)
    assert -1 - 1e-12 <= r <= 1 + 1e-12


@given(vectors, st.floats(0.01, 100) | st.floats(-100, -0.01), st.floats(-1e3, 1e3),
       st.floats(0.01, 100) | st.floats(-100, -0.01), st.floats(-1e3, 1e3))
def test_pearson_affine_invariance(xy, a, b, c, d):
    x, y = xy
    assume(_spread(x) and _spread(y))
    base = pearson(x, y).r_value
    moved = pearson([a * v + b for v in x], [c * v + d for v in y]).r_value
    assert moved == pytest.approx(math.copysign(1, a * c) * base, abs=1e-12)


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=50))
def test_self_correlation_is_one(x):
    assume(_spread(x))
    assert pearson(x, x).r_value == pytest.approx(1.0, abs=1e-15)


def _rows(year_values):
    return [IndexRow(j, y, 0, impact=v) for y, vals in year_values.items() for j, v in vals.items()]


def test_cross_index_exact_linear():
    recs = [JournalYearRecord(f"j{i}", 2004, n, 10, 2.0 * n) for i, n in enumerate([3, 50, 800, 12, 9])]
    rows = index_table(Panel.from_records(recs))
    assert cross_index_correlation(rows, "n", "I", 2004).r_value == pytest.approx(1.0, abs=1e-15)


def test_cross_index_single_pair_degenerate():
    recs = [JournalYearRecord("a", 2004, 3, 1, 1.0), JournalYearRecord("b", 2004, 5, 1, None)]
    rows = index_table(Panel.from_records(recs))
    with pytest.raises(DegenerateSampleError):
        cross_index_correlation(rows, "n", "I", 2004)


def test_auto_correlation_pairs_by_journal_and_counts_drops():
    rows = _rows({2004: {"a": 1.0, "b": 2.0, "c": 4.0, "d": 9.0},
                  2005: {"c": 4.5, "b": 2.5, "a": 1.5, "e": 3.0}})
    res = auto_correlation(rows, "I", 2004, 2005)
    assert res.sample_size == 3
    assert res.dropped == 2
    assert res.r_value == pytest.approx(naive_pearson([1, 2, 4], [1.5, 2.5, 4.5]), abs=1e-15)
    assert auto_correlation(rows, "I", 2004, 2004).r_value == 1.0


def test_auto_correlation_table_counts():
    rng = Stream(11)
    years = range(2004, 2014)
    vals = rng.uniform(50 * 10).reshape(10, 50)
    rows = _rows({y: {f"j{j}": float(vals[i, j]) for j in range(50)} for i, y in enumerate(years)})
    table = auto_correlation_table(rows, "I")
    assert len(table) == 9
    assert [p for p, _ in table] == consecutive_pairs(years)
    assert all(res is not None for _, res in table)


def test_auto_correlation_table_degenerate_pair_absent():
    rows = _rows({2004: {"a": 1.0, "b": 2.0}, 2005: {"a": 1.0}, 2006: {"a": 2.0, "b": 7.0}})
    table = dict(auto_correlation_table(rows, "I"))
    assert table[(2004, 2005)] is None
    assert table[(2005, 2006)] is None


def test_permuted_pairs_null_bound():
    k = 300
    s = Stream(2718)
    base = np.exp(s.normal(k))
    later = base * np.exp(0.1 * s.normal(k))
    # null distribution of R under random journal relabelling, by brute force
    rng = np.random.default_rng(0)
    null = [pearson(base, rng.permutation(later)).r_value for _ in range(2000)]
    bound = 3 * float(np.std(null))
    assert bound < 0.2
    perm = rng.permutation(k)
    rows = _rows({2004: {f"j{i}": float(v) for i, v in enumerate(base)},
                  2005: {f"j{i}": float(later[perm[i]]) for i in range(k)}})
    assert abs(auto_correlation(rows, "I", 2004, 2005).r_value) < bound
    assert abs(auto_correlation(rows, "I", 2004, 2004).r_value) == 1.0
