import io
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tabsynth.data import (
    CorrelationMatrix,
    Dataset,
    average_ranks,
    column_stats,
    correlation_matrix,
    covariance_matrix,
    load_csv,
    spearman_matrix,
    write_csv,
)
from tabsynth.errors import (
    ColumnLookupError,
    DegenerateColumnError,
    DomainError,
    InsufficientDataError,
    ParseError,
    SchemaError,
    ShapeError,
)

from .oracles import naive_corr, naive_cov, naive_ranks


def test_load_csv_basic():
    d = load_csv(io.BytesIO(b"a,b\n1,2\n3,4\n"))
    assert d.names == ("a", "b")
    assert d.n_rows == 2 and d.n_cols == 2
    assert np.array_equal(d.values, [[1, 2], [3, 4]])


def test_load_csv_crlf_and_scientific():
    d = load_csv(b"x,y\r\n1e-3,-2.5E2\r\n.5,7\r\n")
    assert np.array_equal(d.values, [[1e-3, -250.0], [0.5, 7.0]])


def test_load_csv_duplicate_header():
    with pytest.raises(SchemaError):
        load_csv(b"a,a\n1,2\n")


def test_load_csv_bad_cell_names_row_and_column():
    with pytest.raises(ParseError) as info:
        load_csv(b"a,b\n1,x\n")
    assert info.value.row == 1 and info.value.column == "b"
    assert "row 1" in str(info.value) and "'b'" in str(info.value)


def test_load_csv_ragged_row():
    with pytest.raises(ParseError) as info:
        load_csv(b"a,b\n1,2\n3\n")
    assert info.value.row == 2


@pytest.mark.parametrize("cell", ["nan", "inf", "-Infinity", "1_000", "", "1,5"])
def test_load_csv_rejects_non_finite_and_odd_numbers(cell):
    with pytest.raises(ParseError):
        load_csv(f'a,b\n1,"{cell}"\n'.encode())


def test_load_csv_rejects_bad_utf8():
    with pytest.raises(ParseError):
        load_csv(b"a\n\xff\n")


def test_dataset_validation():
    with pytest.raises(DomainError):
        Dataset(["a"], [[np.nan]])
    with pytest.raises(ShapeError):
        Dataset(["a", "b"], [[1.0]])
    with pytest.raises(SchemaError):
        Dataset(["a", ""], [[1.0, 2.0]])
    d = Dataset(["a"], [[1.0]])
    with pytest.raises(ValueError):
        d.values[0, 0] = 2.0
    with pytest.raises(ColumnLookupError):
        d.column("zz")


def test_write_csv_empty_is_header_only():
    d = Dataset(["a", "b", "c"], np.empty((0, 3)))
    assert write_csv(d) == b"a,b,c\n"
    assert load_csv(write_csv(d)) == d


def test_write_csv_round_trip_random():
    rng = np.random.default_rng(5)
    d = Dataset(["z", "a", "m"], rng.normal(size=(100, 3)) * 10.0 ** rng.integers(-20, 20, (100, 3)))
    back = load_csv(write_csv(d))
    assert back == d
    assert back.names == ("z", "a", "m")


def test_write_csv_quotes_awkward_names():
    d = Dataset(['a,b', 'say "hi"'], [[1.0, 2.0]])
    assert load_csv(write_csv(d)) == d


@settings(max_examples=100)
@given(arrays(np.float64, st.tuples(st.integers(0, 20), st.integers(1, 4)),
              elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_csv_round_trip_is_exact(values):
    d = Dataset([f"c{j}" for j in range(values.shape[1])], values)
    assert load_csv(write_csv(d)) == d


def test_column_stats_examples():
    s = column_stats(Dataset(["x"], [[2], [2], [2]]), "x")
    assert (s.mean, s.std) == (2.0, 0.0)
    s = column_stats(Dataset(["x"], [[1], [2], [3]]), "x")
    assert (s.mean, s.std, s.min, s.max, s.n) == (2.0, 1.0, 1.0, 3.0, 3)
    with pytest.raises(InsufficientDataError):
        column_stats(Dataset(["x"], [[5]]), "x")
    with pytest.raises(ColumnLookupError):
        column_stats(Dataset(["x"], [[5], [6]]), "y")


def test_covariance_examples():
    d = Dataset.from_columns({"x": [1, 2, 3], "y": [1, 3, 5], "c": [4, 4, 4]})
    cov = covariance_matrix(d)
    assert cov[0, 1] == pytest.approx(2.0, abs=1e-15)
    assert cov[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert cov[2, 0] == 0.0 and cov[2, 1] == 0.0
    with pytest.raises(InsufficientDataError):
        covariance_matrix(Dataset(["x"], [[1.0]]))


def test_correlation_examples():
    d = Dataset.from_columns({"x": [1, 2, 3], "y": [2, 4, 6]})
    assert correlation_matrix(d)["x", "y"] == pytest.approx(1.0, abs=1e-15)
    d = Dataset.from_columns({"x": [1, 2, 3, 4], "y": [4, 3, 2, 1]})
    assert correlation_matrix(d)["x", "y"] == pytest.approx(-1.0, abs=1e-15)


def test_correlation_constant_column_named():
    d = Dataset.from_columns({"x": [1, 2, 3], "flat": [7, 7, 7]})
    with pytest.raises(DegenerateColumnError) as info:
        correlation_matrix(d)
    assert info.value.column == "flat"


def test_correlation_affine_invariance(small_dataset):
    base = correlation_matrix(small_dataset).values
    scaled = Dataset(small_dataset.names, small_dataset.values * [3.0, 0.25, 40.0] + [-7.0, 1e3, 2.0])
    assert np.max(np.abs(correlation_matrix(scaled).values - base)) <= 1e-12


def test_correlation_matrix_type_validation():
    with pytest.raises(SchemaError):
        CorrelationMatrix(["a", "b"], [[1, 0.5], [0.4, 1]])
    with pytest.raises(SchemaError):
        CorrelationMatrix(["a", "b"], [[1, 1.5], [1.5, 1]])
    with pytest.raises(ShapeError):
        CorrelationMatrix(["a"], np.eye(2))


def test_spearman_examples():
    d = Dataset.from_columns({"x": [1, 2, 3], "y": [10, 20, 30]})
    assert spearman_matrix(d)["x", "y"] == pytest.approx(1.0, abs=1e-15)
    d = Dataset.from_columns({"x": [1, 1, 2], "y": [3, 5, 4]})
    assert np.array_equal(average_ranks([1, 1, 2]), [1.5, 1.5, 3])
    assert np.array_equal(average_ranks([3, 5, 4]), [1, 3, 2])
    # by hand: centred ranks (-0.5,-0.5,1) and (-1,1,0) are orthogonal
    assert abs(spearman_matrix(d)["x", "y"]) <= 1e-12


def test_spearman_monotone_invariance(small_dataset):
    v = small_dataset.values
    moved = Dataset(small_dataset.names, np.column_stack([np.exp(v[:, 0]), v[:, 1] ** 3, v[:, 2]]))
    assert np.array_equal(spearman_matrix(moved).values, spearman_matrix(small_dataset).values)


def _small_instances():
    """Datasets over {0, 1, 2} with 3 columns and 2..6 rows, up to row order.

    Row order cannot change any statistic, so rows are drawn as multisets.
    Every 3-column dataset is enumerated for n <= 4. For n = 5, 6 the full
    set is ~10^6 instances, so every 2-column row multiset is enumerated
    instead and completed by a third column ``(a + b) mod 3``: each matrix
    entry depends only on its own pair of columns, so this still exhausts
    every (a, b) entry.
    """
    vals = (0.0, 1.0, 2.0)
    cells = list(itertools.product(vals, repeat=3))
    for n in range(2, 5):
        for rows in itertools.combinations_with_replacement(cells, n):
            yield np.array(rows)
    pairs = list(itertools.product(vals, repeat=2))
    for n in (5, 6):
        for rows in itertools.combinations_with_replacement(pairs, n):
            ab = np.array(rows)
            yield np.column_stack([ab, (ab[:, 0] + ab[:, 1]) % 3])


def brute_force_worst_error() -> tuple[int, float]:
    """Largest deviation of covariance/correlation/Spearman from the double-loop oracles."""
    checked = 0
    worst = 0.0
    for values in _small_instances():
        d = Dataset(["a", "b", "c"], values)
        cols = [list(values[:, j]) for j in range(3)]
        worst = max(worst, np.max(np.abs(covariance_matrix(d) - naive_cov(cols))))
        if np.all(values.std(axis=0) > 0):
            worst = max(worst, np.max(np.abs(correlation_matrix(d).values - naive_corr(cols))))
            ranks = [naive_ranks(c) for c in cols]
            worst = max(worst, np.max(np.abs(spearman_matrix(d).values - naive_corr(ranks))))
        checked += 1
    return checked, worst


def test_brute_force_covariance_correlation_spearman():
    checked, worst = brute_force_worst_error()
    assert checked == 31_437 + 1287 + 3003
    assert worst <= 1e-12


@settings(max_examples=200)
@given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 5)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_correlation_invariants(values):
    d = Dataset([f"c{j}" for j in range(values.shape[1])], values)
    cov = covariance_matrix(d)
    sd = np.sqrt(np.diag(cov))
    if np.any(sd == 0.0):
        return
    m = correlation_matrix(d).values
    assert np.all(np.abs(m) <= 1.0)
    assert np.array_equal(m, m.T)
    assert np.all(np.diag(m) == 1.0)
    off = ~np.eye(m.shape[0], dtype=bool)
    ratio = cov / np.outer(sd, sd)
    assert np.all(np.abs(m[off] - np.clip(ratio[off], -1, 1)) <= 1e-12)


@settings(max_examples=100)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=40))
def test_average_ranks_match_counting(xs):
    assert np.array_equal(average_ranks(xs), naive_ranks(xs))
    assert math.isclose(float(np.sum(average_ranks(xs))), len(xs) * (len(xs) + 1) / 2)
