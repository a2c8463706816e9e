import csv
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from stretchseries.extrapolate import (
    BSTable, ExtrapolationError, bst_limit, bst_table, monotone_rows, write_table_csv,
)
from stretchseries.seriescore import RealSequence


def model(limit, coeffs, w, n_max, start=1):
    with mpmath.workprec(256):
        w = mpmath.mpf(w.numerator) / w.denominator
        vals = tuple(limit + mpmath.fsum(c * mpmath.mpf(n) ** (-(k + 1) * w) for k, c in enumerate(coeffs))
                     for n in range(start, n_max + 1))
    return RealSequence(vals, start, 256)


coeff_lists = st.lists(st.integers(-9, 9).filter(bool), min_size=1, max_size=3)
ws = st.sampled_from([Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(1, 3)])


@given(coeff_lists, ws)
@settings(max_examples=25, deadline=None)
def test_polynomial_variant_row_k_is_exact(coeffs, w):
    s = model(mpmath.mpf(2), coeffs, w, 30)
    t = bst_table(s, w, len(coeffs), variant="polynomial")
    for v in t.row(len(coeffs)).values:
        assert abs(v - 2) < mpmath.mpf(10) ** -20


@given(st.integers(-9, 9).filter(bool), ws)
@settings(max_examples=15, deadline=None)
def test_rational_variant_removes_one_term_by_row_two(c, w):
    s = model(mpmath.mpf(5), [c], w, 30)
    t = bst_table(s, w, 2)
    for v in t.row(2).values:
        if not mpmath.isnan(v):
            assert abs(v - 5) < mpmath.mpf(10) ** -20


def test_constant_sequence_stays_constant():
    s = RealSequence(tuple(mpmath.mpf(3) for _ in range(12)), 1, 256)
    t = bst_table(s, 1, 4)
    assert all(v == 3 for L in range(5) for v in t.row(L).values)


def test_table_shape_and_limit():
    s = model(mpmath.mpf(1), [1, -2, 3, 1], Fraction(1, 2), 40)
    t = bst_table(s, Fraction(1, 2), 6, variant="polynomial")
    assert isinstance(t, BSTable) and t.depth == 6
    assert [len(t.row(L)) for L in range(3)] == [40, 39, 38]
    # rows 4..6 are exact; rounding-level wobble must not end the monotone run
    assert monotone_rows(t) == 6
    lim = bst_limit(t)
    assert lim.row == 6 and abs(lim.value - 1) < mpmath.mpf(10) ** -60


def test_bad_arguments():
    s = model(mpmath.mpf(1), [1], Fraction(1), 5)
    with pytest.raises(ValueError):
        bst_table(s, 1, 2, variant="spline")
    with pytest.raises(ValueError):
        bst_table(s, 0, 2)
    with pytest.raises(ExtrapolationError):
        bst_table(s, 1, 10)


def test_no_monotone_rows():
    vals = tuple(mpmath.mpf((-1) ** n) for n in range(1, 20))
    t = bst_table(RealSequence(vals, 1, 256), 1, 3)
    assert monotone_rows(t) == 0
    with pytest.raises(ExtrapolationError):
        bst_limit(t)


def test_csv_has_last_columns(tmp_path):
    s = model(mpmath.mpf(2), [1, 1], Fraction(1, 2), 30)
    t = bst_table(s, Fraction(1, 2), 3)
    path = tmp_path / "t.csv"
    write_table_csv(t, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["L", "T(L,N-L-6)"] and rows[0][-1] == "T(L,N-L)"
    assert len(rows) == 4 and len(rows[1]) == 8
