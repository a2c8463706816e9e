from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from stretchseries.seriescore import (
    ExactSeries, PrecisionConfig, RealSequence, SeriesError, mpf_to_rational, rational_to_mpf,
    series_exp, series_inv, series_mul, to_reals,
)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)


def test_indexing_with_start():
    s = ExactSeries((2, 3, 6), start=3)
    assert s[3] == 2 and s[5] == 6
    assert s.last_index == 5 and list(s.indices) == [3, 4, 5]
    assert s.dense()[:3] == [0, 0, 0]
    with pytest.raises(IndexError):
        s[2]


def test_var_step_order():
    s = ExactSeries((1, 1, 2), var_step=2)
    assert s.order == 4


def test_rejects_bad_layout():
    with pytest.raises(SeriesError):
        ExactSeries((1,), var_step=0)
    with pytest.raises(SeriesError):
        ExactSeries((1,), start=-1)


def test_head_and_scaled():
    s = ExactSeries((1, 2, 3, 4))
    assert s.head(1).coeffs == (1, 2)
    assert s.scaled(Fraction(1, 2)).coeffs == (Fraction(1, 2), 1, Fraction(3, 2), 2)


def test_precision_env_override(monkeypatch):
    monkeypatch.setenv("STRETCHSERIES_PRECISION", "128")
    assert PrecisionConfig().precision_bits == 128
    with pytest.raises(ValueError):
        PrecisionConfig(32)


def test_exp_of_z_gives_inverse_factorials():
    e = series_exp(ExactSeries((0, 1)), 8)
    assert e.coeffs == tuple(Fraction(1, mpmath.factorial(k).__int__()) for k in range(9))


def test_exp_needs_zero_constant():
    with pytest.raises(SeriesError):
        series_exp(ExactSeries((1, 1)), 3)


def test_inverse_needs_nonzero_constant():
    with pytest.raises(SeriesError):
        series_inv(ExactSeries((0, 1)), 3)


def test_mismatched_var_step():
    with pytest.raises(SeriesError):
        series_mul(ExactSeries((1,)), ExactSeries((1,), var_step=2), 2)


@given(st.lists(fractions, min_size=1, max_size=8).filter(lambda c: c[0] != 0))
def test_inverse_times_series_is_one(coeffs):
    a = ExactSeries(tuple(coeffs))
    prod = series_mul(a, series_inv(a, 10), 10)
    assert prod.coeffs == (1,) + (0,) * 10


@given(st.lists(fractions, min_size=1, max_size=6), st.lists(fractions, min_size=1, max_size=6))
def test_product_commutes(x, y):
    a, b = ExactSeries(tuple(x)), ExactSeries(tuple(y))
    assert series_mul(a, b, 8) == series_mul(b, a, 8)


@given(st.lists(fractions, min_size=2, max_size=5), st.lists(fractions, min_size=2, max_size=5))
@settings(max_examples=30)
def test_exp_is_a_homomorphism(x, y):
    a, b = ExactSeries((0,) + tuple(x)), ExactSeries((0,) + tuple(y))
    s = ExactSeries(tuple(p + q for p, q in zip(a.dense() + [0] * 6, b.dense() + [0] * 6)))
    assert series_exp(s, 6) == series_mul(series_exp(a, 6), series_exp(b, 6), 6)


@given(st.fractions(max_denominator=10**12))
def test_rational_round_trip_is_nearest(x):
    v = rational_to_mpf(x, 256)
    back = mpf_to_rational(v)
    assert abs(back - x) <= abs(x) * Fraction(1, 2 ** 255) + Fraction(1, 2 ** 1000)


def test_to_reals_and_sequence_helpers():
    r = to_reals(ExactSeries((1, 2, 3), start=2), PrecisionConfig(128))
    assert r.start_index == 2 and r[4] == 3 and r.precision_bits == 128
    seq = RealSequence((mpmath.mpf(1), mpmath.mpf("nan"), mpmath.mpf(3)), 5)
    assert [n for n, _ in seq.defined_items()] == [5, 7]
    assert list(seq.tail(2).indices) == [6, 7]
