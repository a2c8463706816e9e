from fractions import Fraction
from math import comb

import pytest

from oracles import dyck_height_histograms, evaluate, fragmented_direct, pdsaw_contact_polynomials
from stretchseries.generators import (
    CoefficientFileError, CoefficientSource, binomial_series, catalan, dyck_height_counts,
    dyck_height_series, format_coefficients, fragmented_permutations, ipdsaw_series,
    load_coefficients, triangular_sap_coefficients, write_coefficients,
)
from stretchseries.seriescore import ExactSeries


def test_fragmented_matches_term_by_term_expansion():
    assert list(fragmented_permutations(30).coeffs) == fragmented_direct(30)


def test_fragmented_lambda_one_counts():
    # n! f_n counts fragmented permutations: 1, 1, 3, 13, 73, 501
    f = fragmented_permutations(5, lam=1)
    from math import factorial
    assert [c * factorial(n) for n, c in enumerate(f.coeffs)] == [1, 1, 3, 13, 73, 501]


def test_binomial_series():
    s = binomial_series(6, 4, Fraction(1, 2))
    assert list(s.coeffs) == [comb(2 * n, n) for n in range(7)]


def test_dyck_counts_sum_to_catalan():
    table = dyck_height_counts(12)
    assert [sum(row) for row in table] == [catalan(n) for n in range(13)]


def test_dyck_matches_enumeration_small():
    hist = dyck_height_histograms(8)
    for y in (1, Fraction(1, 2), 3):
        d = dyck_height_series(16, y)
        assert list(d.coeffs) == [evaluate(h, y) for h in hist]


def test_dyck_odd_order_rejected():
    with pytest.raises(ValueError):
        dyck_height_series(7, 1)


def test_ipdsaw_matches_enumeration_small():
    polys = pdsaw_contact_polynomials(9)
    for y in (1, 2, Fraction(1, 3)):
        g = ipdsaw_series(10, y)
        assert g.coeffs[0] == 0
        assert list(g.coeffs[1:]) == [evaluate(p, y) for p in polys]


def test_ipdsaw_noninteracting_counts():
    # y = 1: partially directed walks, 1, 3, 7, 17, 41, ...
    g = ipdsaw_series(6, 1)
    assert list(g.coeffs[1:]) == [1, 3, 7, 17, 41, 99]


def test_triangular_sap_table():
    s = triangular_sap_coefficients()
    assert s.start == 3 and s[3] == 2 and s[26] == 880918093866


def test_file_round_trip(tmp_path):
    s = ExactSeries((1, Fraction(-2, 3), 5), var_step=2, start=1)
    path = tmp_path / "c.txt"
    write_coefficients(path, s, comment="demo\nsecond line")
    src = load_coefficients(path)
    assert src.series == s and not src.inexact and src.provenance == "file"


def test_decimal_input_marks_inexact(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("1\n0.25  # trailing comment\n\n3e2\n")
    src = load_coefficients(path)
    assert src.inexact and src.series.coeffs == (1, Fraction(1, 4), 300)


def test_decimal_formatting():
    text = format_coefficients(ExactSeries((Fraction(1, 3),)), decimals=True, digits=10)
    assert text.strip() == "0.3333333333"


@pytest.mark.parametrize("body, line", [
    ("1\nabc\n", 2),
    ("1\n1/0\n", 2),
    ("1\nnan\n", 2),
    ("1\n# start=2\n", 2),
])
def test_bad_files_name_the_line(tmp_path, body, line):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(CoefficientFileError) as err:
        load_coefficients(path)
    assert err.value.lineno == line


def test_empty_file(tmp_path):
    path = tmp_path / "e.txt"
    path.write_text("# nothing\n")
    with pytest.raises(CoefficientFileError):
        load_coefficients(path)


def test_unknown_provenance():
    with pytest.raises(ValueError):
        CoefficientSource("x", ExactSeries((1,)), "guess")
