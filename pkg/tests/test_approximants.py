import json
from fractions import Fraction

import mpmath
import pytest

from stretchseries.approximants import (
    DefectError, da_singularities, da_survey, diff_approximant, dlog_pade, nonalgebraic_diagnostic,
    pade, poly_roots, ratio_search_window, reciprocal_series, solve_system,
)
from stretchseries.generators import binomial_series
from stretchseries.seriescore import ExactSeries, series_exp, series_inv, series_mul

TINY = mpmath.mpf(10) ** -50


def close(a, b, tol=TINY):
    return abs(a - b) < tol


def q(a, b=1):
    with mpmath.workprec(256):
        return mpmath.mpf(a) / b


def rational_series(num, den, order):
    return series_mul(ExactSeries(num), series_inv(ExactSeries(den), order), order)


def test_solve_system_consistent_rank_deficiency():
    A = [[mpmath.mpf(1), mpmath.mpf(2)], [mpmath.mpf(2), mpmath.mpf(4)]]
    x, reduced = solve_system(A, [mpmath.mpf(3), mpmath.mpf(6)], 256)
    assert reduced and close(x[0] + 2 * x[1], 3)


def test_solve_system_inconsistent():
    A = [[mpmath.mpf(1), mpmath.mpf(2)], [mpmath.mpf(2), mpmath.mpf(4)]]
    with pytest.raises(DefectError):
        solve_system(A, [mpmath.mpf(3), mpmath.mpf(7)], 256)


def test_poly_roots():
    # (1 - z)(1 - 2z)(1 + z^2) = 1 - 3z + 3z^2 - 3z^3 + 2z^4
    roots = sorted(poly_roots([1, -3, 3, -3, 2], 256), key=lambda z: (z.real, z.imag))
    want = [mpmath.mpc(0, -1), mpmath.mpc(0, 1), mpmath.mpc(0.5, 0), mpmath.mpc(1, 0)]
    for z, w in zip(roots, want):
        assert close(z, w, mpmath.mpf(10) ** -40)


def test_pade_simple_pole():
    s = ExactSeries(tuple(Fraction(2) ** n for n in range(8)))
    for i, j in [(0, 1), (2, 1), (1, 3)]:
        ap = pade(s, i, j)
        assert any(close(z, 0.5) for z in poly_roots(list(ap.Q), 256))


def test_pade_recovers_rational_function():
    s = rational_series((1, 1), (1, -1, -1), 6)
    ap = pade(s, 1, 2)
    assert [float(c) for c in ap.P] == [1, 1]
    assert [float(c) for c in ap.Q] == [1, -1, -1]
    assert all(close(a, b) for a, b in zip(ap.expansion(6), s.coeffs))


def test_pade_exp_table_entry():
    e = series_exp(ExactSeries((0, 1)), 6)
    ap = pade(e, 2, 2)
    with mpmath.workprec(256):
        assert all(close(a, mpmath.mpf(b.numerator) / b.denominator)
                   for a, b in zip(ap.P, (1, Fraction(1, 2), Fraction(1, 12))))
        assert all(close(a, mpmath.mpf(b.numerator) / b.denominator)
                   for a, b in zip(ap.Q, (1, Fraction(-1, 2), Fraction(1, 12))))


def test_pade_errors():
    with pytest.raises(ValueError):
        pade(ExactSeries((1, 2)), 1, 1)
    with pytest.raises(DefectError):
        pade(ExactSeries((1, 0, 0, 1)), 1, 2)


def test_dlog_pade_exact_pole():
    sings = dlog_pade(binomial_series(12, 3, 2), 2, 2)
    best = min(sings, key=lambda x: abs(x.location - q(1, 3)))
    assert close(best.location, q(1, 3), mpmath.mpf(10) ** -40)
    assert close(best.exponent, 2, mpmath.mpf(10) ** -40)


def test_dlog_pade_product():
    s = series_mul(binomial_series(30, 2, Fraction(3, 2)), ExactSeries((1, 1)), 30)
    sings = dlog_pade(s, 6, 6)
    best = min(sings, key=lambda x: abs(x.location - 0.5))
    assert abs(best.location - 0.5) < 1e-10 and abs(best.exponent - 1.5) < 1e-8


def test_dlog_pade_constant_series():
    assert dlog_pade(ExactSeries((1, 0, 0, 0)), 1, 1) == []


def test_da_exact_on_holonomic_function():
    s = binomial_series(20, 4, Fraction(3, 2))
    d = diff_approximant(s, 1, (2, 2), 0)
    assert d.ident == "M=1;N=2,2;L=0" and d.n_used == 6
    assert d.residual < TINY
    (sing,) = [x for x in da_singularities(d) if abs(x.location - 0.25) < 1e-20]
    assert close(sing.exponent, 1.5, mpmath.mpf(10) ** -40)
    assert close(sing.local_exponent, -1.5, mpmath.mpf(10) ** -40)


def test_da_inhomogeneous_term():
    # F = 1/(1 - 2z) + 1 satisfies (1 - 2z) theta F - 2z F + 2z = 0 and also
    # (1 - 2z) theta F - F + 2 = 0, so the system is exact but not unique
    s = ExactSeries((2,) + tuple(Fraction(2) ** n for n in range(1, 12)))
    d = diff_approximant(s, 1, (1, 1), 1)
    assert d.residual < TINY
    assert [float(c) for c in d.Q[1]] == [1, -2]
    (sing,) = da_singularities(d)
    assert close(sing.location, 0.5) and close(sing.exponent, 1)


def test_da_repeated_root_is_flagged():
    # exp(2z/(1 - 2z)): theta F (1 - 2z)^2 = 2z F, so Q_1 has a double root at 1/2
    s = series_exp(ExactSeries((0,) + tuple(Fraction(2) ** k for k in range(1, 16))), 15)
    d = diff_approximant(s, 1, (2, 2), 0)
    sings = da_singularities(d)
    assert all(x.clustered and x.exponent is None for x in sings)
    assert len(sings) == 2 and all(abs(x.location - 0.5) < 1e-9 for x in sings)


def test_da_argument_checks():
    s = binomial_series(5, 2, 1)
    with pytest.raises(ValueError):
        diff_approximant(s, 1, (1,), 0)
    with pytest.raises(ValueError):
        diff_approximant(s, 1, (3, 3), 0)


def test_reciprocal_series():
    assert reciprocal_series(ExactSeries((2, 0, 4))).coeffs == (Fraction(1, 2), 0, Fraction(1, 4))


def test_search_window_follows_trend():
    # r_n = 4 (n - 1 + gamma) / n: increasing for gamma < 1, decreasing for gamma > 1
    up = binomial_series(30, 4, Fraction(1, 2))
    lo, hi = ratio_search_window(up)
    assert lo < 0.25 < hi and hi == pytest.approx(float(up.coeffs[29] / up.coeffs[30]))
    down = binomial_series(30, 4, Fraction(3, 2))
    lo, hi = ratio_search_window(down)
    assert lo < 0.25 < hi and lo == pytest.approx(float(down.coeffs[29] / down.coeffs[30]))


def test_survey_on_algebraic_series():
    s = binomial_series(40, 4, Fraction(3, 2))
    rep = da_survey(s, 1, range(3, 7), [0, 1, 2], ratio_search_window(s))
    agg = rep.aggregate
    assert abs(agg["zc_mean"] - 0.25) < 1e-12 and abs(agg["exp_mean"] - 1.5) < 1e-10
    assert set(rep.by_L) == {0, 1, 2}
    assert not nonalgebraic_diagnostic(rep).suspect
    assert json.loads(rep.to_json())["M"] == 1
    assert "all" in rep.to_text()


def test_survey_all_defective():
    s = binomial_series(40, 4, Fraction(3, 2))
    with pytest.raises(DefectError):
        da_survey(s, 1, range(3, 5), [0], search_window=(2.0, 3.0))
