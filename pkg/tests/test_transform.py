from fractions import Fraction

import mpmath
import pytest

from stretchseries.seriescore import ExactSeries, SeriesError, mpf_to_rational
from stretchseries.transform import remove_stretch, transformed_analysis
from test_fitting import exact_model

HALF, THIRD = Fraction(1, 2), Fraction(1, 3)


def test_exponent_mapping_round_trips():
    t = remove_stretch(exact_model(20, 1, 2, 1, THIRD, 0), THIRD)
    assert t.sigma_used == THIRD
    assert abs(t.exponent_factor + 0.5) < 1e-60
    assert abs(t.g_from_exponent(t.exponent_for(-0.75)) + 0.75) < 1e-60


def test_transform_removes_the_stretch_term():
    # on an exact model d_n ~ mu^n n^p with no n^sigma term left in log d_n
    t = remove_stretch(exact_model(300, 1, 2, 3, HALF, 0), HALF)
    with mpmath.workprec(256):
        logs = [(n, mpmath.log(v) - n * mpmath.log(2)) for n, v in t.d.items()]
    n1, a = logs[-50]
    n2, b = logs[-1]
    assert abs(b - a) < 1e-2


def test_as_series_is_shifted():
    t = remove_stretch(exact_model(30, 1, 2, 1, HALF, 0), HALF)
    s = t.as_series()
    assert t.d.start_index == 2 and s.start == 0 and not s.exact
    assert len(s.coeffs) == len(t.d)
    assert s.coeffs[0] == mpf_to_rational(t.d.values[0])


@pytest.mark.parametrize("sigma", [HALF, THIRD])
def test_ratio_route_recovers_mu_and_g(sigma):
    t = remove_stretch(exact_model(200, 1, 2, Fraction(-3, 2), sigma, Fraction(-3, 4)), sigma)
    rep = transformed_analysis(t, run_da=False)
    assert abs(rep.mu_bst - 2) < 1e-6 and rep.bst_rows >= 1
    assert abs(rep.g_ratio + 0.75) < 0.01
    assert rep.da is None and rep.to_dict()["zc_da"] is None


def test_da_route_locates_singularity():
    t = remove_stretch(exact_model(80, 1, 2, Fraction(-3, 2), HALF, Fraction(-3, 4)), HALF)
    rep = transformed_analysis(t, da_L=(0, 2))
    assert abs(rep.zc_da - 0.5) < 1e-4
    assert rep.da.M == 3


def test_rejects_bad_input():
    with pytest.raises(SeriesError):
        remove_stretch(ExactSeries((1, 2, -3, 4)), HALF)
    with pytest.raises(ValueError):
        remove_stretch(ExactSeries((1, 2, 3, 4)), Fraction(3, 2))
    with pytest.raises(SeriesError):
        remove_stretch(ExactSeries((1, 2)), HALF)
