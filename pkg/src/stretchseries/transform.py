"""Removal of the stretched factor mu1^(n^sigma) from a coefficient sequence.

With b~_n = log(b_n) / n^sigma and c_n = n^(1+sigma) (b~_n - b~_{n-1}) / (1 - sigma),
d_n = exp(c_n) behaves like D mu^n n^(-g sigma/(1-sigma)), an algebraic-type sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ._tail import extrapolate_tail
from .approximants import DefectError, da_survey
from .extrapolate import ExtrapolationError, bst_limit, bst_table, monotone_rows
from .fitting import _sigma_fraction
from .ratio import _mp, gamma_estimators, ratios
from .seriescore import ExactSeries, PrecisionConfig, RealSequence, SeriesError, mpf_to_rational, rational_to_mpf


@dataclass(frozen=True)
class TransformedSeries:
    d: RealSequence
    sigma_used: Fraction
    exponent_factor: object  # transformed exponent = exponent_factor * g

    def g_from_exponent(self, p):
        """Back-map the n-power of d_n to g."""
        return p / self.exponent_factor

    def exponent_for(self, g):
        return self.exponent_factor * g

    def as_series(self) -> ExactSeries:
        """sum_n d_n z^(n - first index), an inexact series for approximant work.

        The shift leaves the singularity and its exponent unchanged.
        """
        return ExactSeries(tuple(mpf_to_rational(v) for v in self.d.values), exact=False)


def remove_stretch(b, sigma, cfg: PrecisionConfig | None = None) -> TransformedSeries:
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    s = _sigma_fraction(sigma)
    if not 0 < s < 1:
        raise ValueError("sigma must lie in (0, 1)")
    if isinstance(b, RealSequence):
        items = list(b.items())
    else:
        items = list(zip(b.indices, b.coeffs))
    items = [(n, c) for n, c in items if n >= 1]
    with mpmath.workprec(prec):
        sm = _mp(s, prec)
        bt = {}
        for n, c in items:
            if c <= 0:
                raise SeriesError(f"coefficient at index {n} is not positive")
            v = rational_to_mpf(c, prec) if isinstance(c, Fraction) else mpmath.mpf(c)
            bt[n] = mpmath.log(v) / mpmath.mpf(n) ** sm
        idx = sorted(bt)
        out = []
        for n in idx[1:]:
            if n - 1 not in bt:
                raise SeriesError(f"coefficient at index {n - 1} is missing")
            c = mpmath.mpf(n) ** (1 + sm) * (bt[n] - bt[n - 1]) / (1 - sm)
            out.append(mpmath.exp(c))
        if not out:
            raise SeriesError("need at least two positive coefficients")
        d = RealSequence(tuple(out), idx[1], prec)
        factor = -sm / (1 - sm)
    return TransformedSeries(d, s, factor)


@dataclass
class TransformedReport:
    mu_bst: object
    mu_bst_uncertainty: object
    bst_rows: int
    exponent_ratio: object  # n-power of d_n from the gamma estimators
    g_ratio: object
    da: object  # SurveyReport or None
    zc_da: object
    exponent_da: object  # n-power of d_n from the DA (gamma - 1)
    g_da: object
    notes: list

    def to_dict(self):
        f = lambda v: None if v is None else float(v)
        return {"mu_bst": f(self.mu_bst), "mu_bst_uncertainty": f(self.mu_bst_uncertainty),
                "bst_rows": self.bst_rows, "exponent_ratio": f(self.exponent_ratio),
                "g_ratio": f(self.g_ratio), "zc_da": f(self.zc_da), "exponent_da": f(self.exponent_da),
                "g_da": f(self.g_da), "notes": list(self.notes)}


def transformed_analysis(t: TransformedSeries, cfg: PrecisionConfig | None = None,
                         bst_depth: int | None = None, da_order: int = 3, da_degrees=None,
                         da_L=(0, 2, 4, 6, 8, 10), search_window=None, window: int | None = None,
                         run_da: bool = True) -> TransformedReport:
    """Ratios, gamma estimators, BST(w=1) on the ratios and (unless ``run_da`` is off) a DA survey of d_n."""
    cfg = cfg or PrecisionConfig()
    notes = []
    r = ratios(t.d, cfg, source="transformed")
    rs = r.r
    mu = unc = None
    rows = 0
    try:
        depth = bst_depth or max(1, (len(rs.defined_items()) - 1) // 2)
        tab = bst_table(rs, 1, depth)
        rows = monotone_rows(tab)
        lim = bst_limit(tab)
        mu, unc = lim.value, lim.uncertainty
    except (ExtrapolationError, ValueError) as exc:
        notes.append(f"bst skipped: {exc}")
    gam = gamma_estimators(r)
    with mpmath.workprec(cfg.precision_bits):
        icpt, _, _ = extrapolate_tail(gam.defined_items(), 1, window)
        p_ratio = icpt - 1
        g_ratio = t.g_from_exponent(p_ratio)
    zc = p_da = g_da = None
    survey = None
    if not run_da:
        return TransformedReport(mu, unc, rows, p_ratio, g_ratio, None, None, None, None, notes)
    series = t.as_series()
    n = len(series.coeffs)
    if da_degrees is None:
        kmax = max(1, (n - 1 - max(da_L)) // (da_order + 1) - 1)
        da_degrees = range(max(1, kmax - 3), kmax + 1)
    if search_window is None:
        guess = 1 / float(mu) if mu is not None else 1 / float(rs.values[-1])
        search_window = (0.8 * guess, 1.2 * guess)
    try:
        survey = da_survey(series, da_order, da_degrees, da_L, search_window, cfg)
        zc = survey.aggregate["zc_mean"]
        p_da = survey.aggregate["exp_mean"] - 1
        g_da = t.g_from_exponent(mpmath.mpf(p_da))
    except (DefectError, ValueError) as exc:
        notes.append(f"da skipped: {exc}")
    return TransformedReport(mu, unc, rows, p_ratio, g_ratio, survey, zc, p_da, g_da, notes)
