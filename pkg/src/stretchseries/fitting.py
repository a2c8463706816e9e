"""Exactly determined sliding fits to b_n ~ B mu^n mu1^(n^sigma) n^g.

Each fitted constant is extrapolated against n^(-p), where n^(-p) is the
ratio of the first neglected term to the constant's own term; the final value
is the intercept of a straight line through the last max(5, N/10) estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ._tail import extrapolate_tail
from .ratio import RatioAnalysis, _mp
from .seriescore import ExactSeries, PrecisionConfig, RealSequence, rational_to_mpf

NAN = mpmath.mpf("nan")


@dataclass(frozen=True)
class AsymptoticForm:
    B: object
    mu: object
    mu1: object
    sigma: object
    g: object

    def __post_init__(self):
        if float(self.mu) <= 0:
            raise ValueError("mu must be positive")
        if not 0 < float(self.sigma) < 1:
            raise ValueError("sigma must lie in (0, 1)")

    @property
    def log_mu1(self):
        return mpmath.log(self.mu1)

    def coefficient(self, n):
        n = mpmath.mpf(n)
        s = _as_mp_sigma(self.sigma, mpmath.mp.prec)
        return self.B * mpmath.power(self.mu, n) * mpmath.power(self.mu1, n ** s) * n ** self.g


@dataclass
class FitTrace:
    """Per-window estimates of each constant and their tail extrapolations."""

    constants: dict  # name -> RealSequence indexed by the window's top index
    abscissa: dict  # name -> exponent p of the n^-p extrapolation axis
    estimates: dict = field(default_factory=dict)  # name -> extrapolated value
    slopes: dict = field(default_factory=dict)
    window: int = 0
    skipped: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)  # physical parameters

    def last(self, name):
        vals = [v for v in self.constants[name].values if not mpmath.isnan(v)]
        return vals[-1]


def _as_mp_sigma(sigma, prec):
    return _mp(_sigma_fraction(sigma), prec)


def _log_coeffs(b, prec):
    """(n, log b_n) at working precision; non-positive entries become None."""
    if isinstance(b, RealSequence):
        items = list(b.items())
    else:
        items = list(zip(b.indices, b.coeffs))
    out = {}
    for n, c in items:
        if c is None or c <= 0 or (not isinstance(c, Fraction) and mpmath.isnan(c)):
            out[n] = None
            continue
        v = rational_to_mpf(c, prec) if isinstance(c, Fraction) else mpmath.mpf(c)
        out[n] = mpmath.log(v)
    return out


def _finish(trace: FitTrace, prec: int, window: int | None):
    with mpmath.workprec(prec):
        for name, seq in trace.constants.items():
            pairs = seq.defined_items()
            if len(pairs) < 2:
                trace.estimates[name] = NAN
                continue
            icpt, slope, w = extrapolate_tail(pairs, trace.abscissa[name], window)
            trace.estimates[name] = icpt
            trace.slopes[name] = slope
            trace.window = w
    return trace


def _sliding_solve(rows_for, ks, prec):
    """Solve one small linear system per window; singular windows yield None."""
    try:
        A, rhs = rows_for(ks)
    except TypeError:
        return None
    try:
        return mpmath.lu_solve(mpmath.matrix(A), mpmath.matrix(rhs))
    except ZeroDivisionError:
        return None


def direct_fit4(b, sigma, cfg: PrecisionConfig | None = None, window: int | None = None) -> FitTrace:
    """Solve log b_k = c1 k + c2 k^sigma + c3 log k + c4 for k = n-2 .. n+1."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    names = ("c1", "c2", "c3", "c4")
    with mpmath.workprec(prec):
        s = _as_mp_sigma(sigma, prec)
        logs = _log_coeffs(b, prec)
        idx = sorted(n for n in logs if n >= 1)
        if len(idx) < 6:
            raise ValueError("direct_fit4 needs at least six positive coefficients")
        per = {k: [] for k in names}
        tops, skipped = [], []
        for n in idx:
            ks = [n - 2, n - 1, n, n + 1]
            if ks[0] < 1 or ks[-1] > idx[-1]:
                continue
            if any(logs.get(k) is None for k in ks):
                skipped.append(n)
                continue
            A = [[mpmath.mpf(k), mpmath.mpf(k) ** s, mpmath.log(k), 1] for k in ks]
            sol = _sliding_solve(lambda _: (A, [logs[k] for k in ks]), ks, prec)
            if sol is None:
                skipped.append(n)
                continue
            tops.append(n + 1)
            for name, v in zip(names, sol):
                per[name].append(v)
        sf = _sigma_fraction(sigma)
        trace = _make_trace(per, tops, prec, {"c1": 1 + sf, "c2": 2 * sf, "c3": sf, "c4": sf})
        trace.skipped = skipped
        _finish(trace, prec, window)
        e = trace.estimates
        trace.derived = {"mu": mpmath.exp(e["c1"]), "log_mu1": e["c2"], "g": e["c3"],
                         "B": mpmath.exp(e["c4"])}
    return trace


def direct_fit3(b, sigma, mu, cfg: PrecisionConfig | None = None, window: int | None = None) -> FitTrace:
    """Solve log b_k - k log mu = c2 k^sigma + c3 log k + c4 for k = n-1 .. n+1."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    names = ("c2", "c3", "c4")
    with mpmath.workprec(prec):
        s = _as_mp_sigma(sigma, prec)
        lmu = mpmath.log(_mp(mu, prec))
        logs = _log_coeffs(b, prec)
        idx = sorted(n for n in logs if n >= 1)
        if len(idx) < 4:
            raise ValueError("direct_fit3 needs at least four positive coefficients")
        per = {k: [] for k in names}
        tops, skipped = [], []
        for n in idx:
            ks = [n - 1, n, n + 1]
            if ks[0] < 1 or ks[-1] > idx[-1]:
                continue
            if any(logs.get(k) is None for k in ks):
                skipped.append(n)
                continue
            A = [[mpmath.mpf(k) ** s, mpmath.log(k), 1] for k in ks]
            rhs = [logs[k] - k * lmu for k in ks]
            sol = _sliding_solve(lambda _: (A, rhs), ks, prec)
            if sol is None:
                skipped.append(n)
                continue
            tops.append(n + 1)
            for name, v in zip(names, sol):
                per[name].append(v)
        sf = _sigma_fraction(sigma)
        trace = _make_trace(per, tops, prec, {"c2": 2 * sf, "c3": sf, "c4": sf})
        trace.skipped = skipped
        _finish(trace, prec, window)
        e = trace.estimates
        trace.derived = {"mu": _mp(mu, prec), "log_mu1": e["c2"], "g": e["c3"],
                         "B": mpmath.exp(e["c4"])}
    return trace


def _make_trace(per, tops, prec, abscissa) -> FitTrace:
    start = tops[0] if tops else 0
    consts = {k: RealSequence(tuple(v), start, prec) for k, v in per.items()}
    return FitTrace(consts, {k: abscissa[k] for k in per})


def ratio_exponents(sigma, count: int):
    """The first ``count`` distinct exponents a(1-sigma) + b (a + b >= 1) in the ratio expansion."""
    s = _sigma_fraction(sigma)
    exps = sorted({a * (1 - s) + b for a in range(0, 8) for b in range(0, 4) if a + b >= 1})
    return exps[:count]


def _ratio_fit(r: RatioAnalysis, mu, sigma, exps, names, window):
    prec = r.precision_bits
    with mpmath.workprec(prec):
        mu = _mp(mu, prec)
        vals = dict(r.defined())
        m = len(exps)
        pexp = [_mp(e, prec) for e in exps]
        per = {k: [] for k in names}
        tops, skipped = [], []
        for n in sorted(vals):
            js = list(range(n - m + 1, n + 1))
            if js[0] < 1 or any(j not in vals for j in js):
                continue
            A = [[mpmath.mpf(j) ** (-p) for p in pexp] for j in js]
            rhs = [vals[j] / mu - 1 for j in js]
            sol = _sliding_solve(lambda _: (A, rhs), js, prec)
            if sol is None:
                skipped.append(n)
                continue
            tops.append(n)
            for name, v in zip(names, sol):
                per[name].append(v)
        nxt = _next_exponent(sigma, exps)
        abscissa = {}
        for name, e in zip(names, exps):
            gap = nxt - e
            abscissa[name] = gap if gap > 0 else 1 - _sigma_fraction(sigma)
        trace = _make_trace(per, tops, prec, abscissa)
        trace.skipped = skipped
        _finish(trace, prec, window)
    return trace


def _next_exponent(sigma, exps):
    """Smallest expansion exponent above the leading one that is not being fitted."""
    s = _sigma_fraction(sigma)
    return min(e for e in ratio_exponents(s, 30) if e not in exps and e > exps[0])


def _sigma_fraction(sigma) -> Fraction:
    """Exact sigma; floats that are a rounded small-denominator fraction are recovered."""
    if isinstance(sigma, Fraction):
        return sigma
    f = Fraction(float(sigma))
    near = f.limit_denominator(1000)
    return near if abs(float(near) - float(sigma)) < 1e-12 else f


def _map_pair(c1, c2, sigma, prec):
    """Back out (log mu1, g) from the n^(sigma-1) and 1/n coefficients."""
    s = _sigma_fraction(sigma)
    sm = _mp(s, prec)
    log_mu1 = c1 / sm
    g = c2
    if 2 - 2 * s == 1:
        g = c2 - sm * sm * log_mu1 ** 2 / 2
    return log_mu1, g


def pair_ratio_fit(r: RatioAnalysis, mu, sigma, window: int | None = None) -> FitTrace:
    """Solve r_j/mu = 1 + c1 j^(sigma-1) + c2 / j for j = k-1, k."""
    s = _sigma_fraction(sigma)
    if len(r.defined()) < 4:
        raise ValueError("pair_ratio_fit needs at least four ratios")
    trace = _ratio_fit(r, mu, s, [1 - s, Fraction(1)], ("c1", "c2"), window)
    with mpmath.workprec(r.precision_bits):
        lm, g = _map_pair(trace.estimates["c1"], trace.estimates["c2"], s, r.precision_bits)
        trace.derived = {"log_mu1": lm, "g": g}
    return trace


def triple_ratio_fit(r: RatioAnalysis, mu, sigma, window: int | None = None) -> FitTrace:
    """Pair fit plus the next term of the ratio expansion (n^(2sigma-2), or n^(-3/2) at sigma = 1/2)."""
    s = _sigma_fraction(sigma)
    exps = [1 - s, Fraction(1)]
    third = min(e for e in ratio_exponents(s, 12) if e not in exps and e > 0)
    exps.append(third)
    if len(r.defined()) < 5:
        raise ValueError("triple_ratio_fit needs at least five ratios")
    trace = _ratio_fit(r, mu, s, exps, ("c1", "c2", "c3"), window)
    with mpmath.workprec(r.precision_bits):
        lm, g = _map_pair(trace.estimates["c1"], trace.estimates["c2"], s, r.precision_bits)
        trace.derived = {"log_mu1": lm, "g": g, "third_exponent": third}
    return trace


@dataclass
class AmplitudeResult:
    sequence: RealSequence
    estimate: object
    slope: object
    abscissa: object
    window: int


def default_amplitude_abscissa(sigma) -> Fraction:
    s = _sigma_fraction(sigma)
    if s == Fraction(1, 2):
        return Fraction(3, 4)
    return min(s, 1 - s)


def amplitude_sequence(b, form: AsymptoticForm, cfg: PrecisionConfig | None = None,
                       abscissa=None, window: int | None = None) -> AmplitudeResult:
    """B_n = b_n n^-g mu^-n mu1^-(n^sigma), extrapolated against n^-p."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    p = abscissa if abscissa is not None else default_amplitude_abscissa(form.sigma)
    with mpmath.workprec(prec):
        mu, g = _mp(form.mu, prec), _mp(form.g, prec)
        s = _as_mp_sigma(form.sigma, prec)
        lmu1 = mpmath.log(_mp(form.mu1, prec))
        logs = _log_coeffs(b, prec)
        vals = []
        idx = sorted(n for n in logs if n >= 1)
        for n in idx:
            lb = logs[n]
            if lb is None:
                vals.append(NAN)
                continue
            nn = mpmath.mpf(n)
            vals.append(mpmath.exp(lb - g * mpmath.log(nn) - nn * mpmath.log(mu) - lmu1 * nn ** s))
        seq = RealSequence(tuple(vals), idx[0], prec)
        icpt, slope, w = extrapolate_tail(seq.defined_items(), _mp(p, prec), window)
    return AmplitudeResult(seq, icpt, slope, p, w)
