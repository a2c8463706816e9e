"""Ratio-method estimators for algebraic and stretched-exponential growth.

For coefficients ~ B mu^n mu1^(n^sigma) n^g the ratios r_n = b_n / b_{n-1}
satisfy r_n / mu - 1 ~ sigma log(mu1) n^(sigma - 1), so log-log gradients of
several ratio-derived quantities estimate sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from statistics import median

import mpmath

from .seriescore import ExactSeries, PrecisionConfig, RealSequence, rational_to_mpf
from ._tail import linear_fit

SIGMA_CANDIDATES = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))
SNAP_TOLERANCE = 0.08
NAN = mpmath.mpf("nan")


class EstimatorError(ValueError):
    pass


@dataclass(frozen=True)
class RatioAnalysis:
    r: RealSequence
    undefined: tuple[int, ...] = ()
    source: str | None = None

    @property
    def precision_bits(self) -> int:
        return self.r.precision_bits

    def defined(self):
        return self.r.defined_items()


@dataclass(frozen=True)
class SigmaEstimate:
    per_n: RealSequence
    method: str
    final: object
    interval: tuple
    stretch_detected: bool = True
    sign: int = 0  # sign of log(mu1) when it can be read off, else 0
    snapped: Fraction | None = None
    notes: tuple[str, ...] = field(default=())


def _coeff_values(b, cfg: PrecisionConfig):
    """(n, value) pairs at working precision; exact input is rounded once."""
    if isinstance(b, RealSequence):
        return list(b.items())
    return [(n, c) for n, c in zip(b.indices, b.coeffs)]


def ratios(b, cfg: PrecisionConfig | None = None, source: str | None = None) -> RatioAnalysis:
    """r_n = b_n / b_{n-1}; exact inputs are divided exactly before rounding."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    items = _coeff_values(b, cfg)
    if len(items) < 2:
        raise EstimatorError("need at least two coefficients")
    vals, undefined = [], []
    with mpmath.workprec(prec):
        for (_, prev), (n, cur) in zip(items, items[1:]):
            if prev == 0 or cur == 0:
                vals.append(NAN)
                undefined.append(n)
            elif isinstance(cur, Fraction):
                vals.append(rational_to_mpf(cur / prev, prec))
            else:
                vals.append(mpmath.mpf(cur) / prev)
    return RatioAnalysis(RealSequence(tuple(vals), items[1][0], prec), tuple(undefined), source)


def sign_changes(r: RatioAnalysis) -> int:
    """Number of sign changes among successive ratio differences (oscillation flag)."""
    d = [b - a for (_, a), (_, b) in zip(r.defined(), r.defined()[1:])]
    return sum(1 for x, y in zip(d, d[1:]) if x * y < 0)


def _pairs_of(r: RatioAnalysis):
    return {n: v for n, v in r.defined()}


def gamma_estimators(r: RatioAnalysis) -> RealSequence:
    """gamma_n = 1 + n^2 (1 - r_n / r_{n-1})."""
    seq = r.r
    if len(seq) < 3:
        raise EstimatorError("need at least three ratios")
    with mpmath.workprec(seq.precision_bits):
        out = []
        for n in seq.indices[1:]:
            a, b = seq[n], seq[n - 1]
            out.append(1 + n * n * (1 - a / b) if not (mpmath.isnan(a) or mpmath.isnan(b)) else NAN)
    return RealSequence(tuple(out), seq.start_index + 1, seq.precision_bits)


def gamma_with_known_zc(r: RatioAnalysis, z_c) -> RealSequence:
    """gamma_n = n (z_c r_n - 1) + 1."""
    seq = r.r
    with mpmath.workprec(seq.precision_bits):
        z_c = _mp(z_c, seq.precision_bits)
        out = [n * (z_c * v - 1) + 1 if not mpmath.isnan(v) else NAN for n, v in seq.items()]
    return RealSequence(tuple(out), seq.start_index, seq.precision_bits)


def zc_estimators(r: RatioAnalysis, gamma) -> RealSequence:
    """z_c^(n) = (n + gamma - 1) / (n r_n)."""
    seq = r.r
    with mpmath.workprec(seq.precision_bits):
        gamma = _mp(gamma, seq.precision_bits)
        out = [(n + gamma - 1) / (n * v) if not mpmath.isnan(v) and v != 0 else NAN
               for n, v in seq.items()]
    return RealSequence(tuple(out), seq.start_index, seq.precision_bits)


def _mp(x, prec):
    if isinstance(x, Fraction):
        return rational_to_mpf(x, prec)
    return mpmath.mpf(x)


def snap_sigma(value) -> Fraction | None:
    """Nearest of 1/3, 1/2, 2/3 when within the snapping tolerance."""
    best = min(SIGMA_CANDIDATES, key=lambda s: abs(float(value) - float(s)))
    return best if abs(float(value) - float(best)) <= SNAP_TOLERANCE else None


def _summarize(per: list, start: int, prec: int, method: str, offset, sign=0,
               min_points=5, notes=()) -> SigmaEstimate:
    """Median over the last max(5, N/10) gradient estimates; the interval is that window's range."""
    defined = [v for _, v in per if not mpmath.isnan(v)]
    if len(defined) < min_points:
        raise EstimatorError(f"{method}: fewer than {min_points} usable points")
    w = max(5, len(defined) // 10)
    window = defined[-w:]
    final = median(window)
    seq = RealSequence(tuple(v for _, v in per), start, prec)
    stretch = True
    notes = list(notes)
    if offset is not None and final <= mpmath.mpf("0.1"):
        stretch = False
        notes.append("no stretch detected: gradient matches a pure power-law correction")
    return SigmaEstimate(seq, method, final, (min(window), max(window)), stretch, sign,
                         snap_sigma(final) if stretch else None, tuple(notes))


def _loglog_gradients(points, prec):
    """Pairwise gradients of log|y| against log n for consecutive usable points."""
    out = []
    prev = None
    for n, y in points:
        if mpmath.isnan(y) or y == 0:
            out.append((n, NAN))
            prev = None
            continue
        ly = mpmath.log(abs(y))
        if prev is None or prev[0] != n - 1:
            out.append((n, NAN))
        else:
            out.append((n, (ly - prev[1]) / (mpmath.log(n) - mpmath.log(n - 1))))
        prev = (n, ly)
    return out


def loglog_gradients_known_mu(r: RatioAnalysis, mu) -> RealSequence:
    """Gradient of log|r_n/mu - 1| between n-1 and n (tends to sigma - 1)."""
    prec = r.precision_bits
    with mpmath.workprec(prec):
        mu = _mp(mu, prec)
        pts = [(n, (v / mu - 1) if not mpmath.isnan(v) else NAN) for n, v in r.r.items()]
        grads = _loglog_gradients(pts, prec)
    first = grads[0][0] if grads else r.r.start_index
    return RealSequence(tuple(g for _, g in grads), first, prec)


def sigma_loglog_known_mu(r: RatioAnalysis, mu) -> SigmaEstimate:
    """sigma_k = 1 + gradient of log|r_k/mu - 1| between k-1 and k."""
    prec = r.precision_bits
    if float(mu) <= 0:
        raise ValueError("mu must be positive")
    grads = loglog_gradients_known_mu(r, mu)
    with mpmath.workprec(prec):
        per = [(n, g + 1 if not mpmath.isnan(g) else NAN) for n, g in grads.items()]
        tail = [v for n, v in r.defined()][-max(5, len(r.r) // 10):]
        excess = [v / _mp(mu, prec) - 1 for v in tail]
        sign = 1 if all(e > 0 for e in excess) else -1 if all(e < 0 for e in excess) else 0
    return _summarize(per, grads.start_index, prec, "loglog-known-mu", None, sign)


def _second_ratio_points(values: list, prec):
    """(n, q_n - 1) where q_n = v_n / v_{n-1}."""
    pts = []
    for (m, a), (n, b) in zip(values, values[1:]):
        if mpmath.isnan(a) or mpmath.isnan(b) or a == 0:
            pts.append((n, NAN))
        else:
            pts.append((n, b / a - 1))
    return pts


def sigma_ratio_of_ratios(r: RatioAnalysis) -> SigmaEstimate:
    """sigma from log-log gradients of |r_n / r_{n-1} - 1| (gradient = sigma - 2)."""
    prec = r.precision_bits
    with mpmath.workprec(prec):
        pts = _second_ratio_points(list(r.r.items()), prec)
        grads = _loglog_gradients(pts, prec)
        per = [(n, g + 2 if not mpmath.isnan(g) else NAN) for n, g in grads]
        sign = _stretch_sign(pts)
    return _check_stretch(per, grads, prec, "ratio-of-ratios", sign)


def sigma_root_ratio(b, cfg: PrecisionConfig | None = None) -> SigmaEstimate:
    """sigma from log-log gradients of |b_n^(1/n) / b_{n-1}^(1/(n-1)) - 1|."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    items = _coeff_values(b, cfg)
    with mpmath.workprec(prec + 32):
        logs = []
        for n, c in items:
            if n <= 0 or c <= 0:
                logs.append((n, NAN))
                continue
            v = rational_to_mpf(c, prec + 32) if isinstance(c, Fraction) else mpmath.mpf(c)
            logs.append((n, mpmath.log(v) / n))
        pts = []
        for (m, a), (n, c) in zip(logs, logs[1:]):
            if mpmath.isnan(a) or mpmath.isnan(c):
                pts.append((n, NAN))
            else:
                pts.append((n, mpmath.expm1(c - a)))
        grads = _loglog_gradients(pts, prec)
        per = [(n, g + 2 if not mpmath.isnan(g) else NAN) for n, g in grads]
        sign = _stretch_sign(pts)
    with mpmath.workprec(prec):
        per = [(n, +v) for n, v in per]
    return _check_stretch(per, grads, prec, "root-ratio", sign)


def _stretch_sign(pts) -> int:
    """(sigma - 1) log mu1 carries the sign of the leading term, so log mu1 has the opposite sign."""
    tail = [v for _, v in pts if not mpmath.isnan(v)][-5:]
    if tail and all(v < 0 for v in tail):
        return 1
    if tail and all(v > 0 for v in tail):
        return -1
    return 0


def _check_stretch(per, grads, prec, method, sign):
    usable = [v for _, v in per if not mpmath.isnan(v)]
    start = grads[0][0] if grads else 0
    if len(usable) < 5:
        # exactly geometric data: every second ratio is 1, nothing to fit
        seq = RealSequence(tuple(v for _, v in per), start, prec)
        return SigmaEstimate(seq, method, NAN, (NAN, NAN), False, 0, None,
                             ("no stretch detected: ratio sequence is constant",))
    return _summarize(per, start, prec, method, 0, sign)


def linearization_data(r: RatioAnalysis, sigma) -> list[tuple]:
    """Rows (n, n^(sigma-1), r_n) for plotting ratios against 1/n^(1-sigma)."""
    prec = r.precision_bits
    with mpmath.workprec(prec):
        s = _mp(sigma, prec)
        return [(n, mpmath.mpf(n) ** (s - 1), v) for n, v in r.defined()]


def linearization_fit(r: RatioAnalysis, sigma, window: int | None = None):
    """Intercept and slope of the tail of the ratio plot against n^(sigma-1)."""
    rows = linearization_data(r, sigma)
    w = window or max(5, len(rows) // 10)
    tail = rows[-w:]
    with mpmath.workprec(r.precision_bits):
        return linear_fit([x for _, x, _ in tail], [y for _, _, y in tail])
