"""Tail-window straight-line fits that stand in for visual extrapolation."""

from __future__ import annotations

from fractions import Fraction

import mpmath


def tail_window(n_points: int, minimum: int = 5, fraction: int = 10) -> int:
    return max(minimum, n_points // fraction)


def linear_fit(xs, ys):
    """Least-squares line through (xs, ys); returns (intercept, slope)."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points for a line")
    mx = mpmath.fsum(xs) / n
    my = mpmath.fsum(ys) / n
    sxx = mpmath.fsum((x - mx) ** 2 for x in xs)
    sxy = mpmath.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0:
        return my, mpmath.mpf(0)
    slope = sxy / sxx
    return my - slope * mx, slope


def extrapolate_tail(pairs, abscissa_exponent, window: int | None = None):
    """Fit the last ``window`` (n, value) pairs against n**(-p) and return the intercept.

    Returns (intercept, slope, window_used).
    """
    pairs = [(n, v) for n, v in pairs if not mpmath.isnan(v)]
    w = window or tail_window(len(pairs))
    w = min(w, len(pairs))
    tail = pairs[-w:]
    p = abscissa_exponent
    if isinstance(p, Fraction):
        p = mpmath.mpf(p.numerator) / p.denominator
    p = mpmath.mpf(p)
    xs = [mpmath.mpf(n) ** (-p) for n, _ in tail]
    ys = [v for _, v in tail]
    icpt, slope = linear_fit(xs, ys)
    return icpt, slope, w
