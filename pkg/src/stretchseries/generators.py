"""Exact coefficient sequences for the benchmark families, plus file I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import comb
from pathlib import Path

from .seriescore import ExactSeries, SeriesError, series_exp

PROVENANCES = ("closed-form", "q-series", "dynamic-program", "file", "builtin-table")

TRIANGULAR_SAP = (
    2, 3, 6, 15, 42, 123, 380, 1212, 3966, 13265, 45144, 155955, 545690,
    1930635, 6897210, 24852576, 90237582, 329896569, 1213528736, 4489041219,
    16690581534, 62346895571, 233893503330, 880918093866,
)


class CoefficientFileError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class CoefficientSource:
    name: str
    series: ExactSeries
    provenance: str
    inexact: bool = False

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


def fragmented_permutations(order: int, lam=2) -> ExactSeries:
    """Coefficients of exp(lam z / (1 - lam z)) through z**order."""
    lam = Fraction(lam)
    if order < 0 or lam <= 0:
        raise ValueError("order must be >= 0 and lambda > 0")
    u = ExactSeries((Fraction(0),) + tuple(lam ** k for k in range(1, order + 1)))
    return series_exp(u, order)


def binomial_series(order: int, mu, gamma) -> ExactSeries:
    """Coefficients of (1 - mu z)**(-gamma), the algebraic test function."""
    mu, gamma = Fraction(mu), Fraction(gamma)
    out = [Fraction(1)]
    for n in range(1, order + 1):
        out.append(out[-1] * mu * (n - 1 + gamma) / n)
    return ExactSeries(tuple(out))


def _bounded_dyck_counts(n_max: int, h: int) -> list[int]:
    """Number of Dyck paths of semilength n with height <= h, for n = 0..n_max."""
    col = [1] + [0] * h
    out = [1]
    for step in range(1, 2 * n_max + 1):
        new = [0] * (h + 1)
        for k in range(h + 1):
            v = col[k]
            if v:
                if k < h:
                    new[k + 1] += v
                if k > 0:
                    new[k - 1] += v
        col = new
        if step % 2 == 0:
            out.append(col[0])
    return out


def dyck_height_counts(n_max: int) -> list[list[int]]:
    """Table ``d[n][h]``: Dyck paths of semilength n with maximum height exactly h."""
    below = [1] + [0] * n_max
    table = [[0] * (n_max + 1) for _ in range(n_max + 1)]
    table[0][0] = 1
    for h in range(1, n_max + 1):
        counts = _bounded_dyck_counts(n_max, h)
        for n in range(1, n_max + 1):
            table[n][h] = counts[n] - below[n]
        below = counts
    return table


def dyck_height_series(order: int, y) -> ExactSeries:
    """Entry n is sum_h d_{n,h} y**h, stored as a series in x**2.

    ``order`` is the highest power of x, so it must be even.
    """
    if order % 2:
        raise ValueError("dyck_height_series needs an even order (series in x**2)")
    y = Fraction(y)
    if y <= 0:
        raise ValueError("y must be positive")
    n_max = order // 2
    table = dyck_height_counts(n_max)
    ypow = [y ** h for h in range(n_max + 1)]
    coeffs = [sum((table[n][h] * ypow[h] for h in range(n + 1) if table[n][h]), Fraction(0))
              for n in range(n_max + 1)]
    return ExactSeries(tuple(coeffs), var_step=2)


def _div_binomial(a: list, c: Fraction, k: int) -> list:
    """a / (c x**k - 1), truncated to len(a)."""
    b = [Fraction(0)] * len(a)
    for n in range(len(a)):
        b[n] = (c * b[n - k] if n >= k else 0) - a[n]
    return b


def _ipdsaw_rational_y(order: int, y: Fraction) -> list[Fraction]:
    n = order + 1
    g0 = [Fraction(0)] * n
    h1 = [Fraction(0)] * n  # g1 / x
    g0[0] = h1[0] = Fraction(1)
    term = [Fraction(1)] + [Fraction(0)] * (n - 1)
    j = 0
    # the j-th summand starts at x**(j + j(j+1)/2)
    while True:
        j += 1
        if j + j * (j + 1) // 2 > order:
            break
        shift = j + 1
        factor = (1 - y) * y ** (j - 1)
        term = [Fraction(0)] * shift + [factor * t for t in term[:n - shift]]
        term = _div_binomial(term, y ** j, j)
        term = _div_binomial(term, y ** (j - 1), j)
        yj = y ** j
        for i, t in enumerate(term):
            if t:
                g0[i] += t
                if i + j < n:
                    h1[i + j] += yj * t
    # a = x^2 (2 - (y-1) x), b = x^2 (y + 1 - (y-1) x); the common x^2 is cancelled
    ym = y - 1
    num = [2 * h1[i] - 2 * g0[i] + (ym * g0[i - 1] if i else 0) for i in range(n)]
    den = [(y + 1) * g0[i] - (ym * g0[i - 1] if i else 0) - 2 * h1[i] for i in range(n)]
    if den[0] == 0:
        raise SeriesError("IPDSAW denominator is not invertible after removing x**2")
    out = []
    for i in range(n):
        s = num[i] - sum((den[k] * out[i - k] for k in range(1, i + 1)), Fraction(0))
        out.append(s / den[0])
    return out


def ipdsaw_series(order: int, y) -> ExactSeries:
    """Expansion of the interacting partially directed walk generating function G(x, y).

    G = (2x g1 - a g0) / (b g0 - 2x g1) with q = xy, and the coefficient of
    x**n weights the walks of n - 1 steps (n sites) by y**contacts.

    The q-series closed form degenerates at y = 1, where every summand carries
    a factor (1 - y); there each coefficient (a polynomial of degree <= n in y)
    is recovered by exact interpolation from y = 2, 3, ....
    """
    y = Fraction(y)
    if order < 1 or y <= 0:
        raise ValueError("order must be >= 1 and y > 0")
    if y != 1:
        return ExactSeries(tuple(_ipdsaw_rational_y(order, y)))
    nodes = [Fraction(k) for k in range(2, order + 3)]
    samples = [_ipdsaw_rational_y(order, t) for t in nodes]
    coeffs = []
    for n in range(order + 1):
        pts = nodes[: n + 1]
        vals = [s[n] for s in samples[: n + 1]]
        coeffs.append(_lagrange_at(pts, vals, y))
    return ExactSeries(tuple(coeffs))


def _lagrange_at(xs, ys, x0):
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = Fraction(1)
        for k, xk in enumerate(xs):
            if k != i:
                w *= (x0 - xk) / (xi - xk)
        total += yi * w
    return total


def triangular_sap_coefficients() -> ExactSeries:
    """Triangular-lattice polygon counts p_3 .. p_26."""
    return ExactSeries(tuple(Fraction(c) for c in TRIANGULAR_SAP), start=3)


_DIRECTIVE = re.compile(r"#\s*(start|var_step)\s*=\s*(-?\d+)\s*$")


def _parse_number(text: str) -> tuple[Fraction, bool]:
    if "/" in text:
        p, q = text.split("/", 1)
        return Fraction(int(p), int(q)), True
    try:
        return Fraction(int(text)), True
    except ValueError:
        pass
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"cannot parse {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"non-finite value {text!r}")
    return Fraction(d), False


def load_coefficients(path) -> CoefficientSource:
    """Read one coefficient per line; ``# start=N`` / ``# var_step=K`` headers are honoured."""
    path = Path(path)
    start, var_step, exact = 0, 1, True
    coeffs = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _DIRECTIVE.match(line)
            if m:
                if coeffs:
                    raise CoefficientFileError(path, lineno, "directive after data")
                if m.group(1) == "start":
                    start = int(m.group(2))
                else:
                    var_step = int(m.group(2))
            continue
        line = line.split("#", 1)[0].strip()
        try:
            value, is_exact = _parse_number(line)
        except (ValueError, ZeroDivisionError) as exc:
            raise CoefficientFileError(path, lineno, str(exc)) from None
        exact = exact and is_exact
        coeffs.append(value)
    if not coeffs:
        raise CoefficientFileError(path, 0, "no coefficients found")
    try:
        series = ExactSeries(tuple(coeffs), var_step=var_step, start=start, exact=exact)
    except SeriesError as exc:
        raise CoefficientFileError(path, 0, str(exc)) from None
    return CoefficientSource(path.stem, series, "file", inexact=not exact)


def format_coefficients(series: ExactSeries, comment: str | None = None,
                        decimals: bool = False, digits: int = 40) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    if series.start:
        lines.append(f"# start={series.start}")
    if series.var_step != 1:
        lines.append(f"# var_step={series.var_step}")
    for c in series.coeffs:
        if decimals:
            import mpmath
            with mpmath.workdps(digits + 5):
                lines.append(mpmath.nstr(mpmath.mpf(c.numerator) / c.denominator, digits,
                                         min_fixed=-mpmath.inf, max_fixed=mpmath.inf))
        elif c.denominator == 1:
            lines.append(str(c.numerator))
        else:
            lines.append(f"{c.numerator}/{c.denominator}")
    return "\n".join(lines) + "\n"


def write_coefficients(path, series: ExactSeries, comment: str | None = None, **kw) -> None:
    Path(path).write_text(format_coefficients(series, comment, **kw))


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)
