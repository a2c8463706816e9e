"""Exact truncated power series and working-precision real sequences.

Every generated or ingested series lives as an :class:`ExactSeries` of
``fractions.Fraction`` coefficients. Inexact analysis happens on
:class:`RealSequence` values, which are ``mpmath.mpf`` numbers rounded at the
precision carried by a :class:`PrecisionConfig`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import libmp

PRECISION_ENV = "STRETCHSERIES_PRECISION"
DEFAULT_PRECISION = 256


class SeriesError(ValueError):
    """Raised for invalid series operations (non-invertible input, mismatched variables)."""


def _default_bits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    return int(raw) if raw else DEFAULT_PRECISION


@dataclass(frozen=True)
class PrecisionConfig:
    precision_bits: int = field(default_factory=_default_bits)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")

    @property
    def digits(self) -> int:
        return int(self.precision_bits * 0.30103)

    def workprec(self):
        return mpmath.workprec(self.precision_bits)


@dataclass(frozen=True)
class ExactSeries:
    """Dense truncated series ``sum coeffs[k] * z**(var_step * (start + k))``.

    ``start`` is the index of the first stored coefficient; it is nonzero only
    for tabulated data such as polygon counts beginning at ``p_3``.
    ``exact`` is False when the coefficients came from decimal input.
    """

    coeffs: tuple[Fraction, ...]
    var_step: int = 1
    start: int = 0
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if self.var_step < 1:
            raise SeriesError("var_step must be positive")
        if self.start < 0:
            raise SeriesError("start index must be non-negative")

    @classmethod
    def from_values(cls, values: Iterable, var_step: int = 1, start: int = 0) -> "ExactSeries":
        return cls(tuple(Fraction(v) for v in values), var_step=var_step, start=start)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> Fraction:
        """Coefficient at index ``n`` (power ``var_step * n``)."""
        k = n - self.start
        if k < 0 or k >= len(self.coeffs):
            raise IndexError(f"index {n} outside {self.start}..{self.last_index}")
        return self.coeffs[k]

    @property
    def last_index(self) -> int:
        return self.start + len(self.coeffs) - 1

    @property
    def order(self) -> int:
        return self.last_index * self.var_step

    @property
    def indices(self) -> range:
        return range(self.start, self.last_index + 1)

    def head(self, n_max: int) -> "ExactSeries":
        """Series truncated to indices ``<= n_max``."""
        keep = max(0, n_max - self.start + 1)
        return ExactSeries(self.coeffs[:keep], self.var_step, self.start, self.exact)

    def scaled(self, c) -> "ExactSeries":
        c = Fraction(c)
        return ExactSeries(tuple(c * a for a in self.coeffs), self.var_step, self.start, self.exact)

    def dense(self) -> list[Fraction]:
        """Coefficients padded with zeros from index 0."""
        return [Fraction(0)] * self.start + list(self.coeffs)


@dataclass(frozen=True)
class RealSequence:
    values: tuple
    start_index: int = 0
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int):
        k = n - self.start_index
        if k < 0 or k >= len(self.values):
            raise IndexError(f"index {n} outside sequence")
        return self.values[k]

    @property
    def indices(self) -> range:
        return range(self.start_index, self.start_index + len(self.values))

    @property
    def last_index(self) -> int:
        return self.start_index + len(self.values) - 1

    def items(self):
        return zip(self.indices, self.values)

    def defined_items(self):
        """(n, value) pairs skipping NaN holes."""
        return [(n, v) for n, v in self.items() if not mpmath.isnan(v)]

    def tail(self, count: int) -> "RealSequence":
        count = min(count, len(self.values))
        return RealSequence(self.values[len(self.values) - count:],
                            self.last_index - count + 1, self.precision_bits)


def rational_to_mpf(x: Fraction, prec: int):
    """Round a rational to nearest at ``prec`` bits (single rounding)."""
    x = Fraction(x)
    # make_mpf keeps all prec bits even outside a workprec block
    return mpmath.mp.make_mpf(libmp.from_rational(x.numerator, x.denominator, prec, libmp.round_nearest))


def mpf_to_rational(x) -> Fraction:
    """Exact rational value of a binary floating-point number."""
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise SeriesError(f"cannot convert {x} to a rational")
    sign, man, exp, _ = x._mpf_
    q = Fraction(int(man)) * 2 ** exp if exp >= 0 else Fraction(int(man), 2 ** (-exp))
    return -q if sign else q


def _check_compatible(a: ExactSeries, b: ExactSeries):
    if a.var_step != b.var_step:
        raise SeriesError(f"mismatched var_step {a.var_step} vs {b.var_step}")


def _n_terms(series: ExactSeries, order: int) -> int:
    return order // series.var_step + 1


def series_mul(a: ExactSeries, b: ExactSeries, order: int) -> ExactSeries:
    """Cauchy product of ``a`` and ``b`` truncated at power ``order``."""
    _check_compatible(a, b)
    x, y = a.dense(), b.dense()
    n = _n_terms(a, order)
    out = []
    for k in range(n):
        lo, hi = max(0, k - len(y) + 1), min(k, len(x) - 1)
        out.append(sum((x[i] * y[k - i] for i in range(lo, hi + 1)), Fraction(0)))
    return ExactSeries(tuple(out), a.var_step, exact=a.exact and b.exact)


def series_inv(a: ExactSeries, order: int) -> ExactSeries:
    """Multiplicative inverse truncated at power ``order``."""
    x = a.dense()
    if not x or x[0] == 0:
        raise SeriesError("series with zero constant term is not invertible")
    n = _n_terms(a, order)
    c0 = x[0]
    out = [1 / c0]
    for k in range(1, n):
        s = sum((x[i] * out[k - i] for i in range(1, min(k, len(x) - 1) + 1)), Fraction(0))
        out.append(-s / c0)
    return ExactSeries(tuple(out), a.var_step, exact=a.exact)


def series_exp(a: ExactSeries, order: int) -> ExactSeries:
    """exp(a) through the recurrence n f_n = sum_k k a_k f_{n-k}."""
    x = a.dense()
    if x and x[0] != 0:
        raise SeriesError("series_exp needs a zero constant term")
    n = _n_terms(a, order)
    ka = [k * x[k] if k < len(x) else Fraction(0) for k in range(n)]
    out = [Fraction(1)]
    for m in range(1, n):
        s = sum((ka[k] * out[m - k] for k in range(1, m + 1) if ka[k]), Fraction(0))
        out.append(s / m)
    return ExactSeries(tuple(out), a.var_step, exact=a.exact)


def to_reals(a: ExactSeries | Sequence, cfg: PrecisionConfig | None = None) -> RealSequence:
    cfg = cfg or PrecisionConfig()
    if isinstance(a, ExactSeries):
        vals, start = a.coeffs, a.start
    else:
        vals, start = a, 0
    prec = cfg.precision_bits
    with mpmath.workprec(prec):
        return RealSequence(tuple(rational_to_mpf(v, prec) for v in vals), start, prec)


def as_reals(b, cfg: PrecisionConfig) -> RealSequence:
    """Accept either exact coefficients or an already-real sequence."""
    if isinstance(b, RealSequence):
        return b
    return to_reals(b, cfg)
