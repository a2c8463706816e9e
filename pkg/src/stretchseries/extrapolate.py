"""Bulirsch-Stoer extrapolation of sequences s_n ~ s + c1 n^-w + c2 n^-2w + ...

Two recursions share one driver.  ``"rational"`` is the Bulirsch-Stoer
rational scheme (T(-1, n) = 0, T(0, n) = s_n)::

    T(L, n) = T(L-1, n+1) + D / (((n+L)/n)^w (1 - D / (T(L-1, n+1) - T(L-2, n+1))) - 1)

with D = T(L-1, n+1) - T(L-1, n).  It removes K correction terms by row 2K.
``"polynomial"`` drops the bracket (Neville extrapolation in n^-w) and
removes K terms by row K.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from dataclasses import dataclass

import mpmath

from .seriescore import RealSequence, rational_to_mpf

NAN = mpmath.mpf("nan")
VARIANTS = ("rational", "polynomial")


class ExtrapolationError(ValueError):
    pass


@dataclass(frozen=True)
class BSTable:
    rows: tuple  # rows[L] is a RealSequence; rows[0] is the input
    w: object
    n_input: int
    variant: str = "rational"

    @property
    def depth(self) -> int:
        return len(self.rows) - 1

    def row(self, level: int) -> RealSequence:
        return self.rows[level]

    def last_columns(self, k: int = 7):
        """Last ``k`` entries of every extrapolated row, as in a printed table."""
        return [(L, list(self.rows[L].items())[-k:]) for L in range(1, len(self.rows))]


def _bad(x) -> bool:
    return mpmath.isnan(x) or mpmath.isinf(x)


def bst_table(s: RealSequence, w, depth: int, variant: str = "rational") -> BSTable:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if float(w) <= 0:
        raise ValueError("w must be positive")
    if len(s) < depth + 2:
        raise ExtrapolationError(f"need at least {depth + 2} terms for depth {depth}")
    prec = s.precision_bits
    with mpmath.workprec(prec):
        w = rational_to_mpf(w, prec) if isinstance(w, Fraction) else mpmath.mpf(w)
        tiny = mpmath.ldexp(1, -prec + 8)
        idx = list(s.indices)
        rows = [s]
        prev = [mpmath.mpf(0)] * len(s)  # row L-2, aligned with row L-1 by index
        cur = list(s.values)
        for level in range(1, depth + 1):
            new = []
            for i in range(len(cur) - 1):
                n = idx[i]
                a, b = cur[i], cur[i + 1]
                if _bad(a) or _bad(b) or n <= 0:
                    new.append(NAN)
                    continue
                d = b - a
                scale = max(abs(a), abs(b), mpmath.mpf(1))
                if abs(d) <= tiny * scale:
                    new.append(b)
                    continue
                fac = (mpmath.mpf(n + level) / n) ** w
                if variant == "rational":
                    back = b - prev[i + 1]
                    if _bad(back) or abs(back) <= tiny * scale:
                        new.append(NAN)
                        continue
                    den = fac * (1 - d / back) - 1
                else:
                    den = fac - 1
                new.append(NAN if den == 0 else b + d / den)
            prev = cur
            cur = new
            rows.append(RealSequence(tuple(new), idx[0], prec))
    return BSTable(tuple(rows), w, len(s), variant)


def _is_monotone(vals, prec: int) -> bool:
    if any(_bad(v) for v in vals):
        return False
    # a converged row wobbles at rounding level; that counts as flat, not as a reversal
    noise = mpmath.ldexp(max(abs(v) for v in vals), -(prec // 2))
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    diffs = [d for d in diffs if abs(d) > noise]
    return all(d > 0 for d in diffs) or all(d < 0 for d in diffs)


def monotone_rows(t: BSTable, k: int = 7) -> int:
    """Number of leading extrapolated rows whose last ``k`` entries are monotone."""
    count = 0
    for level in range(1, len(t.rows)):
        vals = list(t.rows[level].values)[-k:]
        if len(vals) < 2 or not _is_monotone(vals, t.rows[level].precision_bits):
            break
        count += 1
    return count


@dataclass(frozen=True)
class Limit:
    value: object
    uncertainty: object
    row: int

    def __float__(self):
        return float(self.value)


def bst_limit(t: BSTable, k: int = 7, row: int | None = None) -> Limit:
    """Last entry of the deepest smooth row, with the spread of that row's last three entries."""
    level = row if row is not None else monotone_rows(t, k)
    if level < 1:
        raise ExtrapolationError("no monotone rows in the table; try a different w")
    vals = [v for v in t.rows[level].values if not _bad(v)]
    last3 = vals[-3:]
    return Limit(vals[-1], max(last3) - min(last3), level)


def write_table_csv(t: BSTable, path, k: int = 7, digits: int = 15) -> None:
    """Rows L with their last ``k`` entries, headed T(L,N-L-k+1) ... T(L,N-L)."""
    header = ["L"] + [f"T(L,N-L-{j})" if j else "T(L,N-L)" for j in range(k - 1, -1, -1)]
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for level, entries in t.last_columns(k):
            out.writerow([level] + [mpmath.nstr(v, digits) for _, v in entries])
