"""Pade, Dlog-Pade and differential approximants.

Differential approximants use the operator theta = z d/dz:

    sum_{k=0..M} Q_k(z) theta^k F(z) + P(z) = 0,    Q_M(0) = 1,

fitted so the formal expansion agrees with the input through N - 1 coefficients,
N = L + sum(N_k + 1).  L = -1 means the homogeneous form (no P).  Exponents are
reported as gamma in F ~ (1 - z/z_c)^(-gamma), so coefficients grow like n^(gamma-1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import mean, median, pstdev

import mpmath
import numpy as np

from .seriescore import ExactSeries, PrecisionConfig, SeriesError, rational_to_mpf, series_inv, series_mul


class DefectError(ValueError):
    """The normalized linear system has no solution at working precision."""


def _to_mp(c, prec):
    return rational_to_mpf(c, prec) if isinstance(c, Fraction) else mpmath.mpf(c)


def _dense_values(s: ExactSeries, prec):
    if s.var_step != 1:
        raise SeriesError("approximants need a series in the natural variable (var_step 1)")
    return [_to_mp(c, prec) for c in s.dense()]


def solve_system(A, b, prec, what="system"):
    """Row-pivoted elimination allowing consistent rank deficiency.

    Columns whose best remaining pivot is below 2^(-prec/2) of the column's size
    are treated as free and set to zero.  Returns (x, rank_deficient).  An
    inconsistent reduced row raises DefectError.
    """
    n_rows, n_cols = len(A), len(A[0]) if A else 0
    A = [list(r) for r in A]
    b = list(b)
    tol = mpmath.ldexp(1, -(prec // 2))
    colmax = [max((abs(A[r][c]) for r in range(n_rows)), default=0) for c in range(n_cols)]
    bmax = max((abs(v) for v in b), default=0)
    pivots = []
    row = 0
    for c in range(n_cols):
        if row >= n_rows:
            break
        best = max(range(row, n_rows), key=lambda r: abs(A[r][c]))
        if colmax[c] == 0 or abs(A[best][c]) <= tol * colmax[c]:
            continue
        A[row], A[best] = A[best], A[row]
        b[row], b[best] = b[best], b[row]
        piv = A[row][c]
        prow = A[row]
        for r in range(row + 1, n_rows):
            f = A[r][c] / piv
            if f:
                ar = A[r]
                for k in range(c, n_cols):
                    ar[k] -= f * prow[k]
                b[r] -= f * b[row]
        pivots.append(c)
        row += 1
    scale = max(bmax, max(colmax, default=0))
    for r in range(row, n_rows):
        if abs(b[r]) > tol * scale:
            raise DefectError(f"{what}: inconsistent after elimination (row {r})")
    x = [mpmath.mpf(0)] * n_cols
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        acc = b[i] - mpmath.fsum(A[i][k] * x[k] for k in pivots[i + 1:])
        x[c] = acc / A[i][c]
    return x, len(pivots) < n_cols


def _poly_eval(coeffs, z):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _poly_deriv(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def _trim(coeffs, prec):
    cs = list(coeffs)
    big = max((abs(c) for c in cs), default=0)
    tiny = mpmath.ldexp(1, -(prec // 2)) * big
    while cs and abs(cs[-1]) <= tiny:
        cs.pop()
    return cs


def poly_roots(coeffs, prec: int, polish_steps: int = 12):
    """Roots of sum c_k z^k: companion-matrix eigenvalues, then Newton polishing."""
    with mpmath.workprec(prec):
        cs = _trim(coeffs, prec)
        if len(cs) < 2:
            return []
        lead = cs[-1]
        mon = [complex(c / lead) for c in cs[:-1]]
        deg = len(mon)
        comp = np.zeros((deg, deg), dtype=complex)
        comp[1:, :-1] = np.eye(deg - 1)
        comp[:, -1] = [-c for c in mon]
        guesses = np.linalg.eigvals(comp)
        d = _poly_deriv(cs)
        eps = mpmath.ldexp(1, -prec + 8)
        roots = []
        for g in guesses:
            z = mpmath.mpc(g.real, g.imag)
            for _ in range(polish_steps):
                dp = _poly_eval(d, z)
                if dp == 0:
                    break
                step = _poly_eval(cs, z) / dp
                z -= step
                if abs(step) <= eps * max(abs(z), eps):
                    break
            roots.append(z)
        roots.sort(key=lambda z: (float(abs(z)), float(z.imag)))
        return roots


@dataclass(frozen=True)
class RationalApproximant:
    P: tuple
    Q: tuple  # Q[0] == 1
    reduced: bool = False  # system was rank deficient (common factor possible)

    def __call__(self, z):
        return _poly_eval(self.P, z) / _poly_eval(self.Q, z)

    def expansion(self, order: int):
        """Taylor coefficients of P/Q through z**order."""
        out = []
        for n in range(order + 1):
            v = self.P[n] if n < len(self.P) else 0
            v -= mpmath.fsum(self.Q[m] * out[n - m] for m in range(1, min(n, len(self.Q) - 1) + 1))
            out.append(v)
        return out


@dataclass(frozen=True)
class SingularityEstimate:
    location: object  # mpc
    exponent: object  # gamma, None for clustered roots
    approximant_id: str
    classification: str = "spurious"  # physical | spurious | defect
    clustered: bool = False

    @property
    def local_exponent(self):
        """lambda in F ~ (1 - z/z_c)^lambda, the sign convention of raw DA tables."""
        return None if self.exponent is None else -self.exponent

    @property
    def is_real(self) -> bool:
        z = self.location
        return abs(z.imag) <= 1e-6 * abs(z) if z != 0 else True


def pade(s: ExactSeries, i: int, j: int, cfg: PrecisionConfig | None = None) -> RationalApproximant:
    """[i/j] Pade approximant with Q(0) = 1."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    if i < 0 or j < 0:
        raise ValueError("degrees must be non-negative")
    with mpmath.workprec(prec):
        f = _dense_values(s, prec)
        if i + j + 1 > len(f):
            raise ValueError(f"[{i}/{j}] needs {i + j + 1} coefficients, have {len(f)}")
        fc = lambda n: f[n] if n >= 0 else mpmath.mpf(0)
        q = [mpmath.mpf(1)]
        reduced = False
        if j:
            A = [[fc(n - m) for m in range(1, j + 1)] for n in range(i + 1, i + j + 1)]
            rhs = [-fc(n) for n in range(i + 1, i + j + 1)]
            sol, reduced = solve_system(A, rhs, prec, what=f"Pade [{i}/{j}] denominator block")
            q += sol
        p = [mpmath.fsum(q[m] * fc(n - m) for m in range(0, min(n, j) + 1)) for n in range(i + 1)]
        return RationalApproximant(tuple(p), tuple(q), reduced)


def _log_derivative(s: ExactSeries, order: int) -> ExactSeries:
    d = s.dense()
    if d[0] == 0:
        raise SeriesError("log derivative needs a nonzero constant term")
    deriv = ExactSeries(tuple(Fraction(k) * c for k, c in enumerate(d) if k >= 1) or (Fraction(0),))
    return series_mul(deriv, series_inv(ExactSeries(tuple(d)), order), order)


def dlog_pade(s: ExactSeries, i: int, j: int, cfg: PrecisionConfig | None = None,
              cluster_tol: float = 1e-6) -> list[SingularityEstimate]:
    """Poles of the [i/j] Pade approximant to F'/F and their exponents (residues)."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    if not s.exact:
        raise SeriesError("dlog_pade works on exact series")
    order = len(s.dense()) - 2
    if order < 0:
        return []
    g = _log_derivative(s, order)
    if all(c == 0 for c in g.coeffs):
        return []
    ap = pade(g, i, j, cfg)
    with mpmath.workprec(prec):
        roots = poly_roots(ap.Q, prec)
        dq = _poly_deriv(list(ap.Q))
        flags = _cluster_flags(roots, cluster_tol)
        out = []
        for z, cl in zip(roots, flags):
            expo = None if cl else _realify(-_poly_eval(ap.P, z) / _poly_eval(dq, z))
            out.append(SingularityEstimate(_as_mpc(z), expo, f"dlog[{i}/{j}]", "spurious", cl))
        return out


def _as_mpc(z):
    return mpmath.mpc(z)


def _realify(v, rel=mpmath.mpf(2) ** -60):
    v = mpmath.mpc(v)
    if abs(v.imag) <= rel * max(abs(v), 1):
        return v.real
    return v


def _cluster_flags(roots, tol):
    flags = [False] * len(roots)
    for a in range(len(roots)):
        for b in range(a + 1, len(roots)):
            if abs(roots[a] - roots[b]) <= tol * max(abs(roots[a]), abs(roots[b])):
                flags[a] = flags[b] = True
    return flags


@dataclass(frozen=True)
class DiffApproximant:
    M: int
    degrees: tuple  # N_0 .. N_M
    L: int
    Q: tuple  # Q[k] = coefficient tuple of Q_k, ascending
    P: tuple
    residual: object
    reduced: bool = False

    @property
    def ident(self) -> str:
        return f"M={self.M};N={','.join(map(str, self.degrees))};L={self.L}"

    @property
    def n_used(self) -> int:
        return self.L + sum(d + 1 for d in self.degrees)


def diff_approximant(s: ExactSeries, M: int, degrees, L: int,
                     cfg: PrecisionConfig | None = None) -> DiffApproximant:
    """Fit sum_k Q_k theta^k F + P = 0 through the first N coefficients."""
    cfg = cfg or PrecisionConfig()
    prec = cfg.precision_bits
    degrees = tuple(int(d) for d in degrees)
    if M < 1 or len(degrees) != M + 1 or min(degrees) < 0 or L < -1:
        raise ValueError("need M >= 1, M + 1 non-negative degrees and L >= -1")
    N = L + sum(d + 1 for d in degrees)
    with mpmath.workprec(prec):
        f = _dense_values(s, prec)
        if N > len(f):
            raise ValueError(f"approximant needs {N} coefficients, have {len(f)}")
        # unknowns ordered by power of z so high-degree terms are the free ones
        cols = []
        top = max(max(degrees), L)
        for i in range(top + 1):
            for k in range(M + 1):
                if i <= degrees[k] and not (k == M and i == 0):
                    cols.append(("q", k, i))
            if i <= L:
                cols.append(("p", i))
        powk = [[mpmath.mpf(n) ** k for k in range(M + 1)] for n in range(N)]

        def entry(n, col):
            if col[0] == "p":
                return mpmath.mpf(1) if n == col[1] else mpmath.mpf(0)
            _, k, i = col
            return powk[n - i][k] * f[n - i] if n >= i else mpmath.mpf(0)

        A = [[entry(n, c) for c in cols] for n in range(N)]
        rhs = [-powk[n][M] * f[n] for n in range(N)]
        x, reduced = solve_system(A, rhs, prec, what=f"DA {M}/{degrees}/{L}")
        Q = [[mpmath.mpf(0)] * (d + 1) for d in degrees]
        Q[M][0] = mpmath.mpf(1)
        P = [mpmath.mpf(0)] * (L + 1)
        for col, v in zip(cols, x):
            if col[0] == "p":
                P[col[1]] = v
            else:
                Q[col[1]][col[2]] = v
        res = max((abs(mpmath.fsum(a * v for a, v in zip(row, x)) - r) for row, r in zip(A, rhs)),
                  default=mpmath.mpf(0))
        scale = max((abs(v) for v in rhs), default=mpmath.mpf(1)) or mpmath.mpf(1)
        return DiffApproximant(M, degrees, L, tuple(map(tuple, Q)), tuple(P), res / scale, reduced)


def da_singularities(d: DiffApproximant, cluster_tol: float = 1e-6,
                     prec: int | None = None) -> list[SingularityEstimate]:
    """Roots of Q_M with indicial exponents gamma = -(M - 1 - Q_{M-1}(z)/(z Q_M'(z)))."""
    prec = prec or PrecisionConfig().precision_bits
    with mpmath.workprec(prec):
        qm = list(d.Q[d.M])
        roots = [z for z in poly_roots(qm, prec) if z != 0]
        flags = _cluster_flags(roots, cluster_tol)
        dq = _poly_deriv(qm)
        out = []
        for z, cl in zip(roots, flags):
            expo = None
            if not cl:
                den = z * _poly_eval(dq, z)
                if den != 0:
                    lam = d.M - 1 - _poly_eval(d.Q[d.M - 1], z) / den
                    expo = _realify(-lam)
            out.append(SingularityEstimate(mpmath.mpc(z), expo, d.ident, "spurious", cl))
        return out


def reciprocal_series(s: ExactSeries) -> ExactSeries:
    """Series whose coefficients are the reciprocals of the input's (zeros kept as zero)."""
    return ExactSeries(tuple(Fraction(0) if c == 0 else 1 / c for c in s.coeffs),
                       s.var_step, s.start, s.exact)


@dataclass
class SurveyRow:
    ident: str
    L: int
    degrees: tuple
    location: object = None
    exponent: object = None
    real_extras: list = field(default_factory=list)  # [(z, gamma or None)] other real-axis roots
    defect: str | None = None
    clustered: bool = False


@dataclass
class SurveyReport:
    M: int
    n_coefficients: int
    search_window: tuple
    rows: list
    aggregate: dict
    by_L: dict
    real_axis: list  # pooled non-physical positive real singularities

    def to_dict(self) -> dict:
        def num(v):
            if v is None:
                return None
            if isinstance(v, mpmath.mpc):
                return [float(v.real), float(v.imag)]
            return float(v)

        return {
            "M": self.M,
            "n_coefficients": self.n_coefficients,
            "search_window": [num(v) for v in self.search_window],
            "aggregate": {k: num(v) if not isinstance(v, int) else v for k, v in self.aggregate.items()},
            "by_L": {str(k): {kk: num(vv) if not isinstance(vv, int) else vv for kk, vv in v.items()}
                     for k, v in sorted(self.by_L.items())},
            "rows": [{"id": r.ident, "L": r.L, "degrees": list(r.degrees), "z": num(r.location),
                      "exponent": num(r.exponent), "defect": r.defect, "clustered": r.clustered,
                      "real_extras": [[num(z), num(e)] for z, e in r.real_extras]} for r in self.rows],
            "real_axis": [num(z) for z in self.real_axis],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"order {self.M} differential approximants, {self.n_coefficients} coefficients",
                 f"{'L':>4}  {'count':>5}  {'z_c':>28}  {'exponent':>24}"]
        for L, agg in sorted(self.by_L.items()):
            lines.append(f"{L:>4}  {agg['count']:>5}  {_pm(agg['zc_mean'], agg['zc_sd']):>28}  "
                         f"{_pm(agg['exp_mean'], agg['exp_sd']):>24}")
        a = self.aggregate
        lines.append(f"{'all':>4}  {a['count']:>5}  {_pm(a['zc_mean'], a['zc_sd']):>28}  "
                     f"{_pm(a['exp_mean'], a['exp_sd']):>24}")
        return "\n".join(lines)


def _pm(m, sd):
    if m is None or (isinstance(m, float) and math.isnan(m)):
        return "-"
    return f"{float(m):.12g} +- {float(sd):.2g}"


def _trimmed(vals, nsd: float = 3.0):
    """One pass of n-standard-deviation outlier rejection; returns kept indices."""
    if len(vals) < 3:
        return list(range(len(vals)))
    m, sd = mean(vals), pstdev(vals)
    if sd == 0:
        return list(range(len(vals)))
    return [i for i, v in enumerate(vals) if abs(v - m) <= nsd * sd]


def _aggregate(rows):
    good = [r for r in rows if r.defect is None and r.location is not None]
    zs = [float(r.location.real) for r in good]
    keep = _trimmed(zs)
    zs_k = [zs[i] for i in keep]
    ex = [float(good[i].exponent.real) if isinstance(good[i].exponent, mpmath.mpc)
          else float(good[i].exponent) for i in keep if good[i].exponent is not None]
    nan = float("nan")
    return {
        "count": len(zs_k),
        "outliers": len(zs) - len(zs_k),
        "zc_mean": mean(zs_k) if zs_k else nan,
        "zc_sd": pstdev(zs_k) if len(zs_k) > 1 else (0.0 if zs_k else nan),
        "exp_mean": mean(ex) if ex else nan,
        "exp_sd": pstdev(ex) if len(ex) > 1 else (0.0 if ex else nan),
        "local_exp_mean": -mean(ex) if ex else nan,
        "clustered": sum(1 for i in keep if good[i].clustered),
    }


def ratio_search_window(s: ExactSeries, slack: float = 0.15) -> tuple:
    """Search window anchored at z = 1/r_N on the side the ratio trend points to.

    Increasing tail ratios approach mu from below, so z_c < 1/r_N; decreasing ones
    from above.  Without a clear trend the window is two-sided.
    """
    c = s.dense()
    rs = [(n, c[n] / c[n - 1]) for n in range(1, len(c)) if c[n] and c[n - 1]]
    if not rs:
        return (0.0, math.inf)
    z = abs(float(1 / rs[-1][1]))
    tail = [float(v) for _, v in rs[-6:]]
    diffs = [b - a for a, b in zip(tail, tail[1:])]
    if diffs and all(d > 0 for d in diffs):
        return (z * (1 - slack), z)
    if diffs and all(d < 0 for d in diffs):
        return (z, z * (1 + slack))
    return (z * (1 - slack), z * (1 + slack))


def _physical(sings, window, near=None):
    """Smallest-modulus real root in the window, or the one nearest ``near`` when given."""
    lo, hi = window
    cands = [s for s in sings if s.is_real and s.location.real > 0
             and lo <= s.location.real <= hi]
    if not cands:
        return None
    if near is not None:
        return min(cands, key=lambda s: abs(s.location.real - near))
    return min(cands, key=lambda s: abs(s.location))


def da_survey(s: ExactSeries, M: int, degree_window, L_values, search_window=(0.0, math.inf),
              cfg: PrecisionConfig | None = None, degree_offsets=(0, 1),
              reciprocal: bool = False, cluster_tol: float = 1e-6, refine: bool = True) -> SurveyReport:
    """Survey of order-M approximants with N_M = K, N_k = K (k >= 1), N_0 = K + offset."""
    cfg = cfg or PrecisionConfig()
    if reciprocal:
        s = reciprocal_series(s)
    avail = len(s.dense())
    lo, hi = (float(search_window[0]), float(search_window[1]))
    rows = []
    found = []
    for L in sorted(L_values):
        for K in sorted(degree_window):
            for off in sorted(degree_offsets):
                degs = tuple([K + off] + [K] * M)
                if min(degs) < 0 or L + sum(d + 1 for d in degs) > avail:
                    continue
                row = SurveyRow(f"M={M};N={','.join(map(str, degs))};L={L}", L, degs)
                try:
                    d = diff_approximant(s, M, degs, L, cfg)
                except DefectError as exc:
                    row.defect = str(exc)
                    rows.append(row)
                    continue
                rows.append(row)
                found.append((row, da_singularities(d, cluster_tol, cfg.precision_bits)))
    first = [_physical(sings, (lo, hi)) for _, sings in found]
    picks = [p.location.real for p in first if p is not None]
    # second pass: the root nearest the survey median, so stray roots inside the
    # window do not displace the consensus singularity
    centre = median(picks) if refine and picks else None
    for (row, sings), p in zip(found, first):
        phys = _physical(sings, (lo, hi), centre) if centre is not None else p
        if phys is None:
            row.defect = "no physical root in search window"
            continue
        row.location = phys.location.real
        row.exponent = phys.exponent
        row.clustered = phys.clustered
        row.real_extras = [(x.location.real, x.exponent) for x in sings
                           if x is not phys and x.is_real and x.location.real > 0]
    if not any(r.defect is None for r in rows):
        raise DefectError("every approximant in the survey was defective")
    by_L = {}
    for L in sorted({r.L for r in rows}):
        by_L[L] = _aggregate([r for r in rows if r.L == L])
    agg = _aggregate(rows)
    pooled = sorted(float(z) for r in rows if r.defect is None for z, _ in r.real_extras)
    return SurveyReport(M, avail, (lo, hi), rows, agg, by_L, pooled)


@dataclass(frozen=True)
class Diagnosis:
    suspect: bool
    reasons: tuple
    details: dict


def nonalgebraic_diagnostic(survey: SurveyReport, zc_spread: float = 1e-3, max_exponent: float = 4.0,
                            exponent_spread: float = 1.0, extra_count: int = 3,
                            extra_radius: float = 1.5) -> Diagnosis:
    """Flag poorly converged z_c, implausible exponents, or real-axis singularity build-up."""
    a = survey.aggregate
    reasons = []
    zc, zsd = a["zc_mean"], a["zc_sd"]
    rel = zsd / abs(zc) if zc and not math.isnan(zc) else math.inf
    if rel > zc_spread:
        reasons.append("a")
    em, esd = a["exp_mean"], a["exp_sd"]
    # a repeated physical root of Q_M leaves no algebraic exponent at all
    confluent = a["count"] > 0 and a.get("clustered", 0) * 2 > a["count"]
    if confluent or math.isnan(em) or abs(em) > max_exponent or esd > exponent_spread:
        reasons.append("b")
    extras = []
    if not math.isnan(zc):
        seen = []
        for r in survey.rows:
            if r.defect is not None:
                continue
            for z, _ in r.real_extras:
                z = float(z)
                if z > zc * (1 + zc_spread) and z <= extra_radius * zc:
                    seen.append(z)
        extras = _distinct(seen, tol=max(zsd, 1e-3 * zc))
    if len(extras) >= extra_count:
        reasons.append("c")
    return Diagnosis(bool(reasons), tuple(reasons),
                     {"zc_relative_spread": rel, "exponent_mean": em, "exponent_sd": esd,
                      "confluent_root": confluent,
                      "real_axis_extras": extras})


def _distinct(values, tol):
    """Cluster sorted values that lie within tol of each other; one representative each."""
    out = []
    for v in sorted(values):
        if not out or v - out[-1][-1] > tol:
            out.append([v])
        else:
            out[-1].append(v)
    return [mean(c) for c in out if len(c) >= 1]
