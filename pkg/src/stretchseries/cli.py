"""Command-line front end and the end-to-end analysis recipe."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from ._tail import extrapolate_tail
from .approximants import DefectError, da_survey, nonalgebraic_diagnostic, ratio_search_window
from .extrapolate import ExtrapolationError, bst_limit, bst_table, monotone_rows, write_table_csv
from .fitting import (AsymptoticForm, amplitude_sequence, direct_fit3, direct_fit4, pair_ratio_fit,
                      triple_ratio_fit)
from .generators import (binomial_series, dyck_height_series, fragmented_permutations, ipdsaw_series,
                         load_coefficients, triangular_sap_coefficients, write_coefficients)
from .ratio import (EstimatorError, sign_changes, gamma_estimators, linearization_data, ratios, sigma_loglog_known_mu,
                    sigma_ratio_of_ratios, sigma_root_ratio)
from .seriescore import ExactSeries, PrecisionConfig, mpf_to_rational
from .transform import remove_stretch, transformed_analysis

REPORT_SCHEMA = "stretchseries.report/1"
FAMILIES = ("fragmented", "dyck", "ipdsaw", "binomial", "triangular-sap")
DEFAULT_SIGMAS = ("1/3", "1/2", "2/3")


def parse_number(text):
    """Fraction from '1/2', '3', '0.25'."""
    return Fraction(str(text).strip())


def builtin_series(family: str, order: int, y=None, mu=None, gamma=None, lam=None) -> ExactSeries:
    """A generator family as a series in its natural analysis variable."""
    if family == "fragmented":
        return fragmented_permutations(order, lam if lam is not None else 2)
    if family == "dyck":
        d = dyck_height_series(2 * order, y if y is not None else Fraction(1, 2))
        return ExactSeries(d.coeffs)
    if family == "ipdsaw":
        return ipdsaw_series(order, y if y is not None else 5)
    if family == "binomial":
        return binomial_series(order, mu if mu is not None else 4,
                               gamma if gamma is not None else Fraction(3, 2))
    if family == "triangular-sap":
        return triangular_sap_coefficients()
    raise ValueError(f"unknown family {family!r}")


@dataclass
class AnalysisConfig:
    input: str | None = None
    family: str | None = None
    order: int = 50
    y: str | None = None
    mu_param: str | None = None
    gamma_param: str | None = None
    precision_bits: int = field(default_factory=lambda: PrecisionConfig().precision_bits)
    known_mu: str | None = None
    known_sigma: str | None = None
    sigma_candidates: tuple = DEFAULT_SIGMAS
    bst_depth: int | None = None
    da_order: int = 2
    da_L: tuple = (0, 1, 2, 3)
    da_max_terms: int = 100
    da_window_slack: float = 0.15
    tail_window: int | None = None
    sigma_agreement: float = 0.1
    out: str | None = None

    def load(self) -> ExactSeries:
        if self.input:
            return load_coefficients(self.input).series
        if self.family:
            y = parse_number(self.y) if self.y is not None else None
            mu = parse_number(self.mu_param) if self.mu_param is not None else None
            g = parse_number(self.gamma_param) if self.gamma_param is not None else None
            return builtin_series(self.family, self.order, y=y, mu=mu, gamma=g)
        raise ValueError("no input: give --input or --family")


def _f(v):
    """JSON-safe float: NaN and infinities become None."""
    if v is None:
        return None
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, mpmath.mpc):
        v = v.real
    try:
        x = float(v)
    except (TypeError, ValueError):
        return str(v)
    return x if math.isfinite(x) else None


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (str, bool, int)) or obj is None:
        return obj
    return _f(obj)


def _write_csv(path: Path, header, rows, digits: int = 17):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([mpmath.nstr(v, digits) if isinstance(v, (mpmath.mpf, mpmath.mpc)) else v
                        for v in row])


def _sigma_summary(est):
    return {"method": est.method, "final": est.final, "interval": list(est.interval),
            "stretch_detected": est.stretch_detected, "sign": est.sign,
            "snapped": str(est.snapped) if est.snapped is not None else None, "notes": list(est.notes)}


def _consensus_sigma(estimates, candidates, agreement):
    """Candidate nearest the closest pair of estimators that agree within ``agreement``."""
    vals = [float(e.final) for e in estimates
            if e.stretch_detected and not mpmath.isnan(e.final) and 0.1 < float(e.final) < 1]
    best = None
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            gap = abs(vals[i] - vals[j])
            if gap <= agreement and (best is None or gap < best[1]):
                best = ((vals[i] + vals[j]) / 2, gap)
    if best is None:
        return None, False
    cands = [parse_number(c) for c in candidates]
    return min(cands, key=lambda c: abs(float(c) - best[0])), True


def run_recipe(cfg: AnalysisConfig) -> dict:
    """Run the nine analysis steps; each step degrades to a skip note instead of aborting."""
    pc = PrecisionConfig(cfg.precision_bits)
    series = cfg.load()
    b = ExactSeries(series.coeffs, 1, series.start, series.exact) if series.var_step != 1 else series
    n_coeffs = len(b.coeffs)
    if n_coeffs < 20:
        raise ValueError("the recipe needs at least 20 coefficients")
    out = Path(cfg.out) if cfg.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    steps = {}
    plots = {}
    win = cfg.tail_window

    r = ratios(b, pc)
    # (1) ratio plot against 1/n and its tail line
    rows = [(n, mpmath.mpf(1) / n, v) for n, v in r.defined()]
    try:
        with mpmath.workprec(pc.precision_bits):
            icpt, slope, used = extrapolate_tail(r.defined(), 1, win)
        steps["ratio_linearity"] = {"intercept": icpt, "slope": slope, "window": used,
                                    "sign_changes": sign_changes(r)}
    except ValueError as exc:
        steps["ratio_linearity"] = {"skipped": str(exc)}
    if out:
        _write_csv(out / "ratio_vs_inverse_n.csv", ["n", "1/n", "r_n"], rows)
        plots["ratio_vs_inverse_n"] = "ratio_vs_inverse_n.csv"

    # (2) differential approximants on the raw series
    diag = None
    da_mu = None
    try:
        raw = ExactSeries(b.dense()[: cfg.da_max_terms], exact=b.exact)
        window = ratio_search_window(raw, cfg.da_window_slack)
        avail = len(raw.coeffs)
        kmax = (avail - 1 - max(cfg.da_L)) // (cfg.da_order + 1) - 1
        survey = da_survey(raw, cfg.da_order, range(max(1, kmax - 4), kmax + 1), cfg.da_L, window, pc)
        diag = nonalgebraic_diagnostic(survey)
        zc = survey.aggregate["zc_mean"]
        if zc and math.isfinite(zc):
            da_mu = Fraction(1) / Fraction(zc)
        steps["da_raw"] = {"survey": survey.to_dict(), "text": survey.to_text(),
                           "diagnostic": {"suspect": diag.suspect, "reasons": list(diag.reasons),
                                          **diag.details}}
    except (DefectError, ValueError) as exc:
        steps["da_raw"] = {"skipped": str(exc)}

    # (3) sigma estimation
    known_mu = parse_number(cfg.known_mu) if cfg.known_mu else None
    # without a supplied mu, the log-log estimator uses 1/z_c from the raw approximants
    loglog_mu = known_mu if known_mu is not None else da_mu
    estimators = []
    sig = {"loglog_mu_source": "supplied" if known_mu is not None else "da" if da_mu else None}
    for name, fn in (("ratio_of_ratios", lambda: sigma_ratio_of_ratios(r)),
                     ("root_ratio", lambda: sigma_root_ratio(b, pc)),
                     ("loglog_known_mu", (lambda: sigma_loglog_known_mu(r, loglog_mu)) if loglog_mu else None)):
        if fn is None:
            sig[name] = {"skipped": "no mu available"}
            continue
        try:
            e = fn()
            estimators.append(e)
            sig[name] = _sigma_summary(e)
        except (EstimatorError, ValueError) as exc:
            sig[name] = {"skipped": str(exc)}
    if cfg.known_sigma:
        sigma_hat, agree = parse_number(cfg.known_sigma), True
    else:
        sigma_hat, agree = _consensus_sigma(estimators, cfg.sigma_candidates, cfg.sigma_agreement)
    sig["consensus"] = {"sigma": str(sigma_hat) if sigma_hat is not None else None, "agreement": agree}
    steps["sigma"] = sig
    if out:
        cols = {e.method: dict(e.per_n.items()) for e in estimators}
        ns = sorted({n for d in cols.values() for n in d})
        _write_csv(out / "sigma_loglog.csv", ["n"] + list(cols),
                   [[n] + [cols[m].get(n, "") for m in cols] for n in ns])
        plots["sigma_loglog"] = "sigma_loglog.csv"

    # (4) Bulirsch-Stoer on the ratios with w = 1 - sigma, (5) one refinement of sigma
    mu_hat = known_mu
    bst_info = {}
    if sigma_hat is not None:
        for attempt in range(2):
            try:
                depth = cfg.bst_depth or min(12, (len(r.r) - 2) // 2)
                tab = bst_table(r.r, 1 - sigma_hat, depth)
                lim = bst_limit(tab)
                bst_info = {"w": str(1 - sigma_hat), "mu": lim.value, "uncertainty": lim.uncertainty,
                            "row": lim.row, "monotone_rows": monotone_rows(tab)}
                if known_mu is None:
                    mu_hat = lim.value
                if out:
                    write_table_csv(tab, out / "bst_table.csv")
                    plots["bst_table"] = "bst_table.csv"
            except (ExtrapolationError, ValueError) as exc:
                bst_info = {"skipped": str(exc)}
                break
            if attempt == 1 or mu_hat is None:
                break
            try:
                ref = sigma_loglog_known_mu(r, mu_hat)
                refined = ref.snapped
                bst_info["refined_sigma"] = {"final": ref.final,
                                             "snapped": str(refined) if refined is not None else None}
                if cfg.known_sigma or refined is None or refined == sigma_hat:
                    break
                sigma_hat = refined
            except (EstimatorError, ValueError) as exc:
                bst_info["refined_sigma"] = {"skipped": str(exc)}
                break
    else:
        bst_info = {"skipped": "no sigma consensus"}
    steps["bst"] = bst_info

    form = {"sigma": sigma_hat, "mu": mu_hat}
    # (6) direct fits
    fits = {}
    if sigma_hat is not None:
        try:
            t4 = direct_fit4(b, sigma_hat, pc, win)
            fits["direct4"] = {"estimates": t4.estimates, "derived": t4.derived, "skipped": t4.skipped}
        except ValueError as exc:
            fits["direct4"] = {"skipped": str(exc)}
        if mu_hat is not None:
            try:
                t3 = direct_fit3(b, sigma_hat, mu_hat, pc, win)
                fits["direct3"] = {"estimates": t3.estimates, "derived": t3.derived, "skipped": t3.skipped}
            except ValueError as exc:
                fits["direct3"] = {"skipped": str(exc)}
    steps["direct_fits"] = fits or {"skipped": "sigma unknown"}

    # (7) pair and triple ratio fits
    pf = {}
    if sigma_hat is not None and mu_hat is not None:
        try:
            tp = pair_ratio_fit(r, mu_hat, sigma_hat, win)
            pf["pair"] = {"estimates": tp.estimates, "derived": tp.derived, "abscissa": tp.abscissa}
            form["log_mu1"] = tp.derived["log_mu1"]
            form["g"] = tp.derived["g"]
            if out:
                ns = [n for n, _ in tp.constants["c1"].items()]
                _write_csv(out / "pair_fit.csv", ["n", "c1", "c2"],
                           [(n, tp.constants["c1"][n], tp.constants["c2"][n]) for n in ns])
                plots["pair_fit"] = "pair_fit.csv"
        except ValueError as exc:
            pf["pair"] = {"skipped": str(exc)}
        try:
            tt = triple_ratio_fit(r, mu_hat, sigma_hat, win)
            pf["triple"] = {"estimates": tt.estimates, "derived": tt.derived, "abscissa": tt.abscissa}
        except ValueError as exc:
            pf["triple"] = {"skipped": str(exc)}
        if out:
            _write_csv(out / "ratio_vs_n_sigma.csv", ["n", "n^(sigma-1)", "r_n"],
                       linearization_data(r, sigma_hat))
            plots["ratio_vs_n_sigma"] = "ratio_vs_n_sigma.csv"
    steps["ratio_fits"] = pf or {"skipped": "sigma or mu unknown"}

    # (8) transform
    if sigma_hat is not None:
        try:
            ts = remove_stretch(b, sigma_hat, pc)
            rep = transformed_analysis(ts, pc)
            steps["transform"] = {"exponent_factor": ts.exponent_factor, **rep.to_dict()}
        except (ValueError, DefectError) as exc:
            steps["transform"] = {"skipped": str(exc)}
    else:
        steps["transform"] = {"skipped": "sigma unknown"}

    # (9) amplitude
    if all(form.get(k) is not None for k in ("sigma", "mu", "log_mu1", "g")):
        try:
            af = AsymptoticForm(1, form["mu"], mpmath.exp(form["log_mu1"]), form["sigma"], form["g"])
            amp = amplitude_sequence(b, af, pc, window=win)
            form["B"] = amp.estimate
            steps["amplitude"] = {"B": amp.estimate, "abscissa": str(amp.abscissa), "window": amp.window}
            if out:
                _write_csv(out / "amplitude.csv", ["n", "B_n"], list(amp.sequence.items()))
                plots["amplitude"] = "amplitude.csv"
        except ValueError as exc:
            steps["amplitude"] = {"skipped": str(exc)}
    else:
        steps["amplitude"] = {"skipped": "form incomplete"}

    fired = bool(diag and diag.suspect)
    if fired and sigma_hat is not None and agree:
        verdict = "stretched-exponential"
    elif diag is not None and not diag.suspect:
        verdict = "algebraic"
    else:
        verdict = "inconclusive"
    if verdict == "algebraic":
        agg = steps["da_raw"]["survey"]["aggregate"]
        form = {"z_c": agg["zc_mean"], "mu": 1 / agg["zc_mean"] if agg["zc_mean"] else None,
                "gamma": agg["exp_mean"]}
    report = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "config": asdict(cfg),
        "n_coefficients": n_coeffs,
        "thresholds": {"sigma_agreement": cfg.sigma_agreement, "zc_spread": 1e-3, "max_exponent": 4.0,
                       "exponent_spread": 1.0, "real_axis_extras": 3, "extras_radius": 1.5},
        "steps": steps,
        "form": form,
        "verdict": verdict,
        "plots": plots,
    }
    report = _clean(report)
    if out:
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def _load_arg(args) -> ExactSeries:
    if getattr(args, "input", None):
        return load_coefficients(args.input).series
    if getattr(args, "family", None):
        y = parse_number(args.y) if args.y is not None else None
        return builtin_series(args.family, args.order, y=y)
    raise SystemExit("give --input FILE or --family NAME")


def _add_source(p):
    p.add_argument("--input", help="coefficient file")
    p.add_argument("--family", choices=FAMILIES, help="builtin generator instead of a file")
    p.add_argument("--order", type=int, default=50)
    p.add_argument("--y", help="family parameter y (dyck, ipdsaw)")


def _prec(args) -> PrecisionConfig:
    return PrecisionConfig(args.precision) if args.precision else PrecisionConfig()


def cmd_generate(args):
    y = parse_number(args.y) if args.y is not None else None
    mu = parse_number(args.mu) if args.mu is not None else None
    g = parse_number(args.gamma) if args.gamma is not None else None
    if args.family == "dyck":
        s = dyck_height_series(2 * args.order, y if y is not None else Fraction(1, 2))
    else:
        s = builtin_series(args.family, args.order, y=y, mu=mu, gamma=g)
    note = f"family={args.family} order={args.order}" + (f" y={args.y}" if args.y else "")
    if args.out:
        write_coefficients(args.out, s, comment=note)
    else:
        from .generators import format_coefficients
        sys.stdout.write(format_coefficients(s, comment=note))


def cmd_ratios(args):
    pc = _prec(args)
    b = _load_arg(args)
    r = ratios(ExactSeries(b.coeffs, 1, b.start, b.exact), pc)
    gam = dict(gamma_estimators(r).items()) if len(r.r) >= 3 else {}
    rows = [(n, mpmath.mpf(1) / n, v, gam.get(n, "")) for n, v in r.r.items()]
    _emit_csv(args.out, ["n", "1/n", "r_n", "gamma_n"], rows)


def _emit_csv(path, header, rows):
    if path:
        _write_csv(Path(path), header, rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        for row in rows:
            w.writerow([mpmath.nstr(v, 17) if isinstance(v, mpmath.mpf) else v for v in row])


def cmd_sigma(args):
    pc = _prec(args)
    b = _load_arg(args)
    b = ExactSeries(b.coeffs, 1, b.start, b.exact)
    r = ratios(b, pc)
    ests = [sigma_ratio_of_ratios(r), sigma_root_ratio(b, pc)]
    if args.mu:
        ests.append(sigma_loglog_known_mu(r, parse_number(args.mu)))
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for e in ests:
        print(f"{e.method}: sigma = {mpmath.nstr(e.final, 6)} snapped={e.snapped} "
              f"stretch={e.stretch_detected} {'; '.join(e.notes)}")
        if out:
            _write_csv(out / f"sigma_{e.method}.csv", ["n", "sigma_n"], list(e.per_n.items()))


def cmd_bst(args):
    pc = _prec(args)
    b = _load_arg(args)
    r = ratios(ExactSeries(b.coeffs, 1, b.start, b.exact), pc)
    w = parse_number(args.w)
    depth = args.depth or min(12, (len(r.r) - 2) // 2)
    tab = bst_table(r.r, w, depth, args.variant)
    if args.out:
        write_table_csv(tab, args.out)
    try:
        lim = bst_limit(tab)
        print(f"limit = {mpmath.nstr(lim.value, 12)} +- {mpmath.nstr(lim.uncertainty, 3)} (row {lim.row})")
    except ExtrapolationError as exc:
        print(f"no limit: {exc}")


def cmd_fit(args):
    pc = _prec(args)
    b = _load_arg(args)
    b = ExactSeries(b.coeffs, 1, b.start, b.exact)
    sigma = parse_number(args.sigma)
    mu = parse_number(args.mu) if args.mu else None
    if args.kind == "direct4":
        t = direct_fit4(b, sigma, pc)
    elif args.kind == "direct3":
        t = direct_fit3(b, sigma, _need(mu, "--mu"), pc)
    elif args.kind in ("pair", "triple"):
        fn = pair_ratio_fit if args.kind == "pair" else triple_ratio_fit
        t = fn(ratios(b, pc), _need(mu, "--mu"), sigma)
    else:
        form = AsymptoticForm(1, _need(mu, "--mu"), mpmath.exp(parse_number(_need(args.log_mu1, "--log-mu1"))),
                              sigma, parse_number(_need(args.g, "--g")))
        a = amplitude_sequence(b, form, pc, abscissa=parse_number(args.abscissa) if args.abscissa else None)
        print(json.dumps(_clean({"B": a.estimate, "abscissa": str(a.abscissa), "window": a.window})))
        if args.out:
            _write_csv(Path(args.out), ["n", "B_n"], list(a.sequence.items()))
        return
    print(json.dumps(_clean({"estimates": t.estimates, "derived": t.derived,
                             "abscissa": t.abscissa, "skipped": t.skipped}), indent=2, sort_keys=True))
    if args.out:
        names = list(t.constants)
        ns = [n for n, _ in t.constants[names[0]].items()]
        _write_csv(Path(args.out), ["n"] + names, [[n] + [t.constants[k][n] for k in names] for n in ns])


def _need(v, flag):
    if v is None:
        raise SystemExit(f"{flag} is required here")
    return v


def cmd_da(args):
    pc = _prec(args)
    b = _load_arg(args)
    b = ExactSeries(b.coeffs, 1, b.start, b.exact)
    lo, hi = (int(x) for x in args.degrees.split(":"))
    Ls = [int(x) for x in args.L.split(",")]
    window = tuple(float(x) for x in args.window.split(",")) if args.window else ratio_search_window(b)
    sv = da_survey(b, args.M, range(lo, hi + 1), Ls, window, pc, reciprocal=args.reciprocal)
    print(sv.to_text())
    d = nonalgebraic_diagnostic(sv)
    print(f"suspect non-algebraic: {d.suspect} {','.join(d.reasons)}")
    if args.json:
        Path(args.json).write_text(sv.to_json() + "\n")


def cmd_transform(args):
    pc = _prec(args)
    b = _load_arg(args)
    t = remove_stretch(ExactSeries(b.coeffs, 1, b.start, b.exact), parse_number(args.sigma), pc)
    series = ExactSeries(tuple(mpf_to_rational(v) for v in t.d.values), 1, t.d.start_index, exact=False)
    note = f"transformed with sigma={t.sigma_used}; exponent = {mpmath.nstr(t.exponent_factor, 8)} * g"
    if args.out:
        write_coefficients(args.out, series, comment=note, decimals=True, digits=pc.digits)
    else:
        from .generators import format_coefficients
        sys.stdout.write(format_coefficients(series, comment=note, decimals=True, digits=pc.digits))


def cmd_analyze(args):
    cfg = AnalysisConfig(input=args.input, family=args.family, order=args.order, y=args.y,
                         precision_bits=_prec(args).precision_bits, known_mu=args.mu,
                         known_sigma=args.sigma, out=args.out, da_order=args.da_order,
                         tail_window=args.window)
    rep = run_recipe(cfg)
    if not args.out:
        print(json.dumps(rep, indent=2, sort_keys=True))
    else:
        print(f"verdict: {rep['verdict']}; report written to {Path(args.out) / 'report.json'}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stretchseries", description=__doc__)
    p.add_argument("--precision", type=int, help="working precision in bits (default from STRETCHSERIES_PRECISION or 256)")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a builtin series as a coefficient file")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--order", type=int, default=50)
    g.add_argument("--y")
    g.add_argument("--mu")
    g.add_argument("--gamma")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("ratios", help="ratios and gamma estimators as CSV")
    _add_source(r)
    r.add_argument("--out")
    r.set_defaults(func=cmd_ratios)

    s = sub.add_parser("sigma", help="stretch-exponent estimators")
    _add_source(s)
    s.add_argument("--mu")
    s.add_argument("--out", help="directory for per-estimator CSVs")
    s.set_defaults(func=cmd_sigma)

    b = sub.add_parser("bst", help="Bulirsch-Stoer extrapolation of the ratios")
    _add_source(b)
    b.add_argument("--w", required=True)
    b.add_argument("--depth", type=int)
    b.add_argument("--variant", choices=("rational", "polynomial"), default="rational")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bst)

    f = sub.add_parser("fit", help="direct, ratio-pair or amplitude fits")
    _add_source(f)
    f.add_argument("--kind", choices=("direct4", "direct3", "pair", "triple", "amplitude"), default="direct4")
    f.add_argument("--sigma", required=True)
    f.add_argument("--mu")
    f.add_argument("--log-mu1", dest="log_mu1")
    f.add_argument("--g")
    f.add_argument("--abscissa")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("da", help="differential-approximant survey")
    _add_source(d)
    d.add_argument("--M", type=int, default=2)
    d.add_argument("--degrees", default="4:8", help="range lo:hi of N_M")
    d.add_argument("--L", default="0,1,2")
    d.add_argument("--window", help="lo,hi search window for the physical root")
    d.add_argument("--reciprocal", action="store_true", help="analyse the series of reciprocal coefficients")
    d.add_argument("--json")
    d.set_defaults(func=cmd_da)

    t = sub.add_parser("transform", help="remove the stretched factor")
    _add_source(t)
    t.add_argument("--sigma", required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    a = sub.add_parser("analyze", help="run the full recipe")
    _add_source(a)
    a.add_argument("--mu", help="known growth constant")
    a.add_argument("--sigma", help="known stretch exponent")
    a.add_argument("--da-order", type=int, default=2)
    a.add_argument("--window", type=int, help="tail window for straight-line extrapolations")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        # every library error derives from ValueError; report it without a traceback
        print(f"stretchseries: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
