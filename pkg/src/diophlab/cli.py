"""Command-line surface: flags -> RunConfig -> dispatch -> files/stdout.

Exit codes: 0 success, 2 parameter/validation problems, 3 undecidable at
the refinement budget.  Errors are emitted as one JSON object on stderr.
All tabular output is CSV with a header row; fractions print as "p/q";
repeated runs with the same config and seed are byte-identical.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from .numbers import (ParameterError, PrecisionError, UndecidableError,
                      RealEnclosure, as_real_spec, spec_from_json)
from .contfrac import ContinuedFraction, omega_estimate, table_rows
from .threegap import (largest_gap, largest_gap_form, gap_decomposition,
                       sweep_largest_gap_agreement, find_small_shift)
from .ostrowski import (ostrowski_encode, ostrowski_decode, OstrowskiDigits,
                        cylinder_elements)
from .bohr import (BohrParams, enumerate_bohr, bohr_cardinality_check,
                   lattice_basis, residue_equivalence_check,
                   count_lattice_in_box, davenport_check)
from .shiftred import anchor_convergent, is_shift_reduced, phi_sweep
from .measure import (ApproxSetSpec, build_approx_set, IntervalSetBounds,
                      localized_specs, divergence_sum, overlap_matrix_sum)
from .sums import (figure1, log_avg_sum, gallagher_counter, ApproxFunction,
                   FIGURE1_ALPHAS)
from . import plotting


# ------------------------------------------------------------ run config

class RunConfig:
    """One resolved invocation: command path, parameters, output policy."""

    __slots__ = ("command", "params", "out", "format",
                 "refinement_budget", "random_seed", "threads")

    def __init__(self, command, params, out=None, format="csv",
                 refinement_budget=None, random_seed=0, threads=None):
        self.command = command
        self.params = params
        self.out = out
        self.format = format
        if refinement_budget is not None and refinement_budget <= 0:
            raise ParameterError("budget must be positive")
        self.refinement_budget = refinement_budget
        self.random_seed = random_seed
        self.threads = threads


# ------------------------------------------------------- value formatting

def _fmt(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float) and v == float("inf"):
        return "inf"
    if isinstance(v, RealEnclosure):
        return {"lo": _jsonable(v.lo), "hi": _jsonable(v.hi)}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(config, header, rows, summary):
    """Write the table per the output policy; summary JSON to stdout."""
    if config.format == "json":
        payload = json.dumps(
            {"rows": [_jsonable(list(r)) for r in rows],
             "header": list(header), "summary": _jsonable(summary)},
            indent=2, sort_keys=True)
        if config.out:
            with open(config.out, "w") as f:
                f.write(payload + "\n")
        else:
            print(payload)
        return
    text = _csv_text(header, rows)
    if config.out:
        with open(config.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if summary is not None:
        print(json.dumps(_jsonable(summary), sort_keys=True))


# ------------------------------------------------------- input parsing

def _parse_real(text, flag):
    """A real-number spec from a flag: JSON object, rule id, or p/q."""
    if text is None:
        raise ParameterError(f"missing {flag}")
    s = text.strip()
    if s.startswith("{"):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as e:
            raise ParameterError(f"{flag}: malformed JSON ({e.msg} at "
                                 f"column {e.colno})")
        return spec_from_json(obj)
    try:
        return as_real_spec(s)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"{flag}: expected a JSON spec, a rule id, "
                             f"or p/q, got {text!r}")


def _parse_fraction(text, flag):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"{flag}: expected a rational p/q, got {text!r}")


def _parse_json_list(text, flag):
    try:
        val = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParameterError(f"{flag}: malformed JSON ({e.msg} at column "
                             f"{e.colno})")
    if not isinstance(val, list):
        raise ParameterError(f"{flag}: expected a JSON list")
    return val


def _cf_from_flag(text, flag="--alpha") -> ContinuedFraction:
    return ContinuedFraction.from_spec(_parse_real(text, flag))


_PSI_RULES = {
    "divergent": lambda n: Fraction(1, 4 * n),
    "convergent": lambda n: Fraction(1, n * n),
}


def _parse_psi(text, flag):
    if text in _PSI_RULES:
        return _PSI_RULES[text]
    return ApproxFunction.constant(_parse_fraction(text, flag))


# ---------------------------------------------------------- cf handlers

def _run_cf(config):
    p = config.params
    if p["action"] == "convergents":
        cf = _cf_from_flag(p["alpha"])
        depth = p["depth"]
        if depth < 0:
            raise ParameterError("--depth must be >= 0")
        # a finite expansion caps the table at its own last index
        if cf.is_finite and depth > cf.length - 1:
            depth = cf.length - 1
        rows = table_rows(cf, depth)
        _emit(config, ("j", "p_j", "q_j", "D_j_lo", "D_j_hi"), rows,
              {"depth": depth})
        return 0
    if p["action"] == "omega":
        cf = _cf_from_flag(p["alpha"])
        est = omega_estimate(cf, p["depth"])
        print(json.dumps({"depth": p["depth"], "omega": float(est)}))
        return 0
    raise ParameterError(f"unknown cf action {p['action']!r}")


# ---------------------------------------------------- ostrowski handlers

def _run_ostrowski(config):
    p = config.params
    cf = _cf_from_flag(p["alpha"])
    if p["action"] == "encode":
        d = ostrowski_encode(p["n"], cf)
        print(json.dumps({"n": p["n"], "digits": list(d.digits)}))
        return 0
    if p["action"] == "decode":
        digits = _parse_json_list(p["digits"], "--digits")
        n = ostrowski_decode(OstrowskiDigits(cf, digits))
        print(json.dumps({"digits": digits, "n": n}))
        return 0
    if p["action"] == "cylinder":
        prefix = _parse_json_list(p["prefix"], "--prefix")
        elems = cylinder_elements(tuple(prefix), cf, p["count"])
        _emit(config, ("index", "n"), list(enumerate(elems)),
              {"prefix": prefix, "count": len(elems)})
        return 0
    raise ParameterError(f"unknown ostrowski action {p['action']!r}")


# ----------------------------------------------------- threegap handlers

def _run_threegap(config):
    p = config.params
    if p["action"] == "gaps":
        cf = _cf_from_flag(p["alpha"])
        m = p["m"]
        form = largest_gap_form(m, cf)
        enc = largest_gap(m, cf, Fraction(1, 10 ** 30))
        dec = gap_decomposition(m, cf)
        print(json.dumps(_jsonable({
            "m": m, "form": {"u": form[0], "v": form[1]},
            "decomposition": {"k": dec.k, "r": dec.r, "s": dec.s},
            "gap_lo": float(enc.lo), "gap_hi": float(enc.hi)})))
        return 0
    if p["action"] == "sweep":
        cf = _cf_from_flag(p["alpha"])
        rep = sweep_largest_gap_agreement(cf, p["m"])
        ok = not rep["mismatches"]
        print(json.dumps(_jsonable({"m_max": p["m"], "agree": ok,
                                    "max_distinct": rep["max_distinct"],
                                    "mismatches": rep["mismatches"]})))
        return 0 if ok else 1
    if p["action"] == "smallshift":
        cf = _cf_from_flag(p["alpha"])
        gamma = _parse_real(p["gamma"], "--gamma")
        n = find_small_shift(p["t"], cf, gamma)
        print(json.dumps({"t": p["t"], "n": n}))
        return 0
    raise ParameterError(f"unknown threegap action {p['action']!r}")


# --------------------------------------------------------- bohr handlers

def _run_bohr(config):
    p = config.params
    if p["action"] == "enumerate":
        alphas = [_parse_real(a, "--alphas")
                  for a in _parse_json_list(p["alphas"], "--alphas")]
        gammas = [_parse_real(str(g), "--gammas")
                  for g in _parse_json_list(p["gammas"], "--gammas")]
        rhos = [_parse_fraction(str(r), "--rhos")
                for r in _parse_json_list(p["rhos"], "--rhos")]
        members = enumerate_bohr(BohrParams(alphas, gammas, p["n"], rhos))
        _emit(config, ("n",), [(m,) for m in members],
              {"count": len(members), "N": p["n"]})
        return 0
    if p["action"] == "cardinality":
        alpha = _parse_real(p["alpha"], "--alpha")
        delta = _parse_fraction(p["delta"], "--delta")
        rep = bohr_cardinality_check(alpha, delta, p["n"])
        print(json.dumps(_jsonable(rep), sort_keys=True))
        return 0 if rep["bounds_hold"] else 1
    if p["action"] == "lattice":
        A = _parse_json_list(p["coeffs"], "--coeffs")
        lat = lattice_basis(tuple(int(a) for a in A), p["d"])
        rep = {"A": list(lat.A), "d": lat.d, "basis": [list(b) for b in lat.basis],
               "det": lat.det, "equivalence": residue_equivalence_check(lat)}
        if p.get("box"):
            box = [(int(lo), int(hi))
                   for lo, hi in _parse_json_list(p["box"], "--box")]
            rep["box_count"] = count_lattice_in_box(lat, box)
            if lat.k <= 3:
                rep["davenport"] = davenport_check(box, lat)
        print(json.dumps(_jsonable(rep), sort_keys=True))
        return 0 if rep["equivalence"] else 1
    raise ParameterError(f"unknown bohr action {p['action']!r}")


# ----------------------------------------------------- shiftred handlers

def _run_shiftred(config):
    p = config.params
    gamma = _parse_real(p["gamma"], "--gamma")
    eta = _parse_fraction(p["eta"], "--eta")
    if p["action"] == "phi":
        rows = phi_sweep(gamma, eta, p["nmax"])
        _emit(config, ("n", "totient", "phi_shift", "q_t", "c_t"), rows,
              {"nmax": p["nmax"]})
        return 0
    if p["action"] == "check":
        anchor = anchor_convergent(gamma, eta, p["n"])
        red = is_shift_reduced(p["a"], p["n"], gamma, eta, anchor=anchor)
        print(json.dumps({"a": p["a"], "n": p["n"], "reduced": red,
                          "t": anchor.t, "q_t": anchor.q, "c_t": anchor.c}))
        return 0
    raise ParameterError(f"unknown shiftred action {p['action']!r}")


# ------------------------------------------------------ measure handlers

def _run_measure(config):
    p = config.params
    if p["action"] == "approx":
        gamma = _parse_real(p["gamma"], "--gamma")
        psi = _parse_fraction(p["psi"], "--psi")
        window = tuple(_parse_fraction(str(w), "--window")
                       for w in _parse_json_list(p["window"], "--window"))
        filt = None
        if p.get("filter_eta"):
            filt = ("shift_reduced", gamma,
                    _parse_fraction(p["filter_eta"], "--filter-eta"))
        spec = ApproxSetSpec(n=p["n"], psi=psi, gamma=gamma,
                             hat_n=p.get("hat") or None, window=window,
                             filter=filt)
        s = build_approx_set(spec)
        if isinstance(s, IntervalSetBounds):
            rows = [(lo, hi) for lo, hi in s.upper.intervals]
            m = s.measure()
            summary = {"measure_lo": _fmt(m.lo), "measure_hi": _fmt(m.hi),
                       "intervals": len(rows), "exact": False}
        else:
            rows = list(s.intervals)
            summary = {"measure": _fmt(s.measure()),
                       "intervals": len(rows), "exact": True}
        _emit(config, ("lo", "hi"), rows, summary)
        return 0
    if p["action"] == "bcratio":
        rep = _bcratio_run(p["x"], p.get("eps0"), p.get("eta"))
        rows = rep.pop("rows")
        _emit(config, ("n", "hat_n", "mu_lo", "mu_hi", "psi_lo", "psi_hi"),
              rows, rep)
        return 0
    raise ParameterError(f"unknown measure action {p['action']!r}")


def _bc_psi(m):
    from .numbers import paper_log_enclosure
    pl = paper_log_enclosure(m)
    return (pl * pl * (4 * m)).reciprocal()


def _bcratio_run(X, eps0=None, eta=None):
    """The scale-localised overlap diagnostic on the standard pair
    (alpha = sqrt2, gamma = 0, psi(n) = 1/(4 n max(ln n,1)^2))."""
    eps0 = _parse_fraction(eps0, "--eps0") if eps0 else Fraction(3, 40)
    eta = _parse_fraction(eta, "--eta") if eta else Fraction(1, 2)
    specs = localized_specs(pairs=[(as_real_spec("sqrt2"), Fraction(0))],
                            psi_fn=_bc_psi, eps0=eps0, gamma=Fraction(0),
                            eta=eta, window=(Fraction(0), Fraction(1)), X=X)
    rows = []
    for s in specs:
        m = build_approx_set(s).measure()
        if not isinstance(m, RealEnclosure):
            m = RealEnclosure.exact(m)
        rows.append((s.n, s.hat_n, m.lo, m.hi, s.psi.lo, s.psi.hi))
    div = divergence_sum(specs, _bc_psi, k=2)
    over = overlap_matrix_sum(specs)
    return {"rows": rows, "X": X,
            "eps0": _fmt(eps0), "eta": _fmt(eta),
            "sum_measure_lo": float(div["sum_measure"].lo),
            "sum_measure_hi": float(div["sum_measure"].hi),
            "divergence_ratio_lo": float(div["ratio"].lo),
            "divergence_ratio_hi": float(div["ratio"].hi),
            "bc_ratio_lower": float(over["bc_ratio_lower"]),
            "bc_ratio_upper": float(over["bc_ratio_upper"])}


# --------------------------------------------------------- sums handlers

_FIGURE1_GP = """# gnuplot script for the log-averaged sum figure
set datafile separator ','
set terminal pngcairo size 900,600
set output '{png}'
set logscale x
set xlabel 'N'
set ylabel 'value'
plot '{csv}' using 1:2 skip 1 with lines lw 2 title 'S(N)', \\
     '{csv}' using 1:3 skip 1 with lines lw 2 dashtype 2 title 'fit'
"""


def _run_sums(config):
    p = config.params
    if p["action"] == "figure1":
        alphas = FIGURE1_ALPHAS
        if p.get("alphas"):
            alphas = [_parse_real(str(a), "--alphas")
                      for a in _parse_json_list(p["alphas"], "--alphas")]
        rep = figure1(p["h"], alphas=alphas, dense=p.get("dense", False))
        rows = rep["rows"]
        summary = {"H": rep["H"], "c": rep["c"]}
        out = config.out
        if out:
            stem = out[:-4] if out.endswith(".csv") else out
            csv_path = stem + ".csv"
            with open(csv_path, "w") as f:
                f.write(_csv_text(("N", "S", "fit"), rows))
            with open(stem + ".gp", "w") as f:
                f.write(_FIGURE1_GP.format(csv=os.path.basename(csv_path),
                                           png=os.path.basename(stem) + ".png"))
            with open(stem + ".json", "w") as f:
                f.write(json.dumps(summary, sort_keys=True) + "\n")
            ns = [r[0] for r in rows]
            plotting.save_series_plot(
                stem + ".png", ns,
                [("S(N)", [r[1] for r in rows]),
                 ("fit", [r[2] for r in rows])],
                title="log-averaged sum growth", xlabel="N", ylabel="value",
                logx=True)
            print(json.dumps(summary, sort_keys=True))
        else:
            _emit(config, ("N", "S", "fit"), rows, summary)
        return 0
    if p["action"] == "savg":
        alphas = [_parse_real(str(a), "--alphas")
                  for a in _parse_json_list(p["alphas"], "--alphas")]
        gammas = None
        if p.get("gammas"):
            gammas = [_parse_fraction(str(g), "--gammas")
                      for g in _parse_json_list(p["gammas"], "--gammas")]
        rep = log_avg_sum(p["n"], alphas, gammas, mode=p.get("mode", "float"))
        if p.get("mode") == "exact_spotcheck":
            out = {"N": p["n"], "value": rep["value"],
                   "den_bits": rep["den"].bit_length() if rep["den"] else None}
        else:
            out = {"N": p["n"], "value": rep["value"],
                   "error_bound": rep["error_bound"], "zero_at": rep["zero_at"]}
        print(json.dumps(_jsonable(out), sort_keys=True))
        return 0
    if p["action"] == "gallagher":
        psi = _parse_psi(p["psi"], "--psi")
        grid = [Fraction(2 * m + 1, 2 ** 16) for m in range(p.get("grid", 512))]
        rep = gallagher_counter([], [Fraction(0)], psi, grid, p["n"])
        rows = list(enumerate(rep["counts"]))
        summary = {"N": p["n"], "psi": p["psi"],
                   "summary": {str(k): v for k, v in rep["summary"].items()},
                   "undecided": len(rep["undecided"])}
        _emit(config, ("grid_index", "count"), rows, summary)
        return 0
    raise ParameterError(f"unknown sums action {p['action']!r}")


# ----------------------------------------------------- selftest handler

def _run_selftest(config):
    from . import selftest
    level = config.params.get("level", "fast")
    if level not in ("fast", "full"):
        raise ParameterError(f"unknown selftest level {level!r}")
    reports = selftest.run(level)
    failed = 0
    for r in reports:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] {r['name']}  ({r['elapsed']:.1f}s)  {r['detail']}")
        failed += 0 if r["passed"] else 1
    print(f"{len(reports) - failed}/{len(reports)} passed")
    return 0 if failed == 0 else 1


# ------------------------------------------------------------- dispatch

_HANDLERS = {
    "cf": _run_cf,
    "ostrowski": _run_ostrowski,
    "threegap": _run_threegap,
    "bohr": _run_bohr,
    "shiftred": _run_shiftred,
    "measure": _run_measure,
    "sums": _run_sums,
    "selftest": _run_selftest,
}


def dispatch(config: RunConfig) -> int:
    """Run one config; returns the process exit status."""
    if config.refinement_budget is not None:
        os.environ["DIOPHLAB_BUDGET"] = str(config.refinement_budget)
    handler = _HANDLERS.get(config.command)
    if handler is None:
        raise ParameterError(f"unknown command {config.command!r}")
    return handler(config)


# ------------------------------------------------------------ arg parse

def _add_common(sp):
    sp.add_argument("--out", help="output file (CSV unless --format json)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--budget", type=int,
                    help="refinement budget override (DIOPHLAB_BUDGET)")
    sp.add_argument("--seed", type=int, default=0,
                    help="random seed recorded in the run config")
    sp.add_argument("--threads", type=int,
                    help="worker cap; evaluation is sequential and "
                         "deterministic regardless")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="diophlab",
        description="computational laboratory for metric diophantine "
                    "approximation")
    top = ap.add_subparsers(dest="command", required=True)

    cf = top.add_parser("cf", help="continued fraction tables and growth")
    cfs = cf.add_subparsers(dest="action", required=True)
    c = cfs.add_parser("convergents", help="CSV of j, p_j, q_j and the "
                       "signed error enclosure D_j")
    c.add_argument("--alpha", required=True)
    c.add_argument("--depth", type=int, required=True)
    _add_common(c)
    c = cfs.add_parser("omega", help="finite-depth denominator growth "
                       "exponent estimate")
    c.add_argument("--alpha", required=True)
    c.add_argument("--depth", type=int, required=True)
    _add_common(c)

    ost = top.add_parser("ostrowski", help="digit expansions over a "
                         "continued fraction base")
    osts = ost.add_subparsers(dest="action", required=True)
    c = osts.add_parser("encode", help="digits of n")
    c.add_argument("--alpha", required=True)
    c.add_argument("--n", type=int, required=True)
    _add_common(c)
    c = osts.add_parser("decode", help="n from digits (validates)")
    c.add_argument("--alpha", required=True)
    c.add_argument("--digits", required=True)
    _add_common(c)
    c = osts.add_parser("cylinder", help="smallest members of a digit-"
                        "prefix cylinder")
    c.add_argument("--alpha", required=True)
    c.add_argument("--prefix", required=True)
    c.add_argument("--count", type=int, default=10)
    _add_common(c)

    tg = top.add_parser("threegap", help="largest circle gap of {i alpha} "
                        "and small-shift search")
    tgs = tg.add_subparsers(dest="action", required=True)
    c = tgs.add_parser("gaps", help="closed-form largest gap at m points")
    c.add_argument("--alpha", required=True)
    c.add_argument("--m", type=int, required=True)
    _add_common(c)
    c = tgs.add_parser("sweep", help="formula vs exhaustive agreement up "
                       "to m")
    c.add_argument("--alpha", required=True)
    c.add_argument("--m", type=int, required=True)
    _add_common(c)
    c = tgs.add_parser("smallshift", help="least n with ||n alpha - gamma|| "
                       "below the t-th convergent error")
    c.add_argument("--alpha", required=True)
    c.add_argument("--gamma", required=True)
    c.add_argument("--t", type=int, required=True)
    _add_common(c)

    bo = top.add_parser("bohr", help="Bohr sets, progressions, congruence "
                        "lattices")
    bos = bo.add_subparsers(dest="action", required=True)
    c = bos.add_parser("enumerate", help="members of a Bohr set")
    c.add_argument("--alphas", required=True)
    c.add_argument("--gammas", required=True)
    c.add_argument("--rhos", required=True)
    c.add_argument("--N", dest="n", type=int, required=True)
    _add_common(c)
    c = bos.add_parser("cardinality", help="certified two-sided cardinality "
                       "bounds")
    c.add_argument("--alpha", required=True)
    c.add_argument("--delta", required=True)
    c.add_argument("--N", dest="n", type=int, required=True)
    _add_common(c)
    c = bos.add_parser("lattice", help="basis of A.x = 0 (mod d) plus "
                       "membership equivalence")
    c.add_argument("--coeffs", required=True, help="JSON list A")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--box", help="JSON [[lo,hi],...] to count points in")
    _add_common(c)

    sr = top.add_parser("shiftred", help="shift-reduced fractions and the "
                        "shifted totient")
    srs = sr.add_subparsers(dest="action", required=True)
    c = srs.add_parser("phi", help="CSV sweep of the shifted totient with "
                       "oracle cross-check")
    c.add_argument("--gamma", required=True)
    c.add_argument("--eta", required=True)
    c.add_argument("--nmax", type=int, required=True)
    _add_common(c)
    c = srs.add_parser("check", help="is (a, n) shift-reduced")
    c.add_argument("--gamma", required=True)
    c.add_argument("--eta", required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--a", type=int, required=True)
    _add_common(c)

    me = top.add_parser("measure", help="exact interval-set measures of "
                        "approximation sets")
    mes = me.add_subparsers(dest="action", required=True)
    c = mes.add_parser("approx", help="intervals and measure of one set")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--psi", required=True)
    c.add_argument("--gamma", default="0")
    c.add_argument("--hat", type=int)
    c.add_argument("--window", default='["0","1"]')
    c.add_argument("--filter-eta", dest="filter_eta",
                   help="enable the shift-reduced filter at this eta")
    _add_common(c)
    c = mes.add_parser("bcratio", help="overlap/divergence diagnostics on "
                       "the standard localized family")
    c.add_argument("--X", dest="x", type=int, required=True)
    c.add_argument("--eps0")
    c.add_argument("--eta")
    _add_common(c)

    su = top.add_parser("sums", help="log-averaged sums and solution "
                        "counters")
    sus = su.add_subparsers(dest="action", required=True)
    c = sus.add_parser("figure1", help="S(N) growth table, fit, gnuplot "
                       "script and rendered figure")
    c.add_argument("--H", dest="h", type=int, required=True)
    c.add_argument("--alphas")
    c.add_argument("--dense", action="store_true")
    _add_common(c)
    c = sus.add_parser("savg", help="S(N) in float or exact mode")
    c.add_argument("--N", dest="n", type=int, required=True)
    c.add_argument("--alphas", required=True)
    c.add_argument("--gammas")
    c.add_argument("--mode", choices=("float", "exact_spotcheck"),
                   default="float")
    _add_common(c)
    c = sus.add_parser("gallagher", help="per-grid-point counts of product "
                       "inequality solutions")
    c.add_argument("--N", dest="n", type=int, required=True)
    c.add_argument("--psi", default="divergent",
                   help='"divergent", "convergent", or a constant p/q')
    c.add_argument("--grid", type=int, default=512)
    _add_common(c)

    st = top.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("level", nargs="?", default="fast",
                    help="fast (< 1 min) or full (< 30 min)")
    _add_common(st)
    return ap


def _config_from_args(ns) -> RunConfig:
    d = vars(ns)
    command = d.pop("command")
    params = {k: v for k, v in d.items()
              if k not in ("out", "format", "budget", "seed", "threads")}
    return RunConfig(command, params,
                     out=d.get("out"), format=d.get("format", "csv"),
                     refinement_budget=d.get("budget"),
                     random_seed=d.get("seed", 0), threads=d.get("threads"))


def _error_json(kind, exc):
    payload = {"error": kind, "message": str(exc)}
    items = getattr(exc, "items", None)
    if items:
        payload["pending"] = _jsonable(list(items)[:32])
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        config = _config_from_args(ns)
        return dispatch(config)
    except ParameterError as e:
        _error_json("parameter", e)
        return 2
    except (UndecidableError, PrecisionError) as e:
        _error_json("undecidable", e)
        return 3


if __name__ == "__main__":
    sys.exit(main())
