"""Acceptance suite: eleven numbered checks shared by the selftest
subcommand and the test harness.

Each check sizes itself from the level.  "fast" trims scopes so the whole
run stays under a minute; "full" runs the stated scopes (a few minutes,
dominated by the lattice sweep) and re-derives the frozen fixtures from
their oracles.
"""

import json
import math
import random
import time
from fractions import Fraction
from importlib import resources

from .numbers import PrecisionError, as_real_spec
from .contfrac import ContinuedFraction, d_value
from .threegap import sweep_largest_gap_agreement
from .ostrowski import (DigitConstraintError, GammaDigits, certify_dandy_pair,
                        cylinder_elements, ostrowski_decode, ostrowski_encode,
                        sharpness_construct, sigma_sweep, validate_digits)
from .shiftred import anchor_convergent, is_shift_reduced, phi_sweep
from .bohr import (GAP, bohr_cardinality_check, count_divisible_in_gap,
                   enumerate_gap, lattice_basis, residue_equivalence_check)
from .measure import (IntervalSet, localized_specs, measure_bound_check,
                      overlap_matrix_sum)
from .sums import FIGURE1_ALPHAS, figure1, gallagher_counter, log_avg_sum


def _fixture(name):
    path = resources.files(__package__).joinpath("fixtures").joinpath(name)
    return json.loads(path.read_text())


def _report(name, passed, detail, t0):
    return {"name": name, "passed": bool(passed), "detail": detail,
            "elapsed": time.perf_counter() - t0}


# ------------------------------------------------------------ reference CFs

def _gap_cfs():
    """21 reference expansions: 2 named surds, 5 constant rules, 10 seeded
    bounded-quotient streams, 4 periodic tails."""
    rules = ["sqrt2", "golden"]
    rules += [f"const:0:{k}" for k in range(1, 6)]
    rules += [f"randcf:gapsweep{i}:6" for i in range(10)]
    rules += ["periodic:0:1,2", "periodic:0:2,1", "periodic:0:1,2,3",
              "periodic:0:3,1"]
    return [ContinuedFraction.from_rule(r) for r in rules]


def _law_cfs(count=50):
    rules = ["sqrt2", "golden"]
    rules += [f"const:0:{k}" for k in range(1, 6)]
    rules += ["periodic:0:1,2", "periodic:0:2,1", "periodic:0:1,2,3"]
    i = 0
    while len(rules) < count:
        rules.append(f"randcf:djlaw{i}:{1 + i % 9}")
        i += 1
    return [ContinuedFraction.from_rule(r) for r in rules[:count]]


# ------------------------------------------------------------- criterion 1

def criterion_1(level="full"):
    """Growth-constant reproduction and float-vs-exact agreement."""
    t0 = time.perf_counter()
    rep = figure1(10 ** 6)
    t_float = time.perf_counter() - t0
    c = rep["c"]
    ok_c = 1.717 <= c <= 1.752
    ok_t = t_float <= 60.0
    N = 10 ** 4 if level == "full" else 10 ** 3
    fl = log_avg_sum(N, FIGURE1_ALPHAS)
    ex = log_avg_sum(N, FIGURE1_ALPHAS, mode="exact_spotcheck")
    delta = abs(fl["value"] - ex["value"])
    ok_x = delta <= fl["error_bound"]
    detail = (f"c={c:.6f} in [1.717,1.752]:{ok_c}; float {t_float:.1f}s; "
              f"spotcheck N={N} |delta|={delta:.2e} <= {fl['error_bound']:.2e}"
              f":{ok_x}")
    return _report("1 figure-1 growth constant", ok_c and ok_t and ok_x,
                   detail, t0)


# ------------------------------------------------------------- criterion 2

def criterion_2(level="full"):
    """Largest-gap formula vs incremental exhaustive sweep, certified."""
    t0 = time.perf_counter()
    m_max = 300 if level == "full" else 80
    cfs = _gap_cfs() if level == "full" else _gap_cfs()[:6]
    bad = []
    max_distinct = 0
    for cf in cfs:
        rep = sweep_largest_gap_agreement(cf, m_max)
        if rep["mismatches"]:
            bad.append((cf.spec.rule_id, rep["mismatches"][:3]))
        max_distinct = max(max_distinct, rep["max_distinct"])
    elapsed = time.perf_counter() - t0
    ok = not bad and max_distinct <= 3 and elapsed <= 120.0
    detail = (f"{len(cfs)} cfs, m<={m_max}, mismatches={bad}, "
              f"max distinct gaps={max_distinct}, {elapsed:.1f}s<=120s")
    return _report("2 three-gap formula vs sweep", ok, detail, t0)


# ------------------------------------------------------------- criterion 3

def criterion_3(level="full"):
    """Signed-error law: sign alternation and 1/2 <= |D_j| q_{j+1} <= 1."""
    t0 = time.perf_counter()
    j_max = 25 if level == "full" else 12
    cfs = _law_cfs(50 if level == "full" else 12)
    bad = []
    for cf in cfs:
        for j in range(j_max + 1):
            try:
                dv = d_value(cf, j, certify=True)
            except PrecisionError as e:
                bad.append((cf.spec.rule_id, j, str(e)))
                break
            if dv.sign != (1 if j % 2 == 0 else -1):
                bad.append((cf.spec.rule_id, j, "sign"))
                break
    ok = not bad
    detail = (f"{len(cfs)} cfs, j<={j_max}, certified; "
              f"failures={bad[:3] if bad else 'none'}")
    return _report("3 signed-error law certified", ok, detail, t0)


# ------------------------------------------------------------- criterion 4

_CYLINDERS = [
    ("sqrt2", (1,)), ("sqrt2", (1, 0)), ("sqrt2", (0, 2)),
    ("sqrt2", (0, 0, 2)),
    ("golden", (0, 1)), ("golden", (0, 1, 0)), ("golden", (0, 0, 1)),
    ("const:0:3", (1,)), ("const:0:3", (2, 0)), ("const:0:3", (0, 3)),
    ("const:0:3", (1, 1)), ("const:0:5", (3, 0)),
]


def _prefix_matches(cf, n, prefix):
    d = ostrowski_encode(n, cf).digits
    padded = d + (0,) * (len(prefix) - len(d))
    return padded[:len(prefix)] == tuple(prefix)


def _cylinder_gaps_ok(cf, prefix, elems):
    """The enumerated spacing pattern: last fixed digit > 0 forces every
    gap >= q_{m+1}; last fixed digit = 0 forces gaps in {q_m, q_{m+1}}
    with complete runs of q_{m+1}-gaps between q_m-gaps of length
    a_{m+2} or a_{m+2}+1 (the +1 at higher-order digit carries)."""
    m1 = len(prefix)
    q_hi, q_lo = cf.q(m1), cf.q(m1 - 1)
    a_next2 = cf.require_partial(m1 + 1)
    diffs = [b - a for a, b in zip(elems, elems[1:])]
    if prefix[-1] > 0:
        return all(d >= q_hi for d in diffs)
    runs, cur = [], 0
    for d in diffs:
        if d == q_hi:
            cur += 1
        elif d == q_lo:
            runs.append(cur)
            cur = 0
        else:
            return False
    # the trailing window-truncated run carries no constraint
    return all(r in (a_next2, a_next2 + 1) for r in runs)


def criterion_4(level="full"):
    """Digit roundtrip, cylinder spacing law, and validator rejection."""
    t0 = time.perf_counter()
    n_max = 10 ** 5 if level == "full" else 10 ** 4
    cfs = [ContinuedFraction.from_rule(r)
           for r in ("sqrt2", "golden", "const:0:3")]
    bad = []
    for cf in cfs:
        for n in range(1, n_max + 1):
            if ostrowski_decode(ostrowski_encode(n, cf)) != n:
                bad.append(("roundtrip", cf.spec.rule_id, n))
                break

    count = 150 if level == "full" else 60
    for rule, prefix in _CYLINDERS:
        cf = ContinuedFraction.from_rule(rule)
        elems = cylinder_elements(prefix, cf, count)
        if not _cylinder_gaps_ok(cf, prefix, elems):
            bad.append(("gaps", rule, prefix))
        # exhaustive scan oracle over the enumerated span
        scan = [n for n in range(1, elems[-1] + 1)
                if _prefix_matches(cf, n, prefix)]
        if scan != elems:
            bad.append(("scan", rule, prefix))

    trials = 10 ** 4 if level == "full" else 10 ** 3
    rng = random.Random(40404)
    rejected = 0
    for t in range(trials):
        cf = cfs[t % 3]
        length = rng.randint(1, 12)
        digits = []
        for i in range(1, length + 1):
            a = cf.require_partial(i)
            hi = a - 1 if i == 1 else a
            c = rng.randint(0, hi)
            if i > 1 and c == a and digits[-1] != 0:
                c -= 1
            digits.append(c)
        mode = rng.randrange(3) if length > 1 else rng.randrange(2)
        if mode == 0:
            digits[0] = cf.require_partial(1) + rng.randint(0, 3)
        elif mode == 1:
            j = rng.randrange(length)
            digits[j] = cf.require_partial(j + 1) + 1 + rng.randint(0, 3)
        else:
            j = rng.randrange(1, length)
            digits[j] = cf.require_partial(j + 1)
            digits[j - 1] = max(1, digits[j - 1])
        try:
            validate_digits(cf, digits)
        except DigitConstraintError:
            rejected += 1
    if rejected != trials:
        bad.append(("validator", trials - rejected, "accepted"))

    ok = not bad
    detail = (f"roundtrip n<={n_max} x3 cfs; {len(_CYLINDERS)} cylinders "
              f"(pattern+scan); {rejected}/{trials} invalid strings rejected; "
              f"failures={bad[:3] if bad else 'none'}")
    return _report("4 digit expansion roundtrip/gaps", ok, detail, t0)


# ------------------------------------------------------------- criterion 5

def criterion_5(level="full"):
    """Zero-shift coprimality and the shifted-totient closed form."""
    t0 = time.perf_counter()
    n_cop = 2000 if level == "full" else 300
    bad = []
    eta = Fraction(1, 2)
    for n in range(1, n_cop + 1):
        anc = anchor_convergent(0, eta, n)
        for a in range(1, n + 1):
            if is_shift_reduced(a, n, 0, eta, anchor=anc) != (
                    math.gcd(a, n) == 1):
                bad.append(("coprime", a, n))
                break
        if bad:
            break

    n_max = 5000 if level == "full" else 800
    gammas = [("22/7", Fraction(22, 7)), ("sqrt2", as_real_spec("sqrt2")),
              ("golden", as_real_spec("golden"))]
    etas = [Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)]
    if level != "full":
        gammas, etas = gammas[:1], etas[:2]
    checked = 0
    for g_name, g in gammas:
        for eta in etas:
            # phi_sweep raises if enumeration and closed form ever disagree
            rows = phi_sweep(g, eta, n_max)
            checked += len(rows)
            low = [r for r in rows if r[2] < r[1]]
            if low:
                bad.append(("phi>=totient", g_name, str(eta), low[:2]))
    ok = not bad
    detail = (f"coprimality n<={n_cop}; closed form vs enumeration on "
              f"{checked} rows (n<={n_max}); "
              f"failures={bad[:2] if bad else 'none'}")
    return _report("5 shift-reduced totient", ok, detail, t0)


# ------------------------------------------------------------- criterion 6

def criterion_6(level="full"):
    """Congruence-lattice basis: determinant and membership equivalence."""
    t0 = time.perf_counter()
    if level == "full":
        ks, ds, per_cell = range(1, 5), range(1, 51), 100
    else:
        ks, ds, per_cell = range(1, 4), range(1, 21), 10
    rng = random.Random(60606)
    bad = []
    tested = 0
    for k in ks:
        for d in ds:
            for _ in range(per_cell):
                while True:
                    A = tuple(rng.randint(1, 4 * d) for _ in range(k))
                    if math.gcd(*A, d) == 1:
                        break
                lat = lattice_basis(A, d)
                tested += 1
                if abs(lat.det) != d:
                    bad.append(("det", A, d, lat.det))
                elif not residue_equivalence_check(lat):
                    bad.append(("member", A, d))
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    # literal signed-box oracle on a small corner
    for A, d in (((3,), 7), ((2, 5), 9), ((3, 4), 10), ((1, 2, 3), 6)):
        lat = lattice_basis(A, d)
        k = len(A)
        pts = [[v] for v in range(-d, d + 1)]
        for _ in range(k - 1):
            pts = [p + [v] for p in pts for v in range(-d, d + 1)]
        if any(lat.congruence_member(p) != lat.basis_member(p) for p in pts):
            bad.append(("literal", A, d))
    ok = not bad
    detail = (f"{tested} random (A,d) cells, k<={max(ks)}, d<={max(ds)}; "
              f"failures={bad[:2] if bad else 'none'}")
    return _report("6 congruence lattice basis", ok, detail, t0)


# ------------------------------------------------------------- criterion 7

def criterion_7(level="full"):
    """Divisibility counts in proper progressions against the defect bound."""
    t0 = time.perf_counter()
    count = 200 if level == "full" else 40
    rng = random.Random(70707)
    bad = []
    built = 0
    while built < count:
        k = rng.randint(1, 3)
        N = tuple(rng.randint(2, 50) for _ in range(k))
        while True:
            A = tuple(rng.randint(1, 10 ** 5) for _ in range(k))
            if math.gcd(*A) == 1:
                break
        g = GAP(rng.randint(0, 10 ** 6), A, N)
        if not enumerate_gap(g).proper:
            continue
        built += 1
        d = rng.randint(1, 100)
        rep = count_divisible_in_gap(g, d)
        if not rep["within_bound"]:
            bad.append((A, N, d, rep["defect"], rep["bound"]))
    ok = not bad
    detail = (f"{built} proper progressions, k<=3, N_i<=50, d<=100; "
              f"violations={bad[:2] if bad else 'none'}")
    return _report("7 progression divisibility bound", ok, detail, t0)


# ------------------------------------------------------------- criterion 8

def criterion_8(level="full"):
    """Rank-1 Bohr set cardinality against the two-sided lemma bounds."""
    t0 = time.perf_counter()
    alpha = as_real_spec("sqrt2")
    Ns = (10 ** 3, 10 ** 4) if level == "full" else (10 ** 3,)
    deltas = (Fraction(1, 50), Fraction(1, 200), Fraction(1, 800))
    bad = []
    certified = 0
    for N in Ns:
        for delta in deltas:
            rep = bohr_cardinality_check(alpha, delta, N)
            if rep["hypothesis_met"]:
                certified += 1
                if not rep["bounds_hold"]:
                    bad.append((N, str(delta), rep["count"]))
    ok = not bad and certified > 0
    detail = (f"{certified} certified (N,delta) cells of "
              f"{len(Ns) * len(deltas)}; failures={bad if bad else 'none'}")
    return _report("8 Bohr cardinality bounds", ok, detail, t0)


# ------------------------------------------------------------- criterion 9

def _rapid_pairs():
    c64 = ContinuedFraction.from_rule("const:0:64")
    c100 = ContinuedFraction.from_rule("const:0:100")
    return [
        ("const64/half", (c64, GammaDigits(c64, (), "half"))),
        ("const64/quarter", (c64, GammaDigits(c64, (), "quarter"))),
        ("const100/sigma01", (c100, GammaDigits(c100, (), "sigma:01"))),
        ("relaxed/0", sharpness_construct("0", "relaxed", 3)),
        ("hybrid/10", sharpness_construct("10", "hybrid", 3)),
    ]


def criterion_9(level="full"):
    """Rapid pairs: certified ranges and digit-route vs direct distance."""
    t0 = time.perf_counter()
    width = Fraction(1, 10 ** 30)
    pairs = _rapid_pairs()
    n_max = 10 ** 4 if level == "full" else 500
    if level != "full":
        pairs = pairs[:2]
    bad = []
    for name, pair in pairs:
        try:
            a_enc, g_enc = certify_dandy_pair(*pair)
        except PrecisionError as e:
            bad.append((name, "certify", str(e)))
            continue
        for s in sigma_sweep(pair, n_max):
            if s.dist.width > width or s.direct.width > width:
                bad.append((name, s.n, "width"))
                break
            if max(s.dist.lo, s.direct.lo) > min(s.dist.hi, s.direct.hi):
                bad.append((name, s.n, "disjoint"))
                break
    ok = not bad
    detail = (f"{len(pairs)} pairs certified, routes agree to width<=1e-30 "
              f"for n<={n_max}; failures={bad[:2] if bad else 'none'}")
    return _report("9 rapid pair distance routes", ok, detail, t0)


# ------------------------------------------------------------ criterion 10

def _bc_psi(m):
    from .numbers import paper_log_enclosure
    pl = paper_log_enclosure(m)
    return (pl * pl * (4 * m)).reciprocal()


def _bc_family(X):
    return localized_specs(pairs=[(as_real_spec("sqrt2"), Fraction(0))],
                           psi_fn=_bc_psi, eps0=Fraction(3, 40),
                           gamma=Fraction(0), eta=Fraction(1, 2),
                           window=(Fraction(0), Fraction(1)), X=X)


def _rand_interval_set(rng):
    j = rng.randint(0, 5)
    den = rng.choice((16, 64, 256, 997, 1000))
    if 2 * j > den:
        j = 0
    cuts = sorted(rng.sample(range(den + 1), 2 * j))
    return IntervalSet([(Fraction(cuts[2 * i], den),
                         Fraction(cuts[2 * i + 1], den)) for i in range(j)])


def criterion_10(level="full"):
    """Measure engine: modularity, the 3-mu(I)-psi bound, and the stored
    overlap-ratio reference."""
    t0 = time.perf_counter()
    pairs = 10 ** 3 if level == "full" else 100
    rng = random.Random(101010)
    bad = []
    for _ in range(pairs):
        s, t = _rand_interval_set(rng), _rand_interval_set(rng)
        lhs = s.union(t).measure() + s.intersect(t).measure()
        if lhs != s.measure() + t.measure():
            bad.append(("modularity", s.intervals, t.intervals))
            break

    X = 2000 if level == "full" else 200
    specs = _bc_family(X)
    applied = 0
    for spec in specs:
        rep = measure_bound_check(spec)
        if rep["applies"]:
            applied += 1
            if rep["ok"] is False:
                bad.append(("bound", spec.n))
                break
    over = overlap_matrix_sum(specs)
    ref = _fixture("bc_ratio.json")[str(X)]
    ref_lo = Fraction(ref["bc_ratio_lower"])
    ref_hi = Fraction(ref["bc_ratio_upper"])
    got_lo, got_hi = over["bc_ratio_lower"], over["bc_ratio_upper"]
    if not (abs(got_lo - ref_lo) <= ref_lo / 10
            and abs(got_hi - ref_hi) <= ref_hi / 10):
        bad.append(("bc_ratio", float(got_lo), float(ref_lo)))
    ok = not bad
    detail = (f"modularity on {pairs} pairs; psi-bound on {applied} specs; "
              f"overlap ratio [{float(got_lo):.6f},{float(got_hi):.6f}] vs "
              f"stored [{float(ref_lo):.6f},{float(ref_hi):.6f}] "
              f"(X={X}); failures={bad[:1] if bad else 'none'}")
    return _report("10 measure engine + overlap ratio", ok, detail, t0)


# ------------------------------------------------------------ criterion 11

def criterion_11(level="full"):
    """Divergent-vs-convergent contrast and counter monotonicity, against
    the stored reference run."""
    t0 = time.perf_counter()
    fx = _fixture("gallagher.json")
    N = fx["N"]
    grid = [Fraction(2 * m + 1, fx["grid_den"])
            for m in range(fx["grid_count"])]
    psi_div = lambda n: Fraction(1, 4 * n)
    psi_conv = lambda n: Fraction(1, n * n)
    div = gallagher_counter([], [Fraction(0)], psi_div, grid, N)
    conv = gallagher_counter([], [Fraction(0)], psi_conv, grid, N)
    bad = []
    if div["undecided"] or conv["undecided"]:
        bad.append(("undecided", len(div["undecided"]),
                    len(conv["undecided"])))
    exceed = sum(1 for a, b in zip(div["counts"], conv["counts"]) if a > b)
    frac = exceed / len(grid)
    if frac < 0.95:
        bad.append(("contrast", frac))
    if div["counts"] != fx["divergent"]["counts"]:
        bad.append(("reference divergent",))
    if conv["counts"] != fx["convergent"]["counts"]:
        bad.append(("reference convergent",))
    # monotonicity: counts grow with N, threshold fractions shrink
    half = gallagher_counter([], [Fraction(0)], psi_div, grid, N // 10)
    if any(h > f for h, f in zip(half["counts"], div["counts"])):
        bad.append(("monotone in N",))
    for rep in (div, conv):
        fr = [rep["summary"][t] for t in sorted(rep["summary"])]
        if fr != sorted(fr, reverse=True):
            bad.append(("monotone in threshold",))
    ok = not bad
    detail = (f"divergent beats convergent on {exceed}/{len(grid)} grid "
              f"points ({100 * frac:.1f}%>=95%) at N={N}; reference match; "
              f"failures={bad[:2] if bad else 'none'}")
    return _report("11 counter contrast fixture", ok, detail, t0)


# ------------------------------------------------------------------ runner

CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
            criterion_11)


def run(level="fast"):
    """All eleven reports, in order."""
    return [c(level) for c in CRITERIA]
