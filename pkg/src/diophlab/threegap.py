"""Largest gap of the circle points {0, {alpha}, ..., {m alpha}, 1}.

The closed-form route decomposes m = r q_k + q_{k-1} + s and picks one of
four cases in |D_k|, |D_{k+1}|; the oracle route sorts the orbit outright.
Both express every gap as an integer linear form u*alpha + v.  For
irrational alpha two such forms are equal as reals iff they are equal as
integer pairs, so formula-vs-oracle agreement is decided by exact integer
comparison, with enclosures used only to order the points (any two distinct
points are separated by at least min_h ||h alpha||, so a finite width
certifies the sort).
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import Optional

from .contfrac import ContinuedFraction
from .numbers import (DepthError, ParameterError, PrecisionError,
                      RealEnclosure, RealSpec, UndecidableError,
                      dist_nearest_integer, refinement_budget)


# --------------------------------------------------------- linear form helpers
# a form (u, v) denotes the real number u*alpha + v

def form_enclosure(cf: ContinuedFraction, form, width) -> RealEnclosure:
    u, v = form
    if u == 0:
        return RealEnclosure.exact(Fraction(v))
    alpha = cf.enclose(Fraction(width) / abs(u))
    return alpha * u + v


def form_cmp(cf: ContinuedFraction, f1, f2, budget: Optional[int] = None) -> int:
    """Certified sign of (f1 - f2); 0 exactly when the integer pairs match
    (alpha irrational) or the exact values agree (alpha rational)."""
    du, dv = f1[0] - f2[0], f1[1] - f2[1]
    if du == 0:
        return -1 if dv < 0 else (1 if dv > 0 else 0)
    if cf.is_finite:
        val = du * cf.value() + dv
        return -1 if val < 0 else (1 if val > 0 else 0)
    if budget is None:
        budget = refinement_budget()
    width = Fraction(1, 10 ** 12)
    for _ in range(budget):
        e = form_enclosure(cf, (du, dv), width)
        if e.hi < 0:
            return -1
        if e.lo > 0:
            return 1
        width = width * width
    raise UndecidableError(f"sign of {du}*alpha + {dv} undecidable at budget")


# ------------------------------------------------------------- decomposition

class GapDecomposition:
    """m = r*q_k + q_{k-1} + s with 1 <= r <= a_{k+1}, 0 <= s <= q_k - 1."""

    __slots__ = ("m", "k", "r", "s")

    def __init__(self, m, k, r, s):
        self.m, self.k, self.r, self.s = m, k, r, s

    def __iter__(self):
        return iter((self.k, self.r, self.s))

    def __repr__(self):
        return f"GapDecomposition(m={self.m}, k={self.k}, r={self.r}, s={self.s})"


def gap_decomposition(m: int, cf: ContinuedFraction) -> GapDecomposition:
    """The unique (k, r, s).  The index k is determined by
    q_k + q_{k-1} <= m <= q_{k+1} + q_k - 1; these windows for k = 0, 1, ...
    partition the positive integers, so the scan below terminates."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    # the windows [q_k + q_{k-1}, q_{k+1} + q_k - 1] partition the positive
    # integers, so the scan stops at the unique k (or runs out of depth)
    k = 0
    while m > cf.q(k + 1) + cf.q(k) - 1:
        k += 1
    qk, q_prev = cf.q(k), cf.q(k - 1)
    r, s = divmod(m - q_prev, qk)
    a_next = cf.require_partial(k + 1)
    if not (1 <= r <= a_next and 0 <= s <= qk - 1):
        raise ParameterError(f"decomposition failed for m = {m}")
    assert r * qk + q_prev + s == m
    return GapDecomposition(m, k, r, s)


# ------------------------------------------------------------ formula route

def _d_form(cf: ContinuedFraction, j: int):
    """|D_j| as a form: D_j = q_j*alpha - p_j with sign (-1)^j."""
    qj, pj = cf.q(j), cf.p(j)
    if j % 2 == 0:
        return (qj, -pj)
    return (-qj, pj)


def largest_gap_form(m: int, cf: ContinuedFraction):
    """Exact integer form (u, v) of the largest gap, from the four-case
    split on the decomposition of m."""
    k, r, s = gap_decomposition(m, cf)
    a_next = cf.require_partial(k + 1)
    dk = _d_form(cf, k)
    dk1 = _d_form(cf, k + 1)

    def combine(c1, f1, c2, f2):
        return (c1 * f1[0] + c2 * f2[0], c1 * f1[1] + c2 * f2[1])

    if s == cf.q(k) - 1:
        if r == a_next:
            return dk
        return combine(1, dk1, a_next - r, dk)
    if r == a_next:
        return combine(1, dk1, 1, dk)
    return combine(1, dk1, a_next - r + 1, dk)


def largest_gap(m: int, cf: ContinuedFraction,
                width=Fraction(1, 10 ** 12)) -> RealEnclosure:
    """Enclosure of the largest gap between consecutive points of
    {0, {alpha}, ..., {m alpha}, 1}, by the closed-form case split."""
    if cf.is_finite:
        raise ParameterError("closed-form gap needs an irrational alpha; "
                             "use brute_gaps for rationals")
    return form_enclosure(cf, largest_gap_form(m, cf), width)


# ------------------------------------------------------------- oracle route

def _orbit_forms(m: int, cf: ContinuedFraction):
    """Forms (b, -floor(b*alpha)) of {b*alpha}, b = 1..m, certified-sorted
    by value.  Each point's integer part is pinned by refining until the
    enclosure of b*alpha contains no integer; distinct points separate by
    at least min_h ||h alpha|| > 0, which certifies the final sort order."""
    budget = refinement_budget()
    width = Fraction(1, 10 ** 12) / (m + 1)
    for _ in range(budget):
        alpha = cf.enclose(width)
        forms = []
        ok = True
        for b in range(1, m + 1):
            e = alpha * b
            fl = math.floor(e.lo)
            if math.floor(e.hi) != fl:
                ok = False  # integer part not pinned; refine
                break
            forms.append((b, -fl, e + (-fl)))
        if ok:
            forms.sort(key=lambda t: t[2].mid)
            separated = all(forms[i][2].hi < forms[i + 1][2].lo
                            for i in range(len(forms) - 1))
            if separated:
                return [(u, v) for (u, v, _) in forms]
        width = width * width
    raise PrecisionError(f"orbit points for m = {m} not separable at budget")


def brute_gap_forms(m: int, cf: ContinuedFraction):
    """All m+1 gap forms (including the two boundary gaps to 0 and 1),
    in circle order."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    pts = _orbit_forms(m, cf)
    gaps = [pts[0]]  # gap from 0 to the first point
    for left, right in zip(pts, pts[1:]):
        gaps.append((right[0] - left[0], right[1] - left[1]))
    last = pts[-1]
    gaps.append((-last[0], 1 - last[1]))  # gap from the last point to 1
    return gaps


def brute_gaps(m: int, cf_or_spec, width=Fraction(1, 10 ** 12)):
    """Sorted gap enclosures from the exhaustive sort of fractional parts.

    For rational alpha the fractional parts are exact and may collide;
    zero-length gaps are dropped (coincident points), so m >= denominator
    leaves exactly the 1/q gaps.
    """
    cf = cf_or_spec
    if isinstance(cf_or_spec, RealSpec):
        cf = ContinuedFraction.from_spec(cf_or_spec)
    if cf.is_finite:
        a = cf.value()
        pts = sorted({(b * a) - math.floor(b * a) for b in range(1, m + 1)})
        pts = [Fraction(0)] + [p for p in pts if p != 0] + [Fraction(1)]
        gaps = sorted(q - p for p, q in zip(pts, pts[1:]) if q != p)
        return [RealEnclosure.exact(g) for g in gaps]
    forms = brute_gap_forms(m, cf)
    encs = [form_enclosure(cf, f, width) for f in forms]
    return sorted(encs, key=lambda e: e.mid)


def distinct_gap_forms(m: int, cf: ContinuedFraction):
    """Deduplicated gap forms; the three-distance theorem says <= 3."""
    return sorted(set(brute_gap_forms(m, cf)))


def brute_largest_gap_form(m: int, cf: ContinuedFraction):
    forms = distinct_gap_forms(m, cf)
    best = forms[0]
    for f in forms[1:]:
        if form_cmp(cf, f, best) > 0:
            best = f
    return best


# ------------------------------------------------------------- small shifts

def sweep_largest_gap_agreement(cf: ContinuedFraction, m_max: int):
    """Formula-vs-oracle sweep: for every m <= m_max insert the m-th orbit
    point, maintain the multiset of gap forms incrementally, and compare the
    maximal gap against largest_gap_form by exact integer comparison.

    Returns {"mismatches": [m, ...], "max_distinct": int}; the second field
    records the largest number of simultaneously distinct gap lengths seen
    (the three-distance theorem says it never exceeds 3).
    """
    if cf.is_finite:
        raise ParameterError("sweep needs an irrational alpha")
    if m_max < 1:
        raise ParameterError("m_max must be >= 1")
    width = Fraction(1, 10 ** 15) / (m_max + 1)
    for _ in range(refinement_budget()):
        alpha = cf.enclose(width)
        amid = alpha.mid
        margin = 4 * (m_max + 1) * alpha.width  # > combined enclosure widths
        positions = [Fraction(0), Fraction(1)]
        forms = [(0, 0), (0, 1)]
        gap_count = {(0, 1): 1}
        mismatches = []
        max_distinct = 1
        ok = True
        for m in range(1, m_max + 1):
            e = alpha * m
            fl = math.floor(e.lo)
            if math.floor(e.hi) != fl:
                ok = False
                break
            pf = (m, -fl)
            pos = m * amid - fl
            i = bisect.bisect_left(positions, pos)
            if (pos - positions[i - 1] < margin
                    or positions[i] - pos < margin):
                ok = False  # too close to a neighbour to certify the sort
                break
            lf, rf = forms[i - 1], forms[i]
            old = (rf[0] - lf[0], rf[1] - lf[1])
            gap_count[old] -= 1
            if gap_count[old] == 0:
                del gap_count[old]
            for g in ((pf[0] - lf[0], pf[1] - lf[1]),
                      (rf[0] - pf[0], rf[1] - pf[1])):
                gap_count[g] = gap_count.get(g, 0) + 1
            positions.insert(i, pos)
            forms.insert(i, pf)
            max_distinct = max(max_distinct, len(gap_count))
            vals = sorted(((g[0] * amid + g[1], g) for g in gap_count),
                          reverse=True)
            if len(vals) > 1 and vals[0][0] - vals[1][0] < margin:
                ok = False  # top two gaps not separated at this width
                break
            if vals[0][1] != largest_gap_form(m, cf):
                mismatches.append(m)
        if ok:
            return {"mismatches": mismatches, "max_distinct": max_distinct}
        width = width * width
    raise PrecisionError(f"gap sweep to m = {m_max} not certifiable at budget")


def small_shift_brute(t: int, cf: ContinuedFraction, gamma: RealSpec) -> int:
    """Oracle: scan every b in [1, q_t] and return the first one whose
    distance certifies ||b alpha - gamma|| <= 2/q_t."""
    qt = cf.q(t)
    bound = Fraction(2, qt)
    width = Fraction(1, 10 ** 12)
    for _ in range(refinement_budget()):
        gamma_e = gamma.enclose(width)
        alpha_e = cf.enclose(width / (qt + 1))
        best_b, best_hi = None, None
        for b in range(1, qt + 1):
            d = dist_nearest_integer(alpha_e * b - gamma_e)
            if best_hi is None or d.hi < best_hi:
                best_b, best_hi = b, d.hi
        if best_hi <= bound:
            return best_b
        width = width * width
    raise PrecisionError(f"small shift at t = {t} not certified at budget")


def find_small_shift(t: int, cf: ContinuedFraction, gamma: RealSpec) -> int:
    """A positive integer b <= q_t with certified ||b alpha - gamma|| <= 2/q_t.

    Locates the fractional part of gamma between consecutive orbit points
    of {b alpha : b <= q_t} and tests the two neighbours; for m = q_t every
    gap is strictly below 2/q_t, so one neighbour always certifies.
    """
    qt = cf.q(t)
    bound = Fraction(2, qt)
    if cf.is_finite and gamma.is_rational():
        a, g = cf.value(), gamma.exact_value()
        best_b, best_d = None, None
        for b in range(1, qt + 1):
            x = b * a - g
            fx = x - math.floor(x)
            d = min(fx, 1 - fx)
            if best_d is None or d < best_d:
                best_b, best_d = b, d
        if best_d > bound:
            raise ParameterError(
                f"no b <= q_{t} = {qt} satisfies the 2/q_t bound for this input")
        return best_b
    if cf.is_finite:
        # rational alpha, irrational gamma: exact orbit, certified distance
        a = cf.value()
        budget = refinement_budget()
        width = Fraction(1, 10 ** 12)
        for _ in range(budget):
            ge = gamma.enclose(width)
            best_b, best_hi = None, None
            for b in range(1, qt + 1):
                d = dist_nearest_integer(RealEnclosure.exact(b * a) - ge)
                if best_hi is None or d.hi < best_hi:
                    best_b, best_hi = b, d.hi
            if best_hi <= bound:
                return best_b
            width = width * width
        raise PrecisionError(f"small shift at t = {t} not certified at budget")

    pts = _orbit_forms(qt, cf)
    budget = refinement_budget()
    width = Fraction(1, 10 ** 12) / (qt + 1)
    for _ in range(budget):
        alpha_e = cf.enclose(width)
        gamma_e = gamma.enclose(width)
        fl = math.floor(gamma_e.lo)
        if math.floor(gamma_e.hi) != fl:
            width = width * width
            continue  # fractional part of gamma not pinned yet
        gmid = gamma_e.mid - fl
        mids = [(alpha_e * u + v).mid for (u, v) in pts]
        pos = bisect.bisect_left(mids, gmid)
        candidates = []
        if pos < len(pts):
            candidates.append(pts[pos][0])
        if pos > 0:
            candidates.append(pts[pos - 1][0])
        candidates += [pts[0][0], pts[-1][0]]  # boundary gaps wrap to 0 / 1
        for b in candidates:
            d = dist_nearest_integer(alpha_e * b - gamma_e)
            if d.hi <= bound:
                return b
        width = width * width
    raise PrecisionError(f"small shift at t = {t} not certified at budget")
