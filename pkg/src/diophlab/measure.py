"""Exact interval-set engine: approximation sets around rational grid
points, their Lebesgue measures, pairwise-overlap sums, and local density.

All sets are finite unions of closed-open rational subintervals of [0, 1],
so every measure below is an exact Fraction.  Irrational shift or radius
data produce an inner/outer pair of sets whose measures bracket the truth.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .numbers import (ParameterError, RealEnclosure, RealSpec, as_real_spec,
                      dist_nearest_integer, paper_log_enclosure,
                      rational_power_enclosure, tree_sum)
from .shiftred import anchor_convergent, is_shift_reduced

ZERO = Fraction(0)
ONE = Fraction(1)


# ------------------------------------------------------------- IntervalSet

class IntervalSet:
    """Disjoint sorted closed-open intervals inside [0, 1]."""

    __slots__ = ("intervals", "_measure")

    def __init__(self, intervals=()):
        norm = []
        for lo, hi in sorted((Fraction(a), Fraction(b)) for a, b in intervals):
            if hi <= lo:
                continue
            if norm and lo <= norm[-1][1]:
                if hi > norm[-1][1]:
                    norm[-1] = (norm[-1][0], hi)
            else:
                norm.append((lo, hi))
        if norm and (norm[0][0] < 0 or norm[-1][1] > 1):
            raise ParameterError("interval set escapes [0, 1]")
        self.intervals = tuple(norm)
        self._measure = None

    @classmethod
    def _presorted(cls, intervals) -> "IntervalSet":
        """Trusted constructor: caller guarantees sorted, disjoint,
        nonempty-per-interval data inside [0, 1]."""
        s = cls.__new__(cls)
        s.intervals = tuple(intervals)
        s._measure = None
        return s

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    @staticmethod
    def full() -> "IntervalSet":
        return IntervalSet(((ZERO, ONE),))

    def measure(self) -> Fraction:
        if self._measure is None:
            self._measure = tree_sum(hi - lo for lo, hi in self.intervals) \
                if self.intervals else ZERO
        return self._measure

    def is_empty(self) -> bool:
        return not self.intervals

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        return f"IntervalSet({list(self.intervals)!r})"

    def contains_point(self, x) -> bool:
        x = Fraction(x)
        for lo, hi in self.intervals:
            if lo <= x < hi:
                return True
            if lo > x:
                break
        return False

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def complement(self) -> "IntervalSet":
        """[0, 1) minus self."""
        out = []
        cursor = ZERO
        for lo, hi in self.intervals:
            if cursor < lo:
                out.append((cursor, lo))
            cursor = max(cursor, hi)
        if cursor < 1:
            out.append((cursor, ONE))
        return IntervalSet(out)


def measure(s: IntervalSet) -> Fraction:
    return s.measure()


def union(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    return s.union(t)


def intersect(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    return s.intersect(t)


class IntervalSetBounds:
    """Inner/outer bracket pair for sets with irrational endpoint data."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower: IntervalSet, upper: IntervalSet):
        self.lower = lower
        self.upper = upper

    def measure(self) -> RealEnclosure:
        return RealEnclosure(self.lower.measure(), self.upper.measure())


# --------------------------------------------------------------- approx sets

_ENDPOINT_WIDTH = Fraction(1, 10 ** 30)
_SNAP_BITS = 120          # inexact endpoints land on this dyadic grid


class ApproxSetSpec:
    """Data for one approximation set: alpha in [0,1] such that some integer
    a has a + gamma in hat_n * window, |hat_n * alpha - gamma - a| < psi, and
    (a, hat_n) passes the optional shift-reduced filter."""

    __slots__ = ("n", "hat_n", "gamma", "psi", "window", "filter", "_built")

    def __init__(self, n: int, psi, gamma=0, hat_n=None, window=(0, 1),
                 filter=None):
        if n < 1:
            raise ParameterError("n must be >= 1")
        self.n = int(n)
        self.hat_n = int(hat_n) if hat_n is not None else self.n
        if self.hat_n < 1:
            raise ParameterError("hat_n must be >= 1")
        self.gamma = as_real_spec(gamma)
        if isinstance(psi, RealEnclosure):
            self.psi = psi
        else:
            self.psi = RealEnclosure.exact(Fraction(psi))
        if self.psi.lo < 0:
            raise ParameterError("psi must be >= 0")
        w_lo, w_hi = Fraction(window[0]), Fraction(window[1])
        if not (0 <= w_lo <= w_hi <= 1):
            raise ParameterError("window must be a subinterval of [0, 1]")
        self.window = (w_lo, w_hi)
        # filter: None or ("shift_reduced", gamma_spec_or_fraction, eta)
        if filter is not None:
            tag = filter[0]
            if tag != "shift_reduced":
                raise ParameterError(f"unknown filter {tag!r}")
        self.filter = filter

    def is_exact(self) -> bool:
        return self.gamma.is_rational() and self.psi.is_exact


def _clip_unit(lo: Fraction, hi: Fraction):
    lo = max(lo, ZERO)
    hi = min(hi, ONE)
    return (lo, hi) if lo < hi else None


def build_approx_set(spec: ApproxSetSpec):
    """Exact inputs give one IntervalSet; otherwise an IntervalSetBounds
    pair (inner set certainly contained, outer certainly containing).
    Results are cached on the spec, which is treated as immutable."""
    cached = getattr(spec, "_built", None)
    if cached is not None:
        return cached
    built = _build_approx_set(spec)
    spec._built = built
    return built


def _build_approx_set(spec: ApproxSetSpec):
    nh = spec.hat_n
    if spec.gamma.is_rational():
        g_lo = g_hi = spec.gamma.exact_value()
    else:
        genc = spec.gamma.enclose(_ENDPOINT_WIDTH)
        g_lo, g_hi = genc.lo, genc.hi
    p_lo, p_hi = spec.psi.lo, spec.psi.hi

    # admissible a: a + gamma in the closed box [nh*w_lo, nh*w_hi]; an a
    # straddling an uncertain endpoint joins the outer set only
    lo_a = nh * spec.window[0]
    hi_a = nh * spec.window[1]
    a_min_outer = math.ceil(lo_a - g_hi)
    a_min_inner = math.ceil(lo_a - g_lo)
    a_max_outer = math.floor(hi_a - g_lo)
    a_max_inner = math.floor(hi_a - g_hi)

    keep = None
    if spec.filter is not None:
        _, fg, feta = spec.filter
        anchor = anchor_convergent(fg, feta, nh)
        keep = lambda a: is_shift_reduced(a, nh, fg, feta, anchor=anchor)

    if spec.is_exact():
        outer = []
        for a in range(a_min_outer, a_max_outer + 1):
            if keep is not None and not keep(a):
                continue
            seg = _clip_unit(Fraction(a + g_lo - p_hi, nh),
                             Fraction(a + g_hi + p_hi, nh))
            if seg is not None:
                outer.append(seg)
        return IntervalSet(outer)

    # inexact inputs: work in integers on the 2**-_SNAP_BITS grid, outer
    # endpoints rounded outward and inner ones inward; 40 slack bits make
    # the directional rounding absorb the one-off scaling error, and the
    # grid shift per endpoint (< 2**-120) stays far inside the 10**-30
    # placement budget
    B = _SNAP_BITS
    K = B + 40
    scale_k = 1 << K
    den = nh << (K - B)
    unit = 1 << B
    u_out_lo = math.floor((g_lo - p_hi) * scale_k)
    u_out_hi = math.ceil((g_hi + p_hi) * scale_k)
    u_in_lo = math.ceil((g_hi - p_lo) * scale_k)
    u_in_hi = math.floor((g_lo + p_lo) * scale_k)
    inner_on = p_lo > 0
    inner, outer = [], []
    for a in range(a_min_outer, a_max_outer + 1):
        if keep is not None and not keep(a):
            continue
        base = a << K
        lo_n = (base + u_out_lo) // den
        hi_n = -((-(base + u_out_hi)) // den)
        if lo_n < 0:
            lo_n = 0
        if hi_n > unit:
            hi_n = unit
        if lo_n < hi_n:
            # lo_n is nondecreasing in a, so one merge check suffices
            if outer and lo_n <= outer[-1][1]:
                if hi_n > outer[-1][1]:
                    outer[-1][1] = hi_n
            else:
                outer.append([lo_n, hi_n])
        if inner_on and a_min_inner <= a <= a_max_inner:
            ilo = -((-(base + u_in_lo)) // den)
            ihi = (base + u_in_hi) // den
            if ilo < 0:
                ilo = 0
            if ihi > unit:
                ihi = unit
            if ilo < ihi:
                if inner and ilo <= inner[-1][1]:
                    if ihi > inner[-1][1]:
                        inner[-1][1] = ihi
                else:
                    inner.append([ilo, ihi])
    return IntervalSetBounds(
        IntervalSet._presorted((Fraction(lo, unit), Fraction(hi, unit))
                               for lo, hi in inner),
        IntervalSet._presorted((Fraction(lo, unit), Fraction(hi, unit))
                               for lo, hi in outer))


def _as_bounds(s) -> IntervalSetBounds:
    if isinstance(s, IntervalSet):
        return IntervalSetBounds(s, s)
    return s


# ---------------------------------------------------- localized spec builder

def localized_specs(pairs, psi_fn, eps0, gamma, eta, window, X: int,
                    hat=None):
    """Specs for n = 1..X of the scale-localised sweep.

    pairs: list of (alpha_spec, gamma_spec) side conditions; for each n the
    radius is psi(hat_n) / prod_i ||hat_n alpha_i - gamma_i||, and the set is
    empty unless every i has hat_n**(-4 eps0) <= ||hat_n alpha_i - gamma_i||
    <= hat_n**(-2 eps0) and psi(hat_n) >= 1/(n (log n)**(k+1)).  psi_fn(m)
    must return a nonnegative Fraction or RealEnclosure.
    """
    eps0 = Fraction(eps0)
    if not 0 < eps0 < Fraction(1, 2):
        raise ParameterError("eps0 must lie in (0, 1/2)")
    k = len(pairs) + 1
    f = hat if hat is not None else (lambda n: 0)
    specs = []
    pair_specs = [(as_real_spec(a), as_real_spec(g))
                  for a, g in pairs]
    for n in range(1, X + 1):
        nh = (4 ** f(n)) * n
        psi_val = psi_fn(nh)
        if not isinstance(psi_val, RealEnclosure):
            psi_val = RealEnclosure.exact(Fraction(psi_val))
        radius, member = _localized_radius(pair_specs, nh, eps0, psi_val, n, k)
        if not member:
            radius = RealEnclosure.exact(0)
        specs.append(ApproxSetSpec(
            n, radius, gamma=gamma, hat_n=nh, window=window,
            filter=("shift_reduced", gamma, eta)))
    return specs


def _dist_enclosure(aspec: RealSpec, gspec: RealSpec, m: int,
                    width: Fraction) -> RealEnclosure:
    return dist_nearest_integer(aspec.enclose(width / (m + 1)) * m
                                - gspec.enclose(width))


def _localized_radius(pair_specs, nh, eps0, psi_val, n, k):
    """(radius enclosure, membership) for one n; radius is
    psi / prod of distances when all window conditions hold."""
    # threshold psi(nh) >= 1/(n (log n)^{k+1}), paper-log convention
    thresh = (paper_log_enclosure(n) ** (k + 1) * n).reciprocal()
    cmp_psi = _enclosure_cmp(psi_val, thresh)
    if cmp_psi < 0:
        return None, False
    width = Fraction(1, 10 ** 12)
    for _ in range(40):
        lo_bound = rational_power_enclosure(nh, -4 * eps0, width)
        hi_bound = rational_power_enclosure(nh, -2 * eps0, width)
        dists = [_dist_enclosure(a, g, nh, width) for a, g in pair_specs]
        ok = True
        unsure = False
        for d in dists:
            if d.hi < lo_bound.lo or d.lo > hi_bound.hi:
                ok = False
                break
            if d.lo < lo_bound.hi or d.hi > hi_bound.lo:
                unsure = True
        if not ok:
            return None, False
        if not unsure:
            prod = dists[0]
            for d in dists[1:]:
                prod = prod * d
            return psi_val * prod.reciprocal(), True
        width = width * width
    raise ParameterError(
        f"membership window undecided at n = {n} within the width budget")


def _enclosure_cmp(x: RealEnclosure, y: RealEnclosure) -> int:
    if x.lo > y.hi:
        return 1
    if x.hi < y.lo:
        return -1
    if x.is_exact and y.is_exact and x.lo == y.lo:
        return 0
    raise ParameterError("enclosures overlap; comparison undecided")


# ----------------------------------------------------------- sweeps & sums

def measure_bound_check(spec: ApproxSetSpec) -> dict:
    """mu(E_n) <= 3 mu(window) psi, valid once hat_n * mu(window) >= 2
    (then the admissible-a count is at most 1.5 hat_n mu(window), and each
    interval has length at most 2 psi / hat_n)."""
    s = _as_bounds(build_approx_set(spec))
    mu_i = spec.window[1] - spec.window[0]
    applies = spec.hat_n * mu_i >= 2
    bound = 3 * mu_i * spec.psi.hi
    return {
        "measure": s.measure(),
        "bound": bound,
        "applies": applies,
        "ok": (s.measure().hi <= bound) if applies else None,
    }


def divergence_sum(specs, psi_fn, k: int = 1) -> dict:
    """{sum of mu(E_n), sum of mu(window) psi(hat_n) (log n)^{k-1}, ratio}.

    The left side is exact (an enclosure when any spec carries irrational
    data); the right side is an enclosure through the certified log."""
    mu_los, mu_his, rhs_los, rhs_his = [], [], [], []
    for spec in specs:
        s = _as_bounds(build_approx_set(spec))
        m = s.measure()
        mu_los.append(m.lo)
        mu_his.append(m.hi)
        mu_i = spec.window[1] - spec.window[0]
        psi_val = psi_fn(spec.hat_n)
        if not isinstance(psi_val, RealEnclosure):
            psi_val = RealEnclosure.exact(Fraction(psi_val))
        term = psi_val * (paper_log_enclosure(spec.n) ** (k - 1) * mu_i)
        rhs_los.append(term.lo)
        rhs_his.append(term.hi)
    lhs = RealEnclosure(tree_sum(mu_los), tree_sum(mu_his))
    rhs = RealEnclosure(tree_sum(rhs_los), tree_sum(rhs_his))
    if rhs.lo <= 0:
        raise ParameterError("right-hand side is not positive")
    return {"sum_measure": lhs, "sum_rhs": rhs,
            "ratio": lhs * rhs.reciprocal()}


def _overlap_integral(sets) -> Fraction:
    """sum over ordered pairs (m, n) of mu(E_n cap E_m), computed as the
    integral of c(x)^2 where c counts how many sets cover x."""
    events = []
    for s in sets:
        for lo, hi in s.intervals:
            events.append((lo, 1))
            events.append((hi, -1))
    # float first key is consistent with the exact order (rounding is
    # monotone); exact Fraction second key breaks float ties correctly
    events.sort(key=lambda e: (float(e[0]), e[0]))
    depth = 0
    prev = None
    pieces = []
    for x, delta in events:
        if prev is not None and depth and x != prev:
            pieces.append(depth * depth * (x - prev))
        prev = x
        depth += delta
    return tree_sum(pieces)


def overlap_matrix_sum(specs, X_budget: int = 3000) -> dict:
    """Quasi-independence diagnostic: the full pairwise overlap sum
    (diagonal included) and BC_ratio = (sum mu)^2 / overlap sum."""
    if len(specs) > X_budget:
        raise ParameterError("pair budget exceeded")
    bounds = [_as_bounds(build_approx_set(s)) for s in specs]
    sum_lo = tree_sum(b.measure().lo for b in bounds)
    sum_hi = tree_sum(b.measure().hi for b in bounds)
    over_lo = _overlap_integral([b.lower for b in bounds])
    over_hi = _overlap_integral([b.upper for b in bounds])
    if over_hi == 0:
        raise ParameterError("all sets empty; BC ratio undefined")
    ratio_lo = sum_lo ** 2 / over_hi
    ratio_hi = sum_hi ** 2 / over_lo if over_lo > 0 else None
    return {
        "sum_measure": RealEnclosure(sum_lo, sum_hi),
        "sum_overlap": RealEnclosure(over_lo, over_hi),
        "bc_ratio_lower": ratio_lo,
        "bc_ratio_upper": ratio_hi,
    }


def density_profile(s: IntervalSet, grid_size: int) -> Fraction:
    """Minimum of mu(S cap J)/mu(J) over the g equal cells J of [0, 1]."""
    if grid_size < 1:
        raise ParameterError("grid_size must be >= 1")
    g = grid_size
    best = None
    for i in range(g):
        cell = IntervalSet(((Fraction(i, g), Fraction(i + 1, g)),))
        d = s.intersect(cell).measure() * g
        best = d if best is None else min(best, d)
    return best
