"""Scalar experiment layer: approximation functions, log-averaged sums
S(N) = sum 1/(n prod_i ||n alpha_i - gamma_i||), the H = 10^6 figure
reproduction, grid solution counters, and dyadic-truncation ratio checks.

Float mode carries a rigorous accumulated error bound next to each value;
exact mode reruns the same recursion in integer arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .numbers import (ParameterError, PrecisionError, RealEnclosure,
                      RealSpec, as_real_spec, paper_log_enclosure,
                      refinement_budget, dist_nearest_integer)

_U = 2.0 ** -53          # relative rounding error unit, IEEE-754 binary64
_DYADIC_BITS = 70        # resolution for irrational inputs in float mode

INFINITE = float("inf")


def paper_log(x) -> float:
    """max(ln x, 1); the all-logs-positive convention used in every sum."""
    if x <= 0:
        raise ParameterError("paper_log needs x > 0")
    return max(math.log(x), 1.0)


# --------------------------------------------------------- approx functions

class ApproxFunction:
    """A nonnegative arithmetic function with a named evaluation rule.

    kinds: "constant" (value c), "callable" (arbitrary rational rule),
    "recip_log_sq_xi" (1/(n max(ln n,1)^2 xi(n)), enclosure-valued).
    """

    __slots__ = ("kind", "data", "monotone", "label")

    def __init__(self, kind, data, monotone=False, label=""):
        if kind not in ("constant", "callable", "recip_log_sq_xi"):
            raise ParameterError(f"unknown approx-function kind {kind!r}")
        self.kind = kind
        self.data = data
        self.monotone = monotone
        self.label = label or kind

    @classmethod
    def constant(cls, c, label="const"):
        c = Fraction(c)
        if c < 0:
            raise ParameterError("approximation functions are nonnegative")
        return cls("constant", c, monotone=True, label=label)

    @classmethod
    def from_callable(cls, fn, monotone=False, label="callable"):
        return cls("callable", fn, monotone=monotone, label=label)

    @classmethod
    def reciprocal_log_square(cls, xi, label="recip_log_sq_xi"):
        """psi(n) = 1/(n max(ln n, 1)^2 xi(n)); xi rational, >= 1,
        non-decreasing (checked lazily at evaluation sites)."""
        return cls("recip_log_sq_xi", xi, monotone=True, label=label)

    def value(self, n: int):
        """Fraction for the rational kinds, RealEnclosure for log kinds."""
        if n < 1:
            raise ParameterError("n must be >= 1")
        if self.kind == "constant":
            return self.data
        if self.kind == "callable":
            v = Fraction(self.data(n))
            if v < 0:
                raise ParameterError(f"negative value at n = {n}")
            return v
        xi_n = Fraction(self.data(n))
        if xi_n < 1:
            raise ParameterError(f"xi({n}) = {xi_n} < 1")
        return (paper_log_enclosure(n) ** 2 * (n * xi_n)).reciprocal()

    def value_hi(self, n: int) -> Fraction:
        v = self.value(n)
        return v.hi if isinstance(v, RealEnclosure) else v

    def validate_monotone(self, lo: int, hi: int):
        """Confirms non-increase over every integer in [lo, hi]."""
        if hi - lo > 10 ** 6:
            raise ParameterError("monotonicity scan budget exceeded")
        prev = None
        for n in range(lo, hi + 1):
            v = self.value(n)
            v_lo, v_hi = (v.lo, v.hi) if isinstance(v, RealEnclosure) else (v, v)
            if prev is not None and v_lo > prev:
                raise ParameterError(f"not non-increasing at n = {n}")
            prev = v_hi
        return True


# ------------------------------------------------------------------ phi_big

_as_spec = as_real_spec


def phi_big(n: int, alphas, gammas, psi) -> object:
    """Enclosure of psi(n) / prod_i ||n alpha_i - gamma_i||.

    Returns the float +inf sentinel when some distance is exactly zero
    (possible only for aligned rational data)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if len(alphas) != len(gammas) or not alphas:
        raise ParameterError("alphas/gammas must be equal-length, nonempty")
    if isinstance(psi, ApproxFunction):
        psi_n = psi.value(n)
    elif callable(psi):
        psi_n = Fraction(psi(n))
    else:
        psi_n = Fraction(psi)
    if not isinstance(psi_n, RealEnclosure):
        psi_n = RealEnclosure.exact(psi_n)
    specs = [(_as_spec(a), _as_spec(g)) for a, g in zip(alphas, gammas)]
    prod = RealEnclosure.exact(1)
    width = Fraction(1, 10 ** 12)
    for a, g in specs:
        if a.is_rational() and g.is_rational():
            x = n * a.exact_value() - g.exact_value()
            fx = x - math.floor(x)
            d = RealEnclosure.exact(min(fx, 1 - fx))
            if d.lo == 0:
                return INFINITE
            prod = prod * d
            continue
        for _ in range(refinement_budget()):
            d = dist_nearest_integer(a.enclose(width / (n + 1)) * n
                                     - g.enclose(width))
            if d.lo > 0:
                break
            width = width * width
        else:
            raise PrecisionError("distance enclosure stuck at 0")
        prod = prod * d
    return psi_n * prod.reciprocal()


# ------------------------------------------------------------- log-avg sums

def _dyadic_form(spec: RealSpec):
    """(num, den, width): |value - num/den| <= width, den a power of two
    for irrational inputs, exact (width 0) for rationals."""
    if spec.is_rational():
        v = spec.exact_value()
        return v.numerator, v.denominator, Fraction(0)
    enc = spec.enclose(Fraction(1, 2 ** _DYADIC_BITS))
    num = round(enc.mid * 2 ** _DYADIC_BITS)
    return num, 2 ** _DYADIC_BITS, Fraction(1, 2 ** (_DYADIC_BITS - 1))


class _ResidueWalk:
    """Exact residues r_n = (n*num - g_num*den/g_den ... ) without
    rebuilding products: r walks by +num (mod M) each step, where the
    modulus M folds the shift's denominator in."""

    __slots__ = ("M", "step", "r", "width")

    def __init__(self, num, den, g: Fraction, width):
        self.M = den * g.denominator
        self.step = num * g.denominator
        # r_0 for n = 0: value -gamma scaled by M
        self.r = (-g.numerator * den) % self.M
        self.step %= self.M
        self.width = width

    def advance(self):
        """Move n -> n+1; returns the scaled distance numerator
        min(r, M - r) for the new n."""
        self.r += self.step
        if self.r >= self.M:
            self.r -= self.M
        return self.r if 2 * self.r <= self.M else self.M - self.r


def log_avg_sum(N: int, alphas, gammas=None, mode="float"):
    """S(N) = sum_{n <= N} 1 / (n prod_i ||n alpha_i - gamma_i||).

    float mode: {"value", "error_bound", "zero_at"} — value +inf with the
    first offending n when a distance is exactly 0; the error bound is a
    rigorous envelope for rounding plus (for irrational inputs) the dyadic
    approximation of the inputs.
    exact mode ("exact_spotcheck"): {"num", "den", "value"} with the sum as
    an unreduced integer pair; requires rational inputs.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    if not alphas:
        raise ParameterError("need at least one alpha")
    if gammas is None:
        gammas = [0] * len(alphas)
    if len(gammas) != len(alphas):
        raise ParameterError("alphas/gammas length mismatch")
    specs = [_as_spec(a) for a in alphas]
    g_fracs = []
    for g in gammas:
        gs = _as_spec(g)
        if not gs.is_rational():
            raise ParameterError("gamma must be rational in the sum modes")
        g_fracs.append(gs.exact_value())

    if mode == "float":
        return _log_avg_float(N, specs, g_fracs)
    if mode == "exact_spotcheck":
        return _log_avg_exact(N, specs, g_fracs)
    raise ParameterError(f"unknown mode {mode!r}")


def _walks(specs, g_fracs):
    walks = []
    for spec, g in zip(specs, g_fracs):
        num, den, width = _dyadic_form(spec)
        walks.append(_ResidueWalk(num, den, g, width))
    return walks


def _log_avg_float(N, specs, g_fracs):
    walks = _walks(specs, g_fracs)
    m_float = [float(w.M) for w in walks]
    s = 0.0
    err = 0.0
    rounds = 2.0 + 4.0 * len(walks)
    for n in range(1, N + 1):
        term = 1.0 / n
        input_rel = 0.0
        for w, mf in zip(walks, m_float):
            dn = w.advance()
            if dn == 0:
                if w.width == 0:
                    return {"value": INFINITE, "error_bound": INFINITE,
                            "zero_at": n}
                raise PrecisionError(
                    f"distance at n = {n} below the dyadic resolution")
            term *= mf / float(dn)
            if w.width:
                rel = float(n * w.width * w.M) / float(dn)
                if rel >= 0.5:
                    raise PrecisionError(
                        f"distance at n = {n} below the dyadic resolution")
                input_rel += 2.0 * rel
        s += term
        err += term * (rounds * _U + input_rel) + _U * abs(s)
    return {"value": s, "error_bound": err * (1.0 + 1e-9), "zero_at": None}


def _pair_tree_sum(pairs):
    """Sum of (num, den) integer pairs without gcd reduction."""
    if not pairs:
        return (0, 1)
    while len(pairs) > 1:
        nxt = [(pairs[i][0] * pairs[i + 1][1] + pairs[i + 1][0] * pairs[i][1],
                pairs[i][1] * pairs[i + 1][1])
               for i in range(0, len(pairs) - 1, 2)]
        if len(pairs) % 2:
            nxt.append(pairs[-1])
        pairs = nxt
    return pairs[0]


def pair_to_float(num: int, den: int) -> float:
    """num/den as a float without reducing the pair (den can be huge)."""
    if num == 0:
        return 0.0
    mag = math.ldexp(float((abs(num) << 64) // den), -64)
    return -mag if num < 0 else mag


def _log_avg_exact(N, specs, g_fracs):
    for spec in specs:
        if not spec.is_rational():
            raise ParameterError("exact mode needs rational alphas")
    walks = _walks(specs, g_fracs)
    m_prod = math.prod(w.M for w in walks)
    pairs = []
    for n in range(1, N + 1):
        den = n
        for w in walks:
            dn = w.advance()
            if dn == 0:
                return {"num": None, "den": None, "value": INFINITE,
                        "zero_at": n}
            den *= dn
        pairs.append((m_prod, den))
    num, den = _pair_tree_sum(pairs)
    return {"num": num, "den": den, "value": pair_to_float(num, den),
            "zero_at": None}


# ------------------------------------------------------------------ figure 1

FIGURE1_ALPHAS = (Fraction(957363115715396, 10 ** 15),
                  Fraction(3049448415027476, 10 ** 16))


def _sample_points(H: int, dense: bool):
    if dense or H <= 4096:
        return list(range(2, H + 1))
    pts = set(range(2, 1025))
    x = 1024.0
    while x < H:
        x *= 2 ** 0.125
        pts.add(min(H, int(round(x))))
    pts.add(H)
    return sorted(pts)


def figure1(H: int, alphas=FIGURE1_ALPHAS, gammas=None, dense=False):
    """S(N) against c * max(ln N, 1)^k, c = S(H)/max(ln H, 1)^k with
    k = #alphas + 1.  Returns sampled rows (N, S(N), fit) plus c; row
    sampling is logarithmic unless dense is set."""
    if not 1 <= H <= 10 ** 7:
        raise ParameterError("H out of range (1..10^7)")
    if gammas is None:
        gammas = [0] * len(alphas)
    specs = [_as_spec(a) for a in alphas]
    if any(not sp.is_rational() for sp in specs):
        raise ParameterError("figure sweeps need rational alphas")
    g_fracs = [Fraction(g) for g in gammas]
    k_exp = len(specs) + 1
    walks = _walks(specs, g_fracs)
    m_float = [float(w.M) for w in walks]
    samples = _sample_points(H, dense) if H >= 2 else [1]
    sample_iter = iter(samples)
    next_sample = next(sample_iter, None)
    s = 0.0
    err = 0.0
    rounds = 2.0 + 4.0 * len(walks)
    s_at = []
    for n in range(1, H + 1):
        term = 1.0 / n
        for w, mf in zip(walks, m_float):
            dn = w.advance()
            if dn == 0:
                raise ParameterError(
                    f"distance is exactly 0 at n = {n}; S diverges")
            term *= mf / float(dn)
        s += term
        err += term * rounds * _U + _U * s
        while next_sample is not None and n == next_sample:
            s_at.append((n, s))
            next_sample = next(sample_iter, None)
    c = s / paper_log(H) ** k_exp
    rows = [(n, sn, c * paper_log(n) ** k_exp) for n, sn in s_at]
    return {"H": H, "c": c, "S_H": s, "error_bound": err * (1.0 + 1e-9),
            "k_exponent": k_exp, "rows": rows}


# ---------------------------------------------------------- solution counts

def gallagher_counter(fixed_alphas, gammas, psi, alpha_grid, N: int,
                      thresholds=(1, 5, 25)):
    """Per-grid-point counts of n <= N with
    prod_i ||n alpha_i - gamma_i|| * ||n a - gamma_last|| < psi(n),
    where a runs over the rational grid.  Rational data (and rational psi
    values) are decided exactly; irrational data go through enclosures and
    any (grid index, n) left undecided at the budget is reported."""
    if N < 1:
        raise ParameterError("N must be >= 1")
    if len(gammas) != len(fixed_alphas) + 1:
        raise ParameterError("need one gamma per fixed alpha plus the grid axis")
    grid = [Fraction(a) for a in alpha_grid]
    if not grid:
        raise ParameterError("empty grid")
    g_last = Fraction(gammas[-1])
    fixed = [(_as_spec(a), _as_spec(g))
             for a, g in zip(fixed_alphas, gammas[:-1])]
    if not isinstance(psi, ApproxFunction):
        psi = ApproxFunction.from_callable(psi)
    psi_vals = [psi.value(n) for n in range(1, N + 1)]

    fast = _counter_fast_path(fixed, grid, g_last, psi_vals, N)
    if fast is not None:
        counts = fast
        undecided = []
    else:
        counts, undecided = _counter_general(fixed, grid, g_last, psi_vals, N)
    total = len(grid)
    summary = {t: sum(1 for c in counts if c >= t) / total for t in thresholds}
    return {"counts": counts, "summary": summary, "undecided": undecided}


def _counter_fast_path(fixed, grid, g_last, psi_vals, N):
    """Vectorised exact path: no fixed frequencies, rational psi, and all
    integer products certified to fit in int64."""
    if fixed:
        return None
    if any(isinstance(v, RealEnclosure) for v in psi_vals):
        return None
    q = g_last.denominator
    M = max(a.denominator for a in grid) * q
    nums = np.array([v.numerator for v in psi_vals], dtype=object)
    dens = np.array([v.denominator for v in psi_vals], dtype=object)
    lim = 2 ** 62
    if max(int(x) for x in nums) * M >= lim:
        return None
    if max(int(x) for x in dens) * M >= lim:
        return None
    nvec = np.arange(1, N + 1, dtype=np.int64)
    nums = nums.astype(np.int64)
    dens = dens.astype(np.int64)
    counts = []
    for a in grid:
        m = a.denominator * q
        if a.numerator * q * N >= lim:
            return None
        r = (nvec * (a.numerator * q) - g_last.numerator * a.denominator) % m
        dist_num = np.minimum(r, m - r)  # distance = dist_num / m
        # dist < psi(n)  <=>  dist_num * den_n < num_n * m
        counts.append(int(np.count_nonzero(dist_num * dens < nums * m)))
    return counts


def _counter_general(fixed, grid, g_last, psi_vals, N):
    budget = refinement_budget()
    # per-n distance data for the fixed coordinates
    fixed_dists = []
    for a, g in fixed:
        if a.is_rational() and g.is_rational():
            av, gv = a.exact_value(), g.exact_value()
            col = []
            for n in range(1, N + 1):
                x = n * av - gv
                fx = x - math.floor(x)
                col.append(min(fx, 1 - fx))
            fixed_dists.append(("exact", col))
        else:
            fixed_dists.append(("spec", (a, g)))
    counts = []
    undecided = []
    for gi, a_grid in enumerate(grid):
        cnt = 0
        for n in range(1, N + 1):
            x = n * a_grid - g_last
            fx = x - math.floor(x)
            d_grid = min(fx, 1 - fx)
            psi_n = psi_vals[n - 1]
            verdict = _product_below(fixed_dists, n, d_grid, psi_n, budget)
            if verdict is None:
                undecided.append((gi, n))
            elif verdict:
                cnt += 1
        counts.append(cnt)
    return counts, undecided


def _product_below(fixed_dists, n, d_grid, psi_n, budget) -> bool:
    """Certified prod dists * d_grid < psi(n); None when undecided."""
    if not isinstance(psi_n, RealEnclosure):
        psi_n = RealEnclosure.exact(psi_n)
    exact_prod = d_grid
    spec_pairs = []
    for kind, payload in fixed_dists:
        if kind == "exact":
            exact_prod *= payload[n - 1]
        else:
            spec_pairs.append(payload)
    if not spec_pairs:
        if psi_n.is_exact:
            return exact_prod < psi_n.lo
        if exact_prod < psi_n.lo:
            return True
        if exact_prod >= psi_n.hi:
            return False
        return None
    width = Fraction(1, 10 ** 12)
    for _ in range(budget):
        prod = RealEnclosure.exact(exact_prod)
        for a, g in spec_pairs:
            prod = prod * dist_nearest_integer(
                a.enclose(width / (n + 1)) * n - g.enclose(width))
        if prod.hi < psi_n.lo:
            return True
        if prod.lo >= psi_n.hi:
            return False
        width = width * width
    return None


# ------------------------------------------------------------ dyadic ratios

def dyadic_ratio_check(h: ApproxFunction, C: int, kappa: int, J0: int,
                       N: int) -> dict:
    """Ratio of sum_{C^J0 <= n <= N} h(n) max(ln n,1)^kappa to
    sum_{j=J0}^{J} j^kappa C^j h(C^j), J maximal with C^J <= N, against an
    a-priori band derived from the grouping n in [C^j, C^{j+1}):

      upper: each block has < C^j(C-1) terms, h <= h(C^j) on it, and
             max(ln n, 1) <= (j+1) max(ln C, 1) <= 2j max(ln C, 1);
      lower: h >= h(C^{j+1}) on the block and max(ln n, 1) >= j ln C,
             then reindex and use (i-1)^kappa >= (i/2)^kappa for i >= 2.
    """
    if C < 2 or J0 < 1 or kappa < 0:
        raise ParameterError("need C >= 2, J0 >= 1, kappa >= 0")
    if N < C ** J0:
        raise ParameterError("N below the first block")
    J = J0
    while C ** (J + 1) <= N:
        J += 1
    if not isinstance(h, ApproxFunction):
        h = ApproxFunction.from_callable(h)
    h.validate_monotone(C ** J0, N)

    left = 0.0
    for n in range(C ** J0, N + 1):
        v = h.value(n)
        vf = float(v.mid) if isinstance(v, RealEnclosure) else float(v)
        left += vf * paper_log(n) ** kappa
    right = 0.0
    right_terms = []
    for j in range(J0, J + 1):
        v = h.value(C ** j)
        vf = float(v.mid) if isinstance(v, RealEnclosure) else float(v)
        t = j ** kappa * float(C) ** j * vf
        right += t
        right_terms.append(t)
    if right <= 0:
        raise ParameterError("right-hand side vanished")
    ratio = left / right

    ln_c_bar = max(math.log(C), 1.0)
    band_hi = (C - 1) * (2.0 * ln_c_bar) ** kappa
    if J > J0:
        tail = right - right_terms[0]
        band_lo = ((C - 1) * min(math.log(C), 1.0) ** kappa
                   / (C * 2.0 ** kappa)) * (tail / right)
    else:
        # single-block edge: compare term by term against the lone block
        vN = h.value(N)
        vNf = float(vN.mid) if isinstance(vN, RealEnclosure) else float(vN)
        band_lo = ((N - C ** J0 + 1) * vNf * paper_log(C ** J0) ** kappa
                   / right)
    band_lo *= 0.99
    band_hi *= 1.01
    return {"ratio": ratio, "band": (band_lo, band_hi),
            "within_band": band_lo <= ratio <= band_hi,
            "J": J, "left": left, "right": right}
