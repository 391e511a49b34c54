"""Ostrowski numeration: digits of integers against the denominators q_k of
a continued fraction, digit strings for shifts gamma = sum b_{k+1} D_k, the
Sigma functional that reduces ||n*alpha - gamma|| to digit arithmetic, and
the rapidly-growing (alpha, gamma) constructions used by the sharpness
experiments.

Digit indexing: a digits tuple t stores t[i] = c_{i+1}, the coefficient of
q_i, so decode(t) = sum t[i] * q_i.  Validity:

    0 <= c_1 < a_1;  0 <= c_{k+1} <= a_{k+1};  c_{k+1} = a_{k+1} => c_k = 0.

Greedy top-down encoding lands inside these constraints automatically.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .contfrac import ContinuedFraction
from .numbers import (CFSpec, DepthError, ParameterError, PrecisionError,
                      RealEnclosure, dist_nearest_integer,
                      paper_log_enclosure, refinement_budget,
                      register_cf_rule)


class DigitConstraintError(ParameterError):
    """An Ostrowski digit string violates one of the three constraints."""


# ------------------------------------------------------------------ digits

class OstrowskiDigits:
    """Digit string c_1 ... c_{K+1} against a reference continued fraction."""

    __slots__ = ("cf", "digits")

    def __init__(self, cf: ContinuedFraction, digits):
        self.cf = cf
        self.digits = tuple(int(c) for c in digits)

    def __iter__(self):
        return iter(self.digits)

    def __len__(self):
        return len(self.digits)

    def __repr__(self):
        return f"OstrowskiDigits({list(self.digits)})"


def validate_digits(cf: ContinuedFraction, digits) -> None:
    """Raise DigitConstraintError naming the violated rule, or return None."""
    digits = tuple(digits)
    if not digits:
        raise DigitConstraintError("empty digit string")
    for i, c in enumerate(digits):
        a = cf.require_partial(i + 1)
        if i == 0:
            if not 0 <= c < a:
                raise DigitConstraintError(
                    f"c_1 range: c_1 = {c} outside [0, a_1) = [0, {a})")
        else:
            if not 0 <= c <= a:
                raise DigitConstraintError(
                    f"c_{i + 1} range: c_{i + 1} = {c} outside [0, a_{i + 1}] = [0, {a}]")
            if c == a and digits[i - 1] != 0:
                raise DigitConstraintError(
                    f"adjacency: c_{i + 1} = a_{i + 1} = {a} requires c_{i} = 0, "
                    f"got {digits[i - 1]}")


def ostrowski_encode(n: int, cf: ContinuedFraction) -> OstrowskiDigits:
    """Greedy expansion n = sum c_{k+1} q_k with q_K <= n < q_{K+1}."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    K = 0
    while True:
        nxt = cf.q(K + 1)  # DepthError if the expansion is too short
        if nxt > n:
            break
        K += 1
    digits = [0] * (K + 1)
    rem = n
    for k in range(K, -1, -1):
        digits[k], rem = divmod(rem, cf.q(k))
    assert rem == 0
    out = OstrowskiDigits(cf, digits)
    validate_digits(cf, out.digits)
    return out


def ostrowski_decode(d: OstrowskiDigits) -> int:
    validate_digits(d.cf, d.digits)
    return sum(c * d.cf.q(i) for i, c in enumerate(d.digits))


# ---------------------------------------------------------------- cylinders

def _cap_after_reset(cf, digits, j, m1) -> int:
    """Largest value digit j may take, assuming free digits below j are
    about to reset to 0 (only a fixed prefix digit can then be nonzero)."""
    a = cf.require_partial(j + 1)
    if j == 0:
        return a - 1
    below = digits[j - 1] if j - 1 < m1 else 0
    return a if below == 0 else a - 1


def cylinder_elements(prefix, cf: ContinuedFraction, count: int):
    """The `count` smallest n whose digits start with the given prefix
    (digits c_1..c_{m+1} fixed; higher digits free).

    Enumeration is an odometer over the free digits: valid digit strings
    compare like their values (lower digits always sum below q_{j+1}), so
    colexicographic stepping emits elements in increasing order.
    """
    prefix = tuple(int(c) for c in prefix)
    validate_digits(cf, prefix)
    if count < 1:
        raise ParameterError("count must be >= 1")
    if count > 10 ** 6:
        raise ParameterError("count exceeds the enumeration budget")
    m1 = len(prefix)  # free digits start at index m1
    digits = list(prefix)
    out = []
    while len(out) < count:
        n = sum(c * cf.q(i) for i, c in enumerate(digits))
        if n >= 1:
            out.append(n)
        # odometer step: find the lowest free index that can be raised
        j = m1
        while True:
            if j >= len(digits):
                digits.append(0)
            # raising digit j is illegal while the digit above sits at its
            # maximum (that maximum requires digit j to stay 0)
            above = digits[j + 1] if j + 1 < len(digits) else 0
            blocked = above != 0 and above == cf.require_partial(j + 2)
            if not blocked and digits[j] < _cap_after_reset(cf, digits, j, m1):
                digits[j] += 1
                for i in range(m1, j):
                    digits[i] = 0
                break
            j += 1
    return out


# ------------------------------------------------------------- gamma digits

_TAIL_RULES = ("zero", "half", "quarter")


class GammaDigits:
    """Shift digits b_1, b_2, ... : a finite prefix plus a named tail rule.

    Tail rules: "zero"; "half" (b_k = a_k // 2); "quarter" (a_k // 4);
    "const:<v>"; "sigma:<bits>" (b_k = a_k // 2^(1 + sigma_k) with the bit
    string cycled).  b_k is defined for every k >= 1 the reference
    expansion can supply.
    """

    __slots__ = ("cf", "prefix", "tail_rule")

    def __init__(self, cf: ContinuedFraction, prefix=(), tail_rule="zero"):
        self.cf = cf
        self.prefix = tuple(int(b) for b in prefix)
        if not (tail_rule in _TAIL_RULES or tail_rule.startswith("const:")
                or tail_rule.startswith("sigma:")):
            raise ParameterError(f"unknown tail rule {tail_rule!r}")
        if tail_rule.startswith("sigma:"):
            bits = tail_rule.split(":", 1)[1]
            if not bits or any(ch not in "01" for ch in bits):
                raise ParameterError("sigma rule needs a nonempty 0/1 string")
        self.tail_rule = tail_rule

    def b(self, k: int) -> int:
        """b_k, 1-based."""
        if k < 1:
            raise ParameterError("digit index is 1-based")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        rule = self.tail_rule
        if rule == "zero":
            return 0
        if rule == "half":
            return self.cf.require_partial(k) // 2
        if rule == "quarter":
            return self.cf.require_partial(k) // 4
        if rule.startswith("const:"):
            return int(rule.split(":", 1)[1])
        bits = rule.split(":", 1)[1]
        sigma = int(bits[(k - 1) % len(bits)])
        return self.cf.require_partial(k) // (2 ** (1 + sigma))

    def to_json(self):
        return {"alpha_cf": self.cf.spec.to_json(),
                "b_prefix": list(self.prefix),
                "b_tail_rule": self.tail_rule}

    def __repr__(self):
        return (f"GammaDigits(prefix={list(self.prefix)}, "
                f"tail_rule={self.tail_rule!r})")


def pair_from_json(obj) -> tuple:
    """(cf, GammaDigits) from {"alpha_cf": ..., "b_prefix": [...],
    "b_tail_rule": "..."}."""
    from .numbers import spec_from_json
    cf = ContinuedFraction.from_spec(spec_from_json(obj["alpha_cf"]))
    g = GammaDigits(cf, obj.get("b_prefix", ()),
                    obj.get("b_tail_rule", "zero"))
    return cf, g


def dandy_check(cf: ContinuedFraction, g: GammaDigits, depth: int):
    """Violations of: a_0 = 0; a_k >= 64; a_k/4 <= b_k <= a_k/2, k <= depth."""
    problems = []
    if cf.partial(0) != 0:
        problems.append(f"a_0 = {cf.partial(0)} != 0")
    for k in range(1, depth + 1):
        a = cf.require_partial(k)
        b = g.b(k)
        if a < 64:
            problems.append(f"a_{k} = {a} < 64")
        if not (4 * b >= a and 2 * b <= a):
            problems.append(f"b_{k} = {b} outside [a_{k}/4, a_{k}/2] = "
                            f"[{Fraction(a, 4)}, {Fraction(a, 2)}]")
    return problems


# ----------------------------------------------------------- gamma's value

def _tail_bound(cf: ContinuedFraction, K: int) -> Fraction:
    """Sound bound on |sum_{k >= K} b_{k+1} D_k| for ANY valid digits:
    each term is at most a_{k+1} |D_k| <= 1/q_k and q_{k+2} >= 2 q_k, so the
    tail is below 2 (1/q_K + 1/q_{K+1}) <= 4/q_K."""
    return Fraction(4, cf.q(K))


def gamma_from_digits(g: GammaDigits, width=Fraction(1, 10 ** 30)) -> RealEnclosure:
    """Enclosure of gamma = sum_{k >= 0} b_{k+1} D_k at the given width."""
    width = Fraction(width)
    if width <= 0:
        raise ParameterError("width must be positive")
    cf = g.cf
    K = 1
    while _tail_bound(cf, K) > width / 2:
        K += 1
        cf.require_partial(K)
    w_alpha = width / (8 * cf.q(K))
    alpha = cf.enclose(w_alpha)
    total = RealEnclosure.exact(0)
    for k in range(K):
        b = g.b(k + 1)
        d_enc = alpha * cf.q(k) - cf.p(k)
        total = total + d_enc * b
    tb = _tail_bound(cf, K)
    if g.tail_rule == "zero" and len(g.prefix) <= K:
        tb = Fraction(0)
    return RealEnclosure(total.lo - tb, total.hi + tb)


def certify_dandy_pair(cf: ContinuedFraction, g: GammaDigits,
                       width=Fraction(1, 10 ** 30)):
    """Certified 0 < alpha < 1/64 and 0 <= gamma < 1 - alpha; returns
    (alpha_enclosure, gamma_enclosure) or raises PrecisionError.

    Strict bounds resolve by refinement: a convergent sandwich can land an
    endpoint exactly on 1/64 (when a_1 = 64), and one deeper sandwich then
    clears it."""
    problems = dandy_check(cf, g, depth=3)
    if problems:
        raise ParameterError("not a valid rapid pair: " + "; ".join(problems))
    alpha = cf.enclose(width)
    gamma = gamma_from_digits(g, width)
    cap = Fraction(1, 64)
    for _ in range(refinement_budget()):
        ok_a = alpha.lo > 0 and alpha.hi < cap
        ok_g = gamma.lo >= 0 and gamma.hi < 1 - alpha.hi
        if ok_a and ok_g:
            return alpha, gamma
        if not ok_a:
            alpha = cf.enclose(alpha.width / 2 ** 32)
        else:
            gamma = gamma_from_digits(g, gamma.width / 2 ** 32)
    if not (alpha.lo > 0 and alpha.hi < cap):
        raise PrecisionError(f"0 < alpha < 1/64 not certified by {alpha!r}")
    raise PrecisionError("0 <= gamma < 1 - alpha not certified")


# -------------------------------------------------------- sigma decomposition

class SigmaDecomposition:
    __slots__ = ("n", "m", "deltas", "sigma", "dist", "direct")

    def __init__(self, n, m, deltas, sigma, dist, direct):
        self.n = n
        self.m = m
        self.deltas = deltas
        self.sigma = sigma
        self.dist = dist
        self.direct = direct

    def __repr__(self):
        return (f"SigmaDecomposition(n={self.n}, m={self.m}, "
                f"deltas={list(self.deltas)})")


class _PairContext:
    """Shared enclosures for a sigma sweep over many n at one width."""

    def __init__(self, cf: ContinuedFraction, g: GammaDigits, n_max: int,
                 width=Fraction(1, 10 ** 30)):
        self.cf, self.g = cf, g
        width = Fraction(width)
        K = 1
        while cf.q(K) <= n_max:
            K += 1
        # evaluation depth: the explicit sum runs to K_eval with the digit
        # tail folded into a rigorous bound 4/q_{K_eval + 1}
        K_eval = K
        while _tail_bound(cf, K_eval + 1) > width / 8:
            K_eval += 1
            cf.require_partial(K_eval + 1)
        self.K_eval = K_eval
        w_alpha = width / (32 * cf.q(K_eval + 1))
        self.alpha = cf.enclose(w_alpha)
        self.gamma = gamma_from_digits(g, width / 8)
        self.d_encs = [self.alpha * cf.q(k) - cf.p(k) for k in range(K_eval + 1)]
        self.b_digits = [g.b(k + 1) for k in range(K_eval + 1)]
        self.tail = _tail_bound(cf, K_eval + 1)


def sigma_decompose(n: int, pair, width=Fraction(1, 10 ** 30),
                    ctx: _PairContext = None) -> SigmaDecomposition:
    """Digit route vs direct route for ||n*alpha - gamma||.

    sigma encloses Sigma = sum_k (c_{k+1} - b_{k+1}) D_k (all k, tail
    bounded); dist encloses min(|Sigma|, 1 - |Sigma|); direct encloses
    ||n alpha - gamma|| evaluated with no digit knowledge.  The two latter
    enclose the same real whenever the rapid-growth digit conditions hold,
    which the caller checks by intersecting them.
    """
    cf, g = pair
    if ctx is None:
        ctx = _PairContext(cf, g, n, width)
    c = ostrowski_encode(n, cf).digits
    if len(c) > ctx.K_eval + 1:
        raise ParameterError(f"n = {n} exceeds the context's digit depth")
    deltas = []
    m_of_n = None
    for k in range(ctx.K_eval + 1):
        ck = c[k] if k < len(c) else 0
        dk = ck - ctx.b_digits[k]
        deltas.append(dk)
        if dk != 0 and m_of_n is None:
            m_of_n = k
    if m_of_n is None:
        raise ParameterError(
            f"digits of n = {n} match the shift digits through depth "
            f"{ctx.K_eval}; m(n) is undefined at this width")
    total = RealEnclosure.exact(0)
    for k, dk in enumerate(deltas):
        if dk != 0:
            total = total + ctx.d_encs[k] * dk
    sigma = RealEnclosure(total.lo - ctx.tail, total.hi + ctx.tail)
    sabs = sigma.abs()
    one_minus = RealEnclosure(1 - sabs.hi, 1 - sabs.lo)
    dist = RealEnclosure(min(sabs.lo, one_minus.lo), min(sabs.hi, one_minus.hi))
    direct = dist_nearest_integer(ctx.alpha * n - ctx.gamma)
    return SigmaDecomposition(n, m_of_n, tuple(deltas), sigma, dist, direct)


def sigma_sweep(pair, n_max: int, width=Fraction(1, 10 ** 30)):
    """sigma_decompose for every n in [1, n_max] with shared enclosures."""
    cf, g = pair
    ctx = _PairContext(cf, g, n_max, width)
    return [sigma_decompose(n, pair, width, ctx) for n in range(1, n_max + 1)]


# --------------------------------------------------------- rapid constructions

_FACTORIAL_ARG_CAP = 10 ** 5
_BIT_BUDGET = 10 ** 6


def _rapid_quotient_rule(schedule: str, sigma_bits: str):
    """Pure-function-of-index quotient rule for the rapid schedules.

    paper:   a_{u+1} = least multiple of 64 that is >= q_u!
    relaxed: a_{u+1} = 64 * q_u^3
    hybrid:  paper while q_u is small enough to take a factorial of,
             then relaxed
    a_0 = 0 in all cases.
    """
    if schedule not in ("paper", "relaxed", "hybrid"):
        raise ParameterError(f"unknown schedule {schedule!r}")
    a_cache = [0]
    q_state = {"prev": 0, "cur": 1}  # q_{-1}, q_0

    def rule(j):
        while len(a_cache) <= j:
            u = len(a_cache)  # producing a_u from q_{u-1}
            q = q_state["cur"]
            if schedule == "relaxed":
                a = 64 * q ** 3
            else:
                if q > _FACTORIAL_ARG_CAP:
                    if schedule == "paper":
                        return None  # tail unknown beyond the factorial cap
                    a = 64 * q ** 3
                else:
                    f = math.factorial(q)
                    a = 64 * ((f + 63) // 64)
                    assert a >= f
            if a.bit_length() + q.bit_length() > _BIT_BUDGET:
                raise DepthError(
                    f"schedule overflow beyond configured bit budget at index {u}")
            a_cache.append(a)
            q_state["prev"], q_state["cur"] = q, a * q + q_state["prev"]
        return a_cache[j]

    return rule


def _sharp_rule_factory(rule_id: str) -> CFSpec:
    # sharp:<schedule>:<bits>
    try:
        _, schedule, bits = rule_id.split(":")
    except ValueError:
        raise ParameterError(f"bad sharp rule {rule_id!r}, want sharp:<schedule>:<bits>")
    if not bits or any(ch not in "01" for ch in bits):
        raise ParameterError("sharp rule needs a nonempty 0/1 sigma string")
    return CFSpec(rule=_rapid_quotient_rule(schedule, bits), rule_id=rule_id)


register_cf_rule("sharp", _sharp_rule_factory)


def sharpness_construct(sigma_bits, schedule: str, depth: int):
    """(cf, GammaDigits) with b_i = a_i // 2^(1 + sigma_i) under the given
    growth schedule; the first `depth` quotients are materialised and
    checked.  The paper-style factorial schedule overflows past depth 2;
    deeper requests raise the depth-cap error."""
    bits = "".join(str(int(b)) for b in sigma_bits)
    if not bits:
        raise ParameterError("need at least one sigma bit")
    if depth < 1:
        raise ParameterError("depth must be >= 1")
    spec = _sharp_rule_factory(f"sharp:{schedule}:{bits}")
    cf = ContinuedFraction(spec)
    for u in range(1, depth + 1):
        a = cf.partial(u)
        if a is None:
            raise DepthError(
                f"schedule {schedule!r} not representable past index {u - 1}; "
                f"factorial arguments exceed the cap {_FACTORIAL_ARG_CAP}")
        assert a % 64 == 0 and a >= 64
        if schedule == "paper":
            assert a >= math.factorial(cf.q(u - 1))
    g = GammaDigits(cf, (), f"sigma:{bits}")
    problems = dandy_check(cf, g, depth)
    if problems:
        raise ParameterError("construction violates digit bounds: "
                             + "; ".join(problems))
    return cf, g


# ------------------------------------------------------------ partial sums

def sud_partial_sum(u: int, d: int, pair, n_max: int,
                    width=Fraction(1, 10 ** 30)) -> dict:
    """Partial sum over the n <= n_max with m(n) = u and |delta_{u+1}| = d of
    1/(n * log(n)^2 * ||n alpha - gamma||), as an enclosure, plus the least
    member (for the min >> q_u check).  Membership is decided from exact
    digits.  Logs use the all-logs-positive convention."""
    cf, g = pair
    a_next = cf.require_partial(u + 1)
    b_next = g.b(u + 1)
    if not 1 <= d <= a_next - b_next:
        raise ParameterError(
            f"d = {d} outside [1, a_{u + 1} - b_{u + 1}] = [1, {a_next - b_next}]")
    ctx = _PairContext(cf, g, n_max, width)
    total = RealEnclosure.exact(0)
    count, min_n = 0, None
    for n in range(1, n_max + 1):
        s = sigma_decompose(n, pair, width, ctx)
        if s.m != u or abs(s.deltas[u]) != d:
            continue
        count += 1
        if min_n is None:
            min_n = n
        log_enc = paper_log_enclosure(n)
        denom = (log_enc * log_enc * n) * s.dist
        if denom.lo <= 0:
            raise PrecisionError(
                f"||n alpha - gamma|| not separated from 0 at n = {n}")
        total = total + denom.reciprocal()
    return {
        "sum": total,
        "count": count,
        "min_n": min_n,
        "min_ratio": None if min_n is None else Fraction(min_n, cf.q(u)),
        "empty": count == 0,
    }
