"""Exact arithmetic substrate.

Three layers:

  * BigRational  -- arbitrary-precision rationals (stdlib Fraction, which
    already stores lowest terms with a positive denominator).
  * RealEnclosure -- a two-sided rational bracket [lo, hi] of a real number;
    the width hi - lo is a certified error bound.
  * RealSpec    -- a symbolic description of a real number that can be
    evaluated to any requested enclosure width: an exact rational, a
    quadratic surd a + b*sqrt(D), or a stream of continued fraction
    partial quotients.

Irrationals are only ever evaluated through convergent sandwiches
(consecutive CF convergents bracket the value) or integer square-root
bounds; no machine floats enter any certified comparison.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

BigRational = Fraction

DEFAULT_BUDGET = 24


# ----------------------------------------------------------------- errors

class ParameterError(ValueError):
    """Invalid argument outside an operation's contract."""


class PrecisionError(ArithmeticError):
    """Requested width could not be certified; carries the best enclosure."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class UndecidableError(ArithmeticError):
    """A threshold comparison stayed ambiguous after the refinement budget."""

    def __init__(self, message, items=None):
        super().__init__(message)
        self.items = list(items) if items else []


class DepthError(ParameterError):
    """A finite expansion was asked for more terms than it has."""


def refinement_budget() -> int:
    """Refinement rounds allowed before a comparison is declared undecidable.

    Overridable through the DIOPHLAB_BUDGET environment variable.
    """
    raw = os.environ.get("DIOPHLAB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"DIOPHLAB_BUDGET must be an integer, got {raw!r}")
    if value <= 0:
        raise ParameterError("DIOPHLAB_BUDGET must be positive")
    return value


# ------------------------------------------------------------- enclosures

class RealEnclosure:
    """Rational bracket [lo, hi] containing a real number."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = Fraction(lo)
        hi = Fraction(hi)
        if lo > hi:
            raise ParameterError(f"enclosure endpoints out of order: {lo} > {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, *a):
        raise AttributeError("RealEnclosure is immutable")

    @classmethod
    def exact(cls, value) -> "RealEnclosure":
        v = Fraction(value)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lo <= x <= self.hi

    def intersects(self, other: "RealEnclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    # interval arithmetic; endpoints are exact rationals so all of these
    # are themselves exact
    def __add__(self, other):
        if isinstance(other, RealEnclosure):
            return RealEnclosure(self.lo + other.lo, self.hi + other.hi)
        o = Fraction(other)
        return RealEnclosure(self.lo + o, self.hi + o)

    __radd__ = __add__

    def __neg__(self):
        return RealEnclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RealEnclosure) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + Fraction(other)

    def __mul__(self, other):
        if isinstance(other, RealEnclosure):
            cands = (self.lo * other.lo, self.lo * other.hi,
                     self.hi * other.lo, self.hi * other.hi)
            return RealEnclosure(min(cands), max(cands))
        o = Fraction(other)
        if o >= 0:
            return RealEnclosure(self.lo * o, self.hi * o)
        return RealEnclosure(self.hi * o, self.lo * o)

    __rmul__ = __mul__

    def reciprocal(self) -> "RealEnclosure":
        if self.lo <= 0 <= self.hi:
            raise ParameterError("reciprocal of an enclosure containing 0")
        return RealEnclosure(1 / self.hi, 1 / self.lo)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ParameterError("enclosure powers take integer k >= 0")
        out = RealEnclosure.exact(1)
        for _ in range(k):
            out = out * self
        return out

    def abs(self) -> "RealEnclosure":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RealEnclosure(Fraction(0), max(-self.lo, self.hi))

    @classmethod
    def hull(cls, *encs: "RealEnclosure") -> "RealEnclosure":
        return cls(min(e.lo for e in encs), max(e.hi for e in encs))

    def __repr__(self):
        if self.is_exact:
            return f"RealEnclosure({self.lo})"
        return f"RealEnclosure({self.lo}, {self.hi})"

    def __eq__(self, other):
        return (isinstance(other, RealEnclosure)
                and self.lo == other.lo and self.hi == other.hi)

    def __hash__(self):
        return hash((self.lo, self.hi))


def dist_nearest_integer(e: RealEnclosure) -> RealEnclosure:
    """Enclosure of ||x|| (distance to the nearest integer) over x in e.

    ||.|| is a 1-periodic sawtooth peaking at 1/2 on half-integers, so the
    extrema over [lo, hi] sit at the endpoints, at integers (min 0), or at
    half-integers (max 1/2) interior to the interval.
    """
    lo, hi = e.lo, e.hi
    if hi - lo >= 1:
        return RealEnclosure(Fraction(0), Fraction(1, 2))

    def dist(x: Fraction) -> Fraction:
        fx = x - math.floor(x)
        return min(fx, 1 - fx)

    d_lo, d_hi = dist(lo), dist(hi)
    out_lo = min(d_lo, d_hi)
    out_hi = max(d_lo, d_hi)
    if math.ceil(lo) <= math.floor(hi):          # an integer lies in [lo, hi]
        out_lo = Fraction(0)
    two_lo, two_hi = math.ceil(2 * lo), math.floor(2 * hi)
    if any(t % 2 != 0 for t in range(two_lo, two_hi + 1)):  # half-integer inside
        out_hi = Fraction(1, 2)
    return RealEnclosure(out_lo, min(out_hi, Fraction(1, 2)))


# --------------------------------------------------- continued fraction core

def convergent_pairs(quotients: Iterable[int]):
    """Yield (j, p_j, q_j) for the continued fraction [a0; a1, a2, ...].

    Recursion: p_{j+1} = a_{j+1} p_j + p_{j-1}, same for q, seeded with
    (p_{-1}, q_{-1}) = (1, 0) and (p_0, q_0) = (a0, 1).
    """
    p_prev, q_prev = 1, 0
    p, q = None, None
    for j, a in enumerate(quotients):
        a = int(a)
        if j == 0:
            p, q = a, 1
        else:
            if a < 1:
                raise ParameterError(f"partial quotient a_{j} = {a} < 1")
            p, q, p_prev, q_prev = a * p + p_prev, a * q + q_prev, p, q
        yield j, p, q


def evaluate_cf(quotients) -> Fraction:
    """Exact value of a finite continued fraction."""
    qs = list(quotients)
    if not qs:
        raise ParameterError("empty continued fraction")
    val = Fraction(int(qs[-1]))
    for a in reversed(qs[:-1]):
        val = Fraction(int(a)) + 1 / val
    return val


# --------------------------------------------------------------- real specs

class RealSpec:
    """Symbolic real number evaluable to arbitrary certified width."""

    def enclose(self, target_width) -> RealEnclosure:
        raise NotImplementedError

    def is_rational(self) -> bool:
        return False

    def exact_value(self) -> Fraction:
        raise ParameterError("spec is not an exact rational")

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class Rat(RealSpec):
    """An exact rational."""

    def __init__(self, value):
        self.value = Fraction(value)

    def enclose(self, target_width) -> RealEnclosure:
        if Fraction(target_width) <= 0:
            raise ParameterError("target width must be positive")
        return RealEnclosure.exact(self.value)

    def is_rational(self):
        return True

    def exact_value(self):
        return self.value

    def to_json(self):
        return {"rational": f"{self.value.numerator}/{self.value.denominator}"}


class Surd(RealSpec):
    """a + b*sqrt(D) with rational a, b and a nonsquare positive integer D."""

    def __init__(self, a, b, d):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)
        if self.d <= 0:
            raise ParameterError("D must be positive")
        r = math.isqrt(self.d)
        if r * r == self.d:
            raise ParameterError(f"D = {self.d} is a perfect square; use a rational spec")

    def enclose(self, target_width) -> RealEnclosure:
        tw = Fraction(target_width)
        if tw <= 0:
            raise ParameterError("target width must be positive")
        if self.b == 0:
            return RealEnclosure.exact(self.a)
        # sqrt(D) in [s, s+1]/2^k with s = isqrt(D * 4^k); the bracket has
        # width 2^-k, scaled by |b|
        k = 1
        need = abs(self.b) / tw
        while Fraction(2) ** k <= need:
            k += 1
        s = math.isqrt(self.d << (2 * k))
        root_lo = Fraction(s, 1 << k)
        root_hi = Fraction(s + 1, 1 << k)
        if self.b > 0:
            return RealEnclosure(self.a + self.b * root_lo, self.a + self.b * root_hi)
        return RealEnclosure(self.a + self.b * root_hi, self.a + self.b * root_lo)

    def to_json(self):
        return {"surd": {"a": f"{self.a.numerator}/{self.a.denominator}",
                         "b": f"{self.b.numerator}/{self.b.denominator}",
                         "D": self.d}}


class CFSpec(RealSpec):
    """Real number given by partial quotients a_0; a_1, a_2, ...

    Finite list: an exact rational (no uniqueness convention is imposed
    here; canonical expansions come from contfrac.cf_of_rational).
    Rule: a pure function index -> quotient; returning None marks the tail
    as unknown, which makes deep enclosures raise PrecisionError rather
    than silently treating the number as rational.
    """

    def __init__(self, quotients=None, rule: Optional[Callable[[int], Optional[int]]] = None,
                 rule_id: Optional[str] = None):
        if (quotients is None) == (rule is None):
            raise ParameterError("give either a finite quotient list or a rule")
        self.quotients = None if quotients is None else tuple(int(a) for a in quotients)
        if self.quotients is not None:
            if len(self.quotients) == 0:
                raise ParameterError("empty continued fraction")
            for j, a in enumerate(self.quotients[1:], start=1):
                if a < 1:
                    raise ParameterError(f"partial quotient a_{j} = {a} < 1")
        self.rule = rule
        self.rule_id = rule_id
        self._cache = []  # known quotients, grown on demand

    def partial(self, j: int) -> Optional[int]:
        """a_j, or None when the stream's tail is unknown at j."""
        if self.quotients is not None:
            return self.quotients[j] if j < len(self.quotients) else None
        while len(self._cache) <= j:
            a = self.rule(len(self._cache))
            if a is None:
                return None
            a = int(a)
            if len(self._cache) >= 1 and a < 1:
                raise ParameterError(f"rule produced a_{len(self._cache)} = {a} < 1")
            self._cache.append(a)
        return self._cache[j]

    def known_prefix(self, upto: int):
        """Quotients a_0..a_j for the largest j <= upto that is known."""
        out = []
        for j in range(upto + 1):
            a = self.partial(j)
            if a is None:
                break
            out.append(a)
        return out

    def is_finite(self) -> bool:
        return self.quotients is not None

    def is_rational(self):
        return self.is_finite()

    def exact_value(self):
        if not self.is_finite():
            raise ParameterError("stream spec has no exact rational value")
        return evaluate_cf(self.quotients)

    def enclose(self, target_width) -> RealEnclosure:
        tw = Fraction(target_width)
        if tw <= 0:
            raise ParameterError("target width must be positive")
        if self.is_finite():
            return RealEnclosure.exact(self.exact_value())
        # consecutive convergents bracket the value with gap 1/(q_j q_{j+1})
        best = None
        p_prev, q_prev = 1, 0
        p = q = None
        j = 0
        while True:
            a = self.partial(j)
            if a is None:
                raise PrecisionError(
                    f"precision unattainable: quotient stream ends before width {tw}",
                    best=best)
            if j == 0:
                p, q = a, 1
            else:
                p, q, p_prev, q_prev = a * p + p_prev, a * q + q_prev, p, q
            if j >= 1:
                lo = Fraction(p, q)
                hi = Fraction(p_prev, q_prev)
                if lo > hi:
                    lo, hi = hi, lo
                best = RealEnclosure(lo, hi)
                if best.width <= tw:
                    return best
            j += 1

    def to_json(self):
        if self.is_finite():
            return {"cf": list(self.quotients)}
        if self.rule_id is None:
            raise ParameterError("anonymous quotient rule cannot be serialised")
        return {"cf_rule": self.rule_id}


# -------------------------------------------------------- named rule registry

_RULE_FACTORIES = {}


def register_cf_rule(prefix: str, factory: Callable[[str], CFSpec]):
    """factory receives the full rule id and returns the CFSpec."""
    _RULE_FACTORIES[prefix] = factory


def cf_rule(rule_id: str) -> CFSpec:
    head = rule_id.split(":", 1)[0]
    factory = _RULE_FACTORIES.get(head)
    if factory is None:
        raise ParameterError(f"unknown cf rule {rule_id!r}")
    return factory(rule_id)


def _golden_rule(rule_id):
    # [0; 1, 1, 1, ...], the golden section 0.618...
    return CFSpec(rule=lambda j: 0 if j == 0 else 1, rule_id=rule_id)


def _sqrt2_rule(rule_id):
    # [1; 2, 2, 2, ...]
    return CFSpec(rule=lambda j: 1 if j == 0 else 2, rule_id=rule_id)


def _const_rule(rule_id):
    # const:<a0>:<a>  ->  [a0; a, a, a, ...]
    try:
        _, a0, a = rule_id.split(":")
        a0, a = int(a0), int(a)
    except ValueError:
        raise ParameterError(f"bad const rule {rule_id!r}, want const:<a0>:<a>")
    if a < 1:
        raise ParameterError("const rule needs a >= 1")
    return CFSpec(rule=lambda j: a0 if j == 0 else a, rule_id=rule_id)


def _periodic_rule(rule_id):
    # periodic:<a0>:<p1,p2,...>  ->  [a0; p1, p2, ..., p1, p2, ...]
    try:
        _, a0, period = rule_id.split(":")
        a0 = int(a0)
        cycle = tuple(int(x) for x in period.split(","))
    except ValueError:
        raise ParameterError(f"bad periodic rule {rule_id!r}")
    if not cycle or any(c < 1 for c in cycle):
        raise ParameterError("periodic rule needs positive quotients")
    return CFSpec(rule=lambda j: a0 if j == 0 else cycle[(j - 1) % len(cycle)],
                  rule_id=rule_id)


def _hashrand_rule(rule_id):
    # randcf:<seed>:<bound>  ->  a_0 = 0, a_j = 1 + (sha256(seed||j) mod bound)
    # a pure function of the index, so streams stay stateless and shareable
    try:
        _, seed, bound = rule_id.split(":")
        bound = int(bound)
    except ValueError:
        raise ParameterError(f"bad randcf rule {rule_id!r}, want randcf:<seed>:<bound>")
    if bound < 1:
        raise ParameterError("randcf bound must be >= 1")

    def rule(j, _seed=seed, _bound=bound):
        if j == 0:
            return 0
        h = hashlib.sha256(f"{_seed}:{j}".encode()).digest()
        return 1 + int.from_bytes(h[:8], "big") % _bound

    return CFSpec(rule=rule, rule_id=rule_id)


register_cf_rule("golden", _golden_rule)
register_cf_rule("sqrt2", _sqrt2_rule)
register_cf_rule("const", _const_rule)
register_cf_rule("periodic", _periodic_rule)
register_cf_rule("randcf", _hashrand_rule)


# ------------------------------------------------------------- serialisation

def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text))


def as_real_spec(x) -> RealSpec:
    """Coerce a spec, a named cf rule id, or rational-like data to RealSpec."""
    if isinstance(x, RealSpec):
        return x
    if isinstance(x, str) and x.split(":", 1)[0] in _RULE_FACTORIES:
        return cf_rule(x)
    return Rat(Fraction(x))


def spec_from_json(obj: Union[str, dict]) -> RealSpec:
    """Parse {"rational": "p/q"} | {"surd": {...}} | {"cf": [...]} | {"cf_rule": id}."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParameterError(f"bad real spec {obj!r}")
    (kind, payload), = obj.items()
    if kind == "rational":
        return Rat(parse_rational(payload))
    if kind == "surd":
        return Surd(parse_rational(payload["a"]), parse_rational(payload["b"]),
                    int(payload["D"]))
    if kind == "cf":
        return CFSpec(quotients=payload)
    if kind == "cf_rule":
        return cf_rule(str(payload))
    raise ParameterError(f"unknown real spec kind {kind!r}")


def tree_sum(values):
    """Exact sum of rationals by balanced pairwise reduction.

    Sequential Fraction addition re-reduces against an ever-growing
    denominator; pairing keeps intermediate denominators near the subtree
    lcm, which is much faster for long sums of unrelated denominators.
    """
    vals = list(values)
    if not vals:
        return Fraction(0)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return Fraction(vals[0])


# ---------------------------------------------------------- log enclosures

_LOG_SLACK = Fraction(1, 2 ** 50)  # >= 4 ulp of relative slack


def log_enclosure(x) -> RealEnclosure:
    """Rational enclosure of ln(x) for rational x > 0.

    libm's log is assumed faithful to within a few ulp; the slack factor
    2^-50 is ~16x that, so the bracket is sound on any IEEE-754 platform.
    """
    x = Fraction(x)
    if x <= 0:
        raise ParameterError("log of a non-positive value")
    if x == 1:
        return RealEnclosure.exact(0)
    # math.log(Fraction) would lose precision for huge numerators; split as
    # log(num) - log(den) on floats of the integer parts.  The error budget
    # covers the cancellation case x near 1: each term carries slack
    # relative to ITS magnitude, not the difference's.
    ln_num = math.log(x.numerator)
    ln_den = math.log(x.denominator)
    f = Fraction(ln_num) - Fraction(ln_den)
    pad = (Fraction(abs(ln_num)) + Fraction(abs(ln_den))) * _LOG_SLACK \
        + Fraction(1, 2 ** 60)
    return RealEnclosure(f - pad, f + pad)


def paper_log_enclosure(x) -> RealEnclosure:
    """Enclosure of max(ln x, 1), the all-logs-positive convention."""
    e = log_enclosure(x)
    return RealEnclosure(max(e.lo, Fraction(1)), max(e.hi, Fraction(1)))


def integer_nth_root(x: int, n: int) -> int:
    """floor(x ** (1/n)) for x >= 0, n >= 1, by Newton iteration on ints."""
    if x < 0 or n < 1:
        raise ParameterError("integer_nth_root needs x >= 0, n >= 1")
    if n == 1 or x in (0, 1):
        return x
    r = 1 << (x.bit_length() // n + 1)
    while True:
        nxt = ((n - 1) * r + x // r ** (n - 1)) // n
        if nxt >= r:
            break
        r = nxt
    while r ** n > x:
        r -= 1
    return r


def rational_power_enclosure(base: int, exponent, width) -> RealEnclosure:
    """Enclosure of base ** exponent for integer base >= 1 and rational
    exponent, with hi - lo <= width.  Needs no transcendental functions:
    base**(p/q) is bracketed by integer q-th roots of base**p << (q*s)."""
    exponent = Fraction(exponent)
    width = Fraction(width)
    if base < 1:
        raise ParameterError("base must be a positive integer")
    if width <= 0:
        raise ParameterError("width must be positive")
    if exponent < 0:
        # base**|e| >= 1, so its bracket has lo >= 1 and the reciprocal
        # bracket is no wider than the inner one
        return rational_power_enclosure(base, -exponent, width).reciprocal()
    p, q = exponent.numerator, exponent.denominator
    t = base ** p
    if q == 1:
        return RealEnclosure.exact(t)
    s = max(1, (width.denominator // max(width.numerator, 1)).bit_length() + 1)
    r = integer_nth_root(t << (q * s), q)
    return RealEnclosure(Fraction(r, 2 ** s), Fraction(r + 1, 2 ** s))


# --------------------------------------------------------- resolve protocol

def decide_cmp(refine: Callable[[Fraction], RealEnclosure], threshold,
               budget: Optional[int] = None, label="value") -> int:
    """Certified sign of (x - threshold): -1, 0, or +1.

    `refine` maps a target width to an enclosure of x.  Refinement proceeds
    through a geometric width schedule; 0 is returned only when an exact
    (degenerate) enclosure hits the threshold.  Raises UndecidableError once
    the budget is exhausted with the threshold still inside the enclosure.
    """
    t = Fraction(threshold)
    if budget is None:
        budget = refinement_budget()
    width = Fraction(1, 10 ** 9)
    for _ in range(budget):
        e = refine(width)
        if e.hi < t:
            return -1
        if e.lo > t:
            return +1
        if e.is_exact and e.lo == t:
            return 0
        width = width * width
    raise UndecidableError(
        f"undecidable at budget: {label} vs {t}", items=[label])
