"""Continued fractions: expansions, convergents, the signed error sequence
D_j = q_j*alpha - p_j, and finite-depth growth-exponent estimates.

Conventions.  A finite expansion [a_0; a_1, ..., a_t] produced by
cf_of_rational always has a_t > 1 (unless t = 0), which makes rational
expansions unique.  Hand-built finite lists may violate that convention;
they still evaluate correctly.  The index convention for denominators is
q_{-1} = 0, q_0 = 1, q_{j+1} = a_{j+1} q_j + q_{j-1}.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from .numbers import (BigRational, CFSpec, DepthError, ParameterError,
                      PrecisionError, Rat, RealEnclosure, RealSpec, Surd,
                      cf_rule, evaluate_cf)


class ContinuedFraction:
    """Partial quotients plus a lazily grown convergent table."""

    def __init__(self, spec: CFSpec):
        if not isinstance(spec, CFSpec):
            raise ParameterError("ContinuedFraction wraps a quotient spec")
        self.spec = spec
        self._p = []  # p_0, p_1, ...
        self._q = []

    # ------------------------------------------------------- constructors

    @classmethod
    def from_quotients(cls, quotients) -> "ContinuedFraction":
        return cls(CFSpec(quotients=list(quotients)))

    @classmethod
    def from_rule(cls, rule_id: str) -> "ContinuedFraction":
        return cls(cf_rule(rule_id))

    @classmethod
    def from_spec(cls, spec: RealSpec) -> "ContinuedFraction":
        if isinstance(spec, CFSpec):
            return cls(spec)
        if isinstance(spec, Rat):
            return cf_of_rational(spec.value)
        if isinstance(spec, Surd):
            return cls(surd_cf_spec(spec))
        raise ParameterError(f"no quotient expansion for spec {spec!r}")

    # ------------------------------------------------------------ queries

    def partial(self, j: int) -> Optional[int]:
        return self.spec.partial(j)

    def require_partial(self, j: int) -> int:
        a = self.partial(j)
        if a is None:
            if self.is_finite:
                raise DepthError(
                    f"index {j} exceeds finite expansion of length {self.length - 1}")
            raise DepthError(f"quotient stream tail unknown at index {j}")
        return a

    @property
    def is_finite(self) -> bool:
        return self.spec.is_finite()

    @property
    def length(self) -> int:
        """Number of known quotients for finite expansions."""
        if not self.is_finite:
            raise ParameterError("infinite expansion has no length")
        return len(self.spec.quotients)

    @property
    def is_canonical(self) -> bool:
        """Finite expansions: the uniqueness convention a_t > 1 (or t = 0)."""
        if not self.is_finite:
            return True
        qs = self.spec.quotients
        return len(qs) == 1 or qs[-1] > 1

    def value(self) -> Fraction:
        return self.spec.exact_value()

    def enclose(self, target_width) -> RealEnclosure:
        return self.spec.enclose(target_width)

    # -------------------------------------------------------- convergents

    def _grow(self, j: int) -> bool:
        """Extend the cached (p, q) table through index j; False if the
        expansion ends or the stream tail is unknown before j."""
        while len(self._p) <= j:
            idx = len(self._p)
            a = self.partial(idx)
            if a is None:
                return False
            if idx == 0:
                self._p.append(a)
                self._q.append(1)
            else:
                p_prev = self._p[idx - 2] if idx >= 2 else 1
                q_prev = self._q[idx - 2] if idx >= 2 else 0
                self._p.append(a * self._p[idx - 1] + p_prev)
                self._q.append(a * self._q[idx - 1] + q_prev)
        return True

    def p(self, j: int) -> int:
        if j == -1:
            return 1
        if not self._grow(j):
            self.require_partial(j)
        return self._p[j]

    def q(self, j: int) -> int:
        if j == -1:
            return 0
        if not self._grow(j):
            self.require_partial(j)
        return self._q[j]

    def convergent(self, j: int) -> Fraction:
        return Fraction(self.p(j), self.q(j))

    def enclosure_at_depth(self, j: int) -> RealEnclosure:
        """Bracket of the value by the convergents at depths j and j+1."""
        a = Fraction(self.p(j), self.q(j))
        if self.partial(j + 1) is None and self.is_finite:
            return RealEnclosure(a, a)
        b = Fraction(self.p(j + 1), self.q(j + 1))
        return RealEnclosure(min(a, b), max(a, b))

    def __repr__(self):
        if self.is_finite:
            return f"ContinuedFraction({list(self.spec.quotients)})"
        return f"ContinuedFraction(rule={self.spec.rule_id!r})"


# ----------------------------------------------------------------- builders

def cf_of_rational(r) -> ContinuedFraction:
    """Canonical expansion of a rational: Euclidean algorithm, and the last
    quotient is made > 1 by the rewrite [..., a, 1] -> [..., a+1]."""
    r = Fraction(r)
    num, den = r.numerator, r.denominator
    quotients = []
    while True:
        a, rem = divmod(num, den)
        quotients.append(a)
        if rem == 0:
            break
        num, den = den, rem
    if len(quotients) > 1 and quotients[-1] == 1:
        quotients.pop()
        quotients[-1] += 1
    return ContinuedFraction.from_quotients(quotients)


def surd_cf_spec(spec: Surd) -> CFSpec:
    """Quotient stream of a quadratic surd a + b*sqrt(D).

    Writes the value as (P + sqrt(N)) / Q with integers P, Q, N and iterates
    the classical step a = floor((P + sqrt(N))/Q), P' = aQ - P,
    Q' = (N - P'^2)/Q, keeping Q | (N - P^2) by pre-scaling.  All floors are
    exact integer square-root computations.
    """
    a, b, d = spec.a, spec.b, spec.d
    if b == 0:
        raise ParameterError("rational value; use cf_of_rational")
    # (u + v*sqrt(D)) / w with integers, w > 0
    den = math.lcm(a.denominator, b.denominator)
    u = a.numerator * (den // a.denominator)
    v = b.numerator * (den // b.denominator)
    w = den
    if v < 0:
        # u + v sqrt(D) = (-u + sqrt(D v^2)) / -1 scaled below
        p0, q0, n0 = -u, -w, d * v * v
    else:
        p0, q0, n0 = u, w, d * v * v
    if (n0 - p0 * p0) % q0 != 0:
        p0, n0, q0 = p0 * abs(q0), n0 * q0 * q0, q0 * abs(q0)

    def isqrt_floor(n):
        return math.isqrt(n)

    cache = []

    def rule(j, _state={"P": p0, "Q": q0, "N": n0}):
        while len(cache) <= j:
            P, Q, N = _state["P"], _state["Q"], _state["N"]
            s = isqrt_floor(N)
            if Q > 0:
                aj = (P + s) // Q
            else:
                aj = (-P - s - 1) // (-Q)  # floor with sqrt(N) irrational
            cache.append(aj)
            P2 = aj * Q - P
            _state.update(P=P2, Q=(N - P2 * P2) // Q, N=N)
        return cache[j]

    return CFSpec(rule=rule)


# -------------------------------------------------------------- convergents

class ConvergentTable:
    """Rows (j, p_j, q_j) for j = 0..J."""

    def __init__(self, cf: ContinuedFraction, rows):
        self.cf = cf
        self.rows = list(rows)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def q_list(self):
        return [q for (_, _, q) in self.rows]

    def p_list(self):
        return [p for (_, p, _) in self.rows]


def convergents(cf: ContinuedFraction, J: int) -> ConvergentTable:
    if J < 0:
        raise ParameterError("depth must be >= 0")
    cf.p(J)  # raises DepthError when the expansion is shorter
    return ConvergentTable(cf, [(j, cf.p(j), cf.q(j)) for j in range(J + 1)])


# ------------------------------------------------------------ error values

class DValue:
    """Signed error D_j = q_j*alpha - p_j with a certified enclosure.

    For irrational alpha the sign is (-1)^j and 1/2 <= |D_j| q_{j+1} <= 1.
    For a finite expansion of length t the same holds for j < t, while
    D_t = 0 exactly (sign 0).
    """

    __slots__ = ("j", "enclosure", "sign", "q_next")

    def __init__(self, j, enclosure, sign, q_next):
        self.j = j
        self.enclosure = enclosure
        self.sign = sign
        self.q_next = q_next

    def abs_enclosure(self) -> RealEnclosure:
        return self.enclosure.abs()

    def __repr__(self):
        return f"DValue(j={self.j}, sign={self.sign}, {self.enclosure!r})"


def d_value(cf: ContinuedFraction, j: int, width=Fraction(1, 10 ** 30),
            certify: bool = True) -> DValue:
    """Enclosure of D_j = q_j*alpha - p_j at the requested width.

    With certify=True the bound 1/2 <= |D_j| q_{j+1} <= 1 and the sign
    (-1)^j are verified from the enclosure; failure to separate raises
    PrecisionError.
    """
    width = Fraction(width)
    if width <= 0:
        raise ParameterError("width must be positive")
    qj, pj = cf.q(j), cf.p(j)
    if cf.is_finite and j == cf.length - 1:
        enc = RealEnclosure.exact(0)
        return DValue(j, enc, 0, None)
    alpha = cf.enclose(width / max(qj, 1))
    enc = alpha * qj - pj
    q_next = cf.q(j + 1)
    expected_sign = 1 if j % 2 == 0 else -1
    if certify:
        if not (enc.lo > 0 if expected_sign > 0 else enc.hi < 0):
            raise PrecisionError(f"sign of D_{j} not separated at width {width}",
                                 best=enc)
        prod = enc.abs() * q_next
        if not (prod.lo >= Fraction(1, 2) and prod.hi <= 1):
            raise PrecisionError(
                f"|D_{j}| q_{j + 1} in {prod!r} not certified inside [1/2, 1]",
                best=enc)
    return DValue(j, enc, expected_sign, q_next)


# --------------------------------------------------------- growth estimate

def omega_estimate(cf: ContinuedFraction, J: int) -> BigRational:
    """Finite-depth lower estimate of the denominator growth exponent
    limsup_k log q_{k+1} / log q_k.

    Returns the maximum of log q_{k+1}/log q_k over the top-half window
    ceil(J/2) <= k < J (indices with q_k >= 2).  Early indices are warm-up
    (q_1 may equal 1 and tiny q make the ratio meaningless), so the window
    tracks tail growth; the result is a finite-depth lower proxy for the
    limsup, never a claim about its value.  Logs are 64-bit on big
    integers; absolute error is below 1e-9, far under any gap this
    estimate is used to detect.
    """
    if J < 2:
        raise ParameterError("need depth J >= 2")
    cf.q(J)
    lo_k = max(1, (J + 1) // 2)
    best = None
    for k in range(lo_k, J):
        qk = cf.q(k)
        if qk < 2:
            continue
        ratio = math.log(cf.q(k + 1)) / math.log(qk)
        if best is None or ratio > best:
            best = ratio
    if best is None:
        for k in range(1, J):
            if cf.q(k) >= 2:
                r = math.log(cf.q(k + 1)) / math.log(cf.q(k))
                best = r if best is None else max(best, r)
    if best is None:
        return Fraction(1)
    return Fraction(best)


# ----------------------------------------------------------------- CSV rows

def table_rows(cf: ContinuedFraction, J: int, width=Fraction(1, 10 ** 30)):
    """Rows (j, p_j, q_j, D_j_lo, D_j_hi) for the table dump."""
    out = []
    for j in range(J + 1):
        dv = d_value(cf, j, width, certify=False)
        out.append((j, cf.p(j), cf.q(j), dv.enclosure.lo, dv.enclosure.hi))
    return out
