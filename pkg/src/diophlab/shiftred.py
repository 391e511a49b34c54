"""Shift-reduced fractions and the shift-sensitive totient.

A pair (a, n) is shift-reduced for a shift gamma and exponent eta when
gcd(q_t * a + c_t, n) = 1, where c_t / q_t is the convergent of gamma with
the largest denominator satisfying q_t <= n^eta.  With gamma = 0 the anchor
is 0/1 and the notion collapses to ordinary coprimality.

eta is kept rational, eta = p/D, so the defining comparison is the exact
integer check q_t^D <= n^p; no floating point enters any decision.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .contfrac import ContinuedFraction
from .numbers import ParameterError, RealSpec, Rat, tree_sum


class ShiftAnchor:
    """The maximal-denominator convergent c_t/q_t of gamma with q_t <= n^eta."""

    __slots__ = ("gamma", "eta", "n", "t", "c", "q")

    def __init__(self, gamma, eta, n, t, c, q):
        self.gamma, self.eta, self.n = gamma, eta, n
        self.t, self.c, self.q = t, c, q

    def __repr__(self):
        return f"ShiftAnchor(n={self.n}, t={self.t}, c={self.c}, q={self.q})"


def _validate_eta(eta) -> Fraction:
    eta = Fraction(eta)
    if not 0 < eta < 1:
        raise ParameterError(f"eta must lie in (0, 1), got {eta}")
    return eta


class _AnchorWalker:
    """Convergents of gamma with a monotone cursor: as n increases the
    anchor index never moves backwards, so sweeps pay O(1) per n."""

    def __init__(self, gamma, eta):
        self.eta = _validate_eta(eta)
        if isinstance(gamma, (int, Fraction)):
            gamma = Rat(gamma)
        self.gamma = gamma
        self.cf = ContinuedFraction.from_spec(gamma)
        self.t = 0

    def anchor(self, n: int) -> ShiftAnchor:
        if n < 1:
            raise ParameterError("n must be >= 1")
        p, D = self.eta.numerator, self.eta.denominator
        n_pow = n ** p

        def fits(idx):
            return self.cf.q(idx) ** D <= n_pow

        while self.t > 0 and not fits(self.t):
            self.t -= 1
        while True:
            nxt = self.cf.partial(self.t + 1)
            if nxt is None:
                break  # expansion ended: gamma equals its last convergent
            if not fits(self.t + 1):
                break
            self.t += 1
        t = self.t
        return ShiftAnchor(self.gamma, self.eta, n, t, self.cf.p(t), self.cf.q(t))


def anchor_convergent(gamma, eta, n: int) -> ShiftAnchor:
    return _AnchorWalker(gamma, eta).anchor(n)


def is_shift_reduced(a: int, n: int, gamma, eta, anchor: ShiftAnchor = None) -> bool:
    anc = anchor if anchor is not None else anchor_convergent(gamma, eta, n)
    return math.gcd(anc.q * a + anc.c, n) == 1


# ------------------------------------------------------------- the totient

def phi_shift(n: int, gamma, eta, anchor: ShiftAnchor = None) -> int:
    """#{a in [1, n] : gcd(q_t a + c_t, n) = 1}, by direct enumeration."""
    anc = anchor if anchor is not None else anchor_convergent(gamma, eta, n)
    vals = anc.q * np.arange(1, n + 1, dtype=np.int64) + anc.c
    return int(np.count_nonzero(np.gcd(vals, n) == 1))


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[i] = least prime factor of i, for 0 <= i <= limit (spf[0..1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i:limit + 1:i][spf[i:limit + 1:i] == 0] = i
    return spf


def factorize(n: int, budget: int = 10 ** 12):
    """Distinct prime factors of n by trial division; n <= budget."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if n > budget:
        raise ParameterError(f"n = {n} exceeds the factorisation budget")
    primes = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        primes.append(m)
    return primes


def totient(n: int) -> int:
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result


def phi_shift_closed(n: int, gamma, eta, anchor: ShiftAnchor = None) -> int:
    """Closed form n * prod_{p | n, p not | q_t} (1 - 1/p).

    Why only the primes away from q_t matter: modulo such a prime p the map
    a -> q_t a + c_t is a bijection on residues, so exactly one class in p
    is excluded; for p | q_t the value is congruent to c_t, which is a unit
    mod p because gcd(c_t, q_t) = 1, so nothing is excluded.
    """
    anc = anchor if anchor is not None else anchor_convergent(gamma, eta, n)
    result = n
    for p in factorize(n):
        if anc.q % p != 0:
            result = result // p * (p - 1)
    return result


def phi_sweep(gamma, eta, n_max: int):
    """Rows (n, totient, phi_shift, q_t, c_t) for n = 1..n_max, with the
    enumeration count cross-checked against the closed form on every row."""
    walker = _AnchorWalker(gamma, eta)
    spf = smallest_prime_factors(n_max)
    rows = []
    for n in range(1, n_max + 1):
        anc = walker.anchor(n)
        enum = phi_shift(n, gamma, eta, anchor=anc)
        # closed form using the sieve for distinct primes
        closed, m, tot = n, n, n
        while m > 1:
            p = int(spf[m])
            tot = tot // p * (p - 1)
            if anc.q % p != 0:
                closed = closed // p * (p - 1)
            while m % p == 0:
                m //= p
        if enum != closed:
            raise ArithmeticError(
                f"closed form disagrees with enumeration at n = {n}: "
                f"{closed} vs {enum}")
        rows.append((n, tot, enum, anc.q, anc.c))
    return rows


# ----------------------------------------------------------- series helper

def ds_series_partial(psi, n_max: int) -> Fraction:
    """Exact partial sum of psi(n) * totient(n) / n for n <= n_max."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    spf = smallest_prime_factors(n_max)
    terms = []
    for n in range(1, n_max + 1):
        tot, m = n, n
        while m > 1:
            p = int(spf[m])
            tot = tot // p * (p - 1)
            while m % p == 0:
                m //= p
        val = Fraction(psi(n))
        if val:
            terms.append(val * tot / n)
    return tree_sum(terms)
