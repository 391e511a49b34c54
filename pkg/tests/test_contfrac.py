"""Continued fractions: recursion, rational expansions, surd streams,
signed errors, and the growth-exponent estimate."""

import decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diophlab.contfrac import (ContinuedFraction, cf_of_rational, convergents,
                               d_value, omega_estimate, surd_cf_spec,
                               table_rows)
from diophlab.numbers import (DepthError, ParameterError, PrecisionError,
                              Surd)


def _dec_sqrt(n, prec=60):
    decimal.getcontext().prec = prec
    return Fraction(str(decimal.Decimal(n).sqrt()))


# ----------------------------------------------------------- construction

def test_known_streams():
    assert [ContinuedFraction.from_rule("sqrt2").require_partial(j)
            for j in range(5)] == [1, 2, 2, 2, 2]
    assert [ContinuedFraction.from_rule("golden").require_partial(j)
            for j in range(5)] == [0, 1, 1, 1, 1]


def test_finite_expansion_properties():
    cf = ContinuedFraction.from_quotients([0, 1, 1, 1])
    assert cf.is_finite
    assert cf.length == 4
    assert not cf.is_canonical  # trailing 1
    assert cf.value() == Fraction(2, 3)
    with pytest.raises(DepthError):
        cf.require_partial(4)


def test_infinite_expansion_has_no_length():
    cf = ContinuedFraction.from_rule("golden")
    assert not cf.is_finite
    with pytest.raises(ParameterError):
        cf.length


@given(st.fractions(min_value=-50, max_value=50, max_denominator=10 ** 6))
def test_cf_of_rational_roundtrip(r):
    cf = cf_of_rational(r)
    assert cf.value() == r
    assert cf.is_canonical
    for j in range(1, cf.length):
        assert cf.require_partial(j) >= 1


def test_cf_of_rational_canonical_rewrite():
    # 2/3 = [0; 1, 2] canonically, never [0; 1, 1, 1]
    cf = cf_of_rational(Fraction(2, 3))
    assert [cf.partial(j) for j in range(cf.length)] == [0, 1, 2]


# ----------------------------------------------------------- convergents

def test_convergent_recursion_and_unimodularity():
    cf = ContinuedFraction.from_rule("sqrt2")
    for j in range(2, 20):
        a = cf.require_partial(j)
        assert cf.q(j) == a * cf.q(j - 1) + cf.q(j - 2)
        assert cf.p(j) == a * cf.p(j - 1) + cf.p(j - 2)
        assert cf.p(j) * cf.q(j - 1) - cf.p(j - 1) * cf.q(j) == (-1) ** (j + 1)


def test_golden_denominators_are_fibonacci():
    table = convergents(ContinuedFraction.from_rule("golden"), 10)
    assert table.q_list() == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_convergents_validates_depth():
    with pytest.raises(ParameterError):
        convergents(ContinuedFraction.from_rule("golden"), -1)
    with pytest.raises(DepthError):
        convergents(ContinuedFraction.from_quotients([0, 2, 3]), 5)


def test_enclosure_at_depth_brackets_value():
    cf = ContinuedFraction.from_rule("sqrt2")
    ref = _dec_sqrt(2)
    for j in range(1, 12):
        e = cf.enclosure_at_depth(j)
        assert e.contains(ref)
        assert e.width == Fraction(1, cf.q(j) * cf.q(j + 1))


def test_enclose_meets_width():
    cf = ContinuedFraction.from_rule("sqrt2")
    e = cf.enclose(Fraction(1, 10 ** 45))
    assert e.width <= Fraction(1, 10 ** 45)
    assert e.contains(_dec_sqrt(2))


# ------------------------------------------------------------------ surds

@pytest.mark.parametrize("a,b,d,prefix", [
    (0, 1, 2, [1, 2, 2, 2, 2, 2]),
    (0, 1, 3, [1, 1, 2, 1, 2, 1]),
    (Fraction(1, 2), Fraction(1, 2), 5, [1, 1, 1, 1, 1, 1]),
    (2, -1, 2, [0, 1, 1, 2, 2, 2]),
])
def test_surd_streams(a, b, d, prefix):
    spec = surd_cf_spec(Surd(a, b, d))
    assert [spec.partial(j) for j in range(len(prefix))] == prefix


@given(st.integers(min_value=2, max_value=80))
def test_surd_stream_converges_to_value(d):
    if int(d ** 0.5) ** 2 == d:
        return
    spec = surd_cf_spec(Surd(0, 1, d))
    cf = ContinuedFraction(spec)
    ref = _dec_sqrt(d)
    e = cf.enclosure_at_depth(8)
    assert e.contains(ref)


def test_surd_rejects_rational():
    with pytest.raises(ParameterError):
        surd_cf_spec(Surd(3, 0, 2))


# ---------------------------------------------------------- signed errors

def test_d_value_law_and_signs():
    cf = ContinuedFraction.from_rule("sqrt2")
    g = _dec_sqrt(2, prec=80)
    for j in range(18):
        dv = d_value(cf, j)
        assert dv.sign == (1 if j % 2 == 0 else -1)
        assert dv.enclosure.contains(cf.q(j) * g - cf.p(j))
        prod = dv.abs_enclosure() * dv.q_next
        assert prod.lo >= Fraction(1, 2) and prod.hi <= 1


def test_d_value_finite_tail_is_zero():
    cf = ContinuedFraction.from_quotients([0, 3, 2])
    dv = d_value(cf, 2)
    assert dv.sign == 0
    assert dv.enclosure.is_exact and dv.enclosure.lo == 0


def test_d_value_rejects_bad_width():
    cf = ContinuedFraction.from_rule("golden")
    with pytest.raises(ParameterError):
        d_value(cf, 3, width=0)


def test_table_rows_shape():
    rows = table_rows(ContinuedFraction.from_rule("golden"), 4)
    assert [r[:3] for r in rows] == [
        (0, 0, 1), (1, 1, 1), (2, 1, 2), (3, 2, 3), (4, 3, 5)]
    for _, p, q, lo, hi in rows:
        assert lo <= hi


# -------------------------------------------------------- growth estimate

def test_omega_estimate_bounded_quotients_near_one():
    cf = ContinuedFraction.from_rule("golden")
    est = omega_estimate(cf, 30)
    assert Fraction(9, 10) < est < Fraction(11, 10)


def test_omega_estimate_detects_spikes():
    # a huge quotient deep in the window forces a large ratio
    quots = [0] + [2] * 10 + [10 ** 40] + [2] * 4
    cf = ContinuedFraction.from_quotients(quots)
    assert omega_estimate(cf, 14) > 3


def test_omega_estimate_needs_depth():
    with pytest.raises(ParameterError):
        omega_estimate(ContinuedFraction.from_rule("golden"), 1)
