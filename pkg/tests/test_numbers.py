"""Enclosure arithmetic, certified logs/powers, and real-number specs."""

import decimal
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophlab.numbers import (CFSpec, ParameterError, Rat, RealEnclosure,
                              Surd, UndecidableError, as_real_spec, cf_rule,
                              convergent_pairs, decide_cmp,
                              dist_nearest_integer, evaluate_cf,
                              integer_nth_root, log_enclosure,
                              paper_log_enclosure, rational_power_enclosure,
                              refinement_budget, spec_from_json, tree_sum)

fractions_small = st.fractions(min_value=-100, max_value=100,
                               max_denominator=1000)


def enc_and_point():
    """An enclosure together with a rational point inside it."""
    return st.tuples(fractions_small, fractions_small, fractions_small).map(
        lambda t: (RealEnclosure(min(t[0], t[1]), max(t[0], t[1])),
                   min(t[0], t[1])
                   + (max(t[0], t[1]) - min(t[0], t[1])) * (t[2] + 100) / 200))


# ------------------------------------------------------------- enclosures

def test_enclosure_basics():
    e = RealEnclosure(Fraction(1, 3), Fraction(1, 2))
    assert e.width == Fraction(1, 6)
    assert e.mid == Fraction(5, 12)
    assert not e.is_exact
    assert e.contains(Fraction(2, 5))
    assert not e.contains(Fraction(2))
    x = RealEnclosure.exact(7)
    assert x.is_exact and x.lo == x.hi == 7


def test_enclosure_rejects_inverted():
    with pytest.raises(ParameterError):
        RealEnclosure(Fraction(1), Fraction(0))


def test_enclosure_is_immutable():
    e = RealEnclosure.exact(1)
    with pytest.raises(AttributeError):
        e.lo = Fraction(0)


@given(enc_and_point(), enc_and_point())
def test_enclosure_arithmetic_contains_pointwise(ap, bp):
    (a, x), (b, y) = ap, bp
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert (-a).contains(-x)
    assert a.abs().contains(abs(x))


@given(enc_and_point(), st.integers(min_value=0, max_value=5))
def test_enclosure_pow_contains_pointwise(ap, k):
    a, x = ap
    assert (a ** k).contains(x ** k)


@given(enc_and_point())
def test_enclosure_reciprocal(ap):
    a, x = ap
    if a.lo > 0 or a.hi < 0:
        assert a.reciprocal().contains(1 / x) or x == 0
    else:
        with pytest.raises(ParameterError):
            a.reciprocal()


def test_hull():
    h = RealEnclosure.hull(RealEnclosure.exact(1), RealEnclosure.exact(5),
                           RealEnclosure(Fraction(2), Fraction(3)))
    assert (h.lo, h.hi) == (1, 5)


@given(enc_and_point())
def test_dist_nearest_integer_contains(ap):
    a, x = ap
    d = dist_nearest_integer(a)
    assert d.lo >= 0
    assert d.contains(abs(x - round(x)) if x != round(x) + Fraction(1, 2)
                      else Fraction(1, 2))


def test_dist_nearest_integer_values():
    assert dist_nearest_integer(RealEnclosure.exact(Fraction(7, 2))) \
        == RealEnclosure.exact(Fraction(1, 2))
    assert dist_nearest_integer(RealEnclosure.exact(Fraction(-13, 4))) \
        == RealEnclosure.exact(Fraction(1, 4))
    assert dist_nearest_integer(RealEnclosure.exact(5)) \
        == RealEnclosure.exact(0)
    # an interval spanning an integer reaches 0
    d = dist_nearest_integer(RealEnclosure(Fraction(9, 10), Fraction(11, 10)))
    assert d.lo == 0 and d.hi == Fraction(1, 10)


# ---------------------------------------------------------------- tree sum

@given(st.lists(st.fractions(max_denominator=10 ** 6), max_size=60))
def test_tree_sum_matches_builtin(vals):
    assert tree_sum(vals) == sum(vals, Fraction(0))


def test_tree_sum_empty():
    assert tree_sum([]) == 0


# ------------------------------------------------------------------- logs

def _decimal_ln(x: Fraction) -> Fraction:
    decimal.getcontext().prec = 60
    d = decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)
    return Fraction(str(d.ln()))


@given(st.fractions(min_value=Fraction(1, 10 ** 9), max_value=10 ** 9,
                    max_denominator=10 ** 9))
def test_log_enclosure_contains_reference(x):
    assert log_enclosure(x).contains(_decimal_ln(x))


def test_log_enclosure_huge_arguments():
    x = Fraction(10 ** 400, 7)
    e = log_enclosure(x)
    assert e.contains(_decimal_ln(x))
    assert float(e.width) < 1e-9


def test_log_enclosure_rejects_nonpositive():
    with pytest.raises(ParameterError):
        log_enclosure(0)
    with pytest.raises(ParameterError):
        log_enclosure(Fraction(-3, 2))


def test_paper_log_floor():
    assert paper_log_enclosure(2) == RealEnclosure.exact(1)
    e = paper_log_enclosure(100)
    assert e.contains(_decimal_ln(Fraction(100)))
    assert e.lo > 1


# ------------------------------------------------------------------ powers

@given(st.integers(min_value=0, max_value=10 ** 12),
       st.integers(min_value=1, max_value=6))
def test_integer_nth_root(x, n):
    r = integer_nth_root(x, n)
    assert r ** n <= x < (r + 1) ** n


def test_integer_nth_root_exact_cube():
    assert integer_nth_root(10 ** 30, 3) == 10 ** 10


@given(st.integers(min_value=1, max_value=50),
       st.fractions(min_value=-3, max_value=3, max_denominator=7))
def test_rational_power_enclosure(base, exponent):
    width = Fraction(1, 10 ** 12)
    e = rational_power_enclosure(base, exponent, width)
    assert e.width <= width
    decimal.getcontext().prec = 60
    ref = Fraction(str(decimal.Decimal(base)
                       ** (decimal.Decimal(exponent.numerator)
                           / decimal.Decimal(exponent.denominator))))
    # the reference itself is truncated to 60 digits; allow it that slack
    pad = Fraction(1, 10 ** 40)
    assert e.lo - pad <= ref <= e.hi + pad


# ---------------------------------------------------------------- resolve

def test_decide_cmp_separates():
    target = Fraction(1, 3)
    refine = lambda w: RealEnclosure(target - w / 2, target + w / 2)
    assert decide_cmp(refine, Fraction(1, 4)) == 1
    assert decide_cmp(refine, Fraction(1, 2)) == -1


def test_decide_cmp_exact_hit():
    refine = lambda w: RealEnclosure.exact(Fraction(2, 7))
    assert decide_cmp(refine, Fraction(2, 7)) == 0


def test_decide_cmp_exhausts_budget():
    stuck = lambda w: RealEnclosure(Fraction(0), Fraction(1))
    with pytest.raises(UndecidableError):
        decide_cmp(stuck, Fraction(1, 2), budget=5)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("DIOPHLAB_BUDGET", "17")
    assert refinement_budget() == 17
    monkeypatch.setenv("DIOPHLAB_BUDGET", "not a number")
    with pytest.raises(ParameterError):
        refinement_budget()


# ----------------------------------------------------------- convergents

def test_convergent_pairs_recursion():
    quots = [0, 2, 2, 2, 2, 2]
    pairs = list(convergent_pairs(quots))
    ps = [p for _, p, q in pairs]
    qs = [q for _, p, q in pairs]
    assert qs == [1, 2, 5, 12, 29, 70]
    for k in range(2, len(quots)):
        assert qs[k] == quots[k] * qs[k - 1] + qs[k - 2]
        assert ps[k] == quots[k] * ps[k - 1] + ps[k - 2]
        # consecutive convergents are unimodular
        assert ps[k] * qs[k - 1] - ps[k - 1] * qs[k] == (-1) ** (k + 1)


def test_evaluate_cf():
    assert evaluate_cf([0, 1, 1, 1]) == Fraction(2, 3)
    assert evaluate_cf([3, 7]) == Fraction(22, 7)
    assert evaluate_cf([2]) == 2


# ------------------------------------------------------------------ specs

def test_rat_spec():
    r = Rat(Fraction(22, 7))
    assert r.is_rational()
    assert r.exact_value() == Fraction(22, 7)
    e = r.enclose(Fraction(1, 10 ** 30))
    assert e.is_exact and e.lo == Fraction(22, 7)


def test_surd_sqrt2():
    s = Surd(0, 1, 2)
    e = s.enclose(Fraction(1, 10 ** 40))
    assert e.width <= Fraction(1, 10 ** 40)
    decimal.getcontext().prec = 60
    assert e.contains(Fraction(str(decimal.Decimal(2).sqrt())))


def test_surd_rejects_square_free_violations():
    with pytest.raises(ParameterError):
        Surd(0, 1, 4)


def test_cfspec_finite_is_rational():
    s = CFSpec(quotients=[0, 1, 1, 1])
    assert s.is_finite() and s.is_rational()
    assert s.exact_value() == Fraction(2, 3)


def test_golden_rule_convergents():
    spec = cf_rule("golden")
    assert [spec.partial(j) for j in range(6)] == [0, 1, 1, 1, 1, 1]
    e = spec.enclose(Fraction(1, 10 ** 30))
    # golden - 1 solves x^2 + x - 1 = 0
    val = e.lo * e.lo + e.lo - 1
    assert abs(val) < Fraction(1, 10 ** 28)


def test_sqrt2_rule_quotients():
    spec = cf_rule("sqrt2")
    assert [spec.partial(j) for j in range(5)] == [1, 2, 2, 2, 2]


def test_randcf_rule_is_deterministic_and_bounded():
    a = cf_rule("randcf:seedx:6")
    b = cf_rule("randcf:seedx:6")
    for j in range(1, 40):
        assert a.partial(j) == b.partial(j)
        assert 1 <= a.partial(j) <= 6
    assert a.partial(0) == 0


def test_spec_json_roundtrip():
    for spec in (Rat(Fraction(-5, 3)), Surd(Fraction(1, 2), Fraction(1, 2), 5),
                 CFSpec(quotients=[0, 2, 1, 3]), cf_rule("golden")):
        again = spec_from_json(json.dumps(spec.to_json()))
        w = Fraction(1, 10 ** 20)
        assert again.enclose(w).intersects(spec.enclose(w))


def test_spec_from_json_rejects_junk():
    with pytest.raises(ParameterError):
        spec_from_json({"rational": "1/2", "cf": [0, 1]})
    with pytest.raises(ParameterError):
        spec_from_json({"mystery": 3})


def test_as_real_spec_coercions():
    assert as_real_spec("sqrt2") is not None
    assert as_real_spec(Fraction(1, 3)).exact_value() == Fraction(1, 3)
    assert as_real_spec("22/7").exact_value() == Fraction(22, 7)
    s = as_real_spec("golden")
    assert as_real_spec(s) is s
