"""Circle gaps of {0, {alpha}, ..., {m alpha}, 1}: decomposition, the
four-case largest-gap formula, the sorting oracle, and small shifts."""

import decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophlab.contfrac import ContinuedFraction
from diophlab.numbers import (ParameterError, as_real_spec,
                              dist_nearest_integer)
from diophlab.threegap import (brute_gap_forms, brute_gaps,
                               brute_largest_gap_form, distinct_gap_forms,
                               find_small_shift, form_cmp, gap_decomposition,
                               largest_gap, largest_gap_form,
                               small_shift_brute, sweep_largest_gap_agreement)

GOLDEN = ContinuedFraction.from_rule("golden")
SQRT2 = ContinuedFraction.from_rule("sqrt2")


# ------------------------------------------------------------ decomposition

@pytest.mark.parametrize("cf", [GOLDEN, SQRT2,
                                ContinuedFraction.from_rule("const:0:3")])
def test_decomposition_bounds_and_reconstruction(cf):
    for m in range(1, 400):
        d = gap_decomposition(m, cf)
        k, r, s = d
        assert 1 <= r <= cf.require_partial(k + 1)
        assert 0 <= s <= cf.q(k) - 1
        assert r * cf.q(k) + cf.q(k - 1) + s == m


def test_decomposition_rejects_nonpositive():
    with pytest.raises(ParameterError):
        gap_decomposition(0, GOLDEN)


# ---------------------------------------------------------- formula vs oracle

@pytest.mark.parametrize("rule", ["golden", "sqrt2", "const:0:3",
                                  "randcf:threegap:5"])
def test_largest_gap_formula_matches_sort_oracle(rule):
    cf = ContinuedFraction.from_rule(rule)
    for m in range(1, 80):
        assert largest_gap_form(m, cf) == brute_largest_gap_form(m, cf)


def test_sweep_reports_no_mismatches():
    out = sweep_largest_gap_agreement(GOLDEN, 60)
    assert out["mismatches"] == []
    assert out["max_distinct"] <= 3


def test_at_most_three_distinct_gaps():
    for m in range(1, 150):
        assert len(distinct_gap_forms(m, SQRT2)) <= 3


def test_gap_forms_telescope_to_unit():
    # m+1 gaps covering [0, 1]: coefficients cancel, constants sum to 1
    for m in (1, 7, 33, 90):
        forms = brute_gap_forms(m, GOLDEN)
        assert len(forms) == m + 1
        assert sum(u for u, _ in forms) == 0
        assert sum(v for _, v in forms) == 1


def test_golden_largest_gap_value():
    # one point: {alpha} splits the circle into alpha and 1 - alpha
    assert largest_gap_form(1, GOLDEN) == (1, 0)
    decimal.getcontext().prec = 40
    phi_inv = Fraction(str((decimal.Decimal(5).sqrt() - 1) / 2))
    e = largest_gap(17, GOLDEN)
    assert largest_gap_form(17, GOLDEN) == (5, -3)
    # with alpha = phi - 1 the gap 5*alpha - 3 equals phi^-5
    assert e.contains(phi_inv ** 5) or abs(e.mid - phi_inv ** 5) < Fraction(1, 10 ** 30)


def test_largest_gap_needs_irrational():
    with pytest.raises(ParameterError):
        largest_gap(5, ContinuedFraction.from_quotients([0, 3]))
    with pytest.raises(ParameterError):
        sweep_largest_gap_agreement(ContinuedFraction.from_quotients([0, 3]), 5)


# ------------------------------------------------------------- rational route

def test_rational_gaps_collapse_to_equal_parts():
    cf = ContinuedFraction.from_quotients([0, 7])  # 1/7
    gaps = brute_gaps(10, cf)
    assert len(gaps) == 7
    assert all(g.is_exact and g.lo == Fraction(1, 7) for g in gaps)


def test_rational_gaps_small_orbit():
    gaps = brute_gaps(2, ContinuedFraction.from_quotients([0, 3]))  # 1/3
    assert [g.lo for g in gaps] == [Fraction(1, 3)] * 3


def test_irrational_gaps_sum_to_one():
    gaps = brute_gaps(19, SQRT2)
    total = gaps[0]
    for g in gaps[1:]:
        total = total + g
    assert total.contains(1)


# ----------------------------------------------------------- form comparison

def test_form_cmp_integer_pairs():
    assert form_cmp(GOLDEN, (1, 0), (1, 0)) == 0
    assert form_cmp(GOLDEN, (1, 0), (0, 0)) == 1   # alpha > 0
    assert form_cmp(GOLDEN, (1, -1), (0, 0)) == -1  # alpha < 1
    # golden - 1/2 > 0 but golden - 2/3 < 0
    assert form_cmp(GOLDEN, (2, -1), (0, 0)) == 1
    assert form_cmp(GOLDEN, (3, -2), (0, 0)) == -1


def test_form_cmp_rational_exact_tie():
    cf = ContinuedFraction.from_quotients([3, 7])  # 22/7
    assert form_cmp(cf, (7, -22), (0, 0)) == 0
    assert form_cmp(cf, (7, -21), (0, 0)) == 1


# --------------------------------------------------------------- small shifts

def _check_shift(b, t, cf, gamma):
    qt = cf.q(t)
    assert 1 <= b <= qt
    alpha = cf.enclose(Fraction(1, 10 ** 24))
    g = gamma.enclose(Fraction(1, 10 ** 24))
    d = dist_nearest_integer(alpha * b - g)
    assert d.hi <= Fraction(2, qt)


@pytest.mark.parametrize("cf,gamma,t", [
    (SQRT2, as_real_spec(Fraction(1, 3)), 4),
    (SQRT2, as_real_spec("golden"), 5),
    (GOLDEN, as_real_spec(Fraction(22, 7)), 6),
    (GOLDEN, as_real_spec(Fraction(0)), 3),
])
def test_find_small_shift_certified(cf, gamma, t):
    _check_shift(find_small_shift(t, cf, gamma), t, cf, gamma)
    _check_shift(small_shift_brute(t, cf, gamma), t, cf, gamma)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=6),
       st.fractions(min_value=0, max_value=1, max_denominator=64))
def test_small_shift_routes_agree_on_bound(t, g):
    gamma = as_real_spec(g)
    _check_shift(find_small_shift(t, SQRT2, gamma), t, SQRT2, gamma)
