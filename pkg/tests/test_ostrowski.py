"""Digit expansions in the convergent-denominator scale: encode/decode,
digit constraints, cylinders, shift digits, and the two distance routes."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophlab.contfrac import ContinuedFraction
from diophlab.numbers import DepthError, ParameterError
from diophlab.ostrowski import (DigitConstraintError, GammaDigits,
                                OstrowskiDigits, certify_dandy_pair,
                                cylinder_elements, dandy_check,
                                gamma_from_digits, ostrowski_decode,
                                ostrowski_encode, pair_from_json,
                                sharpness_construct, sigma_decompose,
                                sigma_sweep, sud_partial_sum, validate_digits)

GOLDEN = ContinuedFraction.from_rule("golden")
SQRT2 = ContinuedFraction.from_rule("sqrt2")
C100 = ContinuedFraction.from_rule("const:0:100")


# ------------------------------------------------------------ encode/decode

@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=50000),
       st.sampled_from(["sqrt2", "golden", "const:0:3"]))
def test_roundtrip(n, rule):
    cf = ContinuedFraction.from_rule(rule)
    d = ostrowski_encode(n, cf)
    assert ostrowski_decode(d) == n
    assert d.digits[-1] >= 1  # greedy: top digit is live
    validate_digits(cf, d.digits)


def test_known_digit_strings():
    assert ostrowski_encode(4, GOLDEN).digits == (0, 1, 0, 1)
    assert ostrowski_encode(100, SQRT2).digits == (1, 0, 0, 0, 1, 1)
    assert ostrowski_encode(1, SQRT2).digits == (1,)
    assert ostrowski_encode(2, SQRT2).digits == (0, 1)


def test_encode_rejects_nonpositive():
    with pytest.raises(ParameterError):
        ostrowski_encode(0, GOLDEN)


@pytest.mark.parametrize("digits,fragment", [
    ((), "empty"),
    ((2,), "c_1 range"),          # a_1 = 2 for sqrt2: c_1 must be < 2
    ((1, 3), "c_2 range"),        # a_2 = 2
    ((1, 2), "adjacency"),        # c_2 = a_2 needs c_1 = 0
    ((0, 2, 1, 2), "adjacency"),  # c_4 = a_4 needs c_3 = 0
    ((-1,), "c_1 range"),
])
def test_validator_names_the_rule(digits, fragment):
    with pytest.raises(DigitConstraintError) as exc:
        validate_digits(SQRT2, digits)
    assert fragment in str(exc.value)


def test_decode_validates_first():
    bad = OstrowskiDigits(SQRT2, (1, 2, 1))
    with pytest.raises(DigitConstraintError):
        ostrowski_decode(bad)


# ---------------------------------------------------------------- cylinders

def _brute_cylinder(prefix, cf, count, scan_to):
    hits = []
    for n in range(1, scan_to):
        d = ostrowski_encode(n, cf).digits
        padded = d + (0,) * (len(prefix) - len(d))
        if padded[:len(prefix)] == tuple(prefix):
            hits.append(n)
            if len(hits) == count:
                return hits
    raise AssertionError("scan range too small")


@pytest.mark.parametrize("rule,prefix", [
    ("sqrt2", (1,)),
    ("sqrt2", (1, 0)),
    ("sqrt2", (0, 2)),
    ("golden", (0, 1)),
    ("golden", (0, 0, 1)),
    ("const:0:3", (2, 0)),
    ("const:0:5", (3, 0)),
])
def test_cylinder_matches_scan(rule, prefix):
    cf = ContinuedFraction.from_rule(rule)
    got = cylinder_elements(prefix, cf, 40)
    assert got == _brute_cylinder(prefix, cf, 40, 20000)


def test_cylinder_rejects_invalid_prefix():
    with pytest.raises(DigitConstraintError):
        cylinder_elements((5,), SQRT2, 3)
    with pytest.raises(ParameterError):
        cylinder_elements((1,), SQRT2, 0)


# ------------------------------------------------------------- shift digits

def test_tail_rules():
    g = GammaDigits(C100, prefix=(7, 9), tail_rule="half")
    assert [g.b(k) for k in (1, 2, 3, 4)] == [7, 9, 50, 50]
    assert GammaDigits(C100, tail_rule="quarter").b(5) == 25
    assert GammaDigits(C100, tail_rule="const:13").b(2) == 13
    sig = GammaDigits(C100, tail_rule="sigma:01")
    # bits cycle: sigma_1 = 0 -> a//2, sigma_2 = 1 -> a//4
    assert [sig.b(k) for k in (1, 2, 3, 4)] == [50, 25, 50, 25]
    assert GammaDigits(C100).b(9) == 0


def test_bad_tail_rules():
    with pytest.raises(ParameterError):
        GammaDigits(C100, tail_rule="triple")
    with pytest.raises(ParameterError):
        GammaDigits(C100, tail_rule="sigma:")
    with pytest.raises(ParameterError):
        GammaDigits(C100, tail_rule="sigma:012")
    with pytest.raises(ParameterError):
        GammaDigits(C100).b(0)


def test_pair_json_roundtrip():
    g = GammaDigits(C100, prefix=(3,), tail_rule="sigma:01")
    cf2, g2 = pair_from_json(g.to_json())
    assert [cf2.require_partial(j) for j in range(4)] == [0, 100, 100, 100]
    assert [g2.b(k) for k in range(1, 6)] == [g.b(k) for k in range(1, 6)]


def test_gamma_of_zero_digits_is_zero():
    e = gamma_from_digits(GammaDigits(SQRT2))
    assert e.is_exact and e.lo == 0


def test_gamma_width_request_is_met():
    w = Fraction(1, 10 ** 40)
    e = gamma_from_digits(GammaDigits(C100, tail_rule="half"), w)
    assert e.width <= w
    assert 0 < e.lo and e.hi < 1


# ------------------------------------------------------------- rapid pairs

def test_dandy_check_flags_small_quotients():
    problems = dandy_check(SQRT2, GammaDigits(SQRT2, tail_rule="half"), 2)
    assert any("a_0" in p for p in problems)
    assert any("< 64" in p for p in problems)


def test_dandy_check_flags_digit_window():
    problems = dandy_check(C100, GammaDigits(C100, tail_rule="const:10"), 2)
    assert any("outside" in p for p in problems)
    assert dandy_check(C100, GammaDigits(C100, tail_rule="half"), 3) == []
    assert dandy_check(C100, GammaDigits(C100, tail_rule="quarter"), 3) == []


def test_certify_pair_bounds():
    a, g = certify_dandy_pair(C100, GammaDigits(C100, tail_rule="half"))
    assert 0 < a.lo and a.hi < Fraction(1, 64)
    assert 0 <= g.lo and g.hi < 1 - a.hi


def test_certify_pair_boundary_quotient():
    # a_1 = 64 puts the first convergent exactly on 1/64; certification
    # must still separate strictly
    c64 = ContinuedFraction.from_rule("const:0:64")
    a, g = certify_dandy_pair(c64, GammaDigits(c64, tail_rule="half"))
    assert a.hi < Fraction(1, 64)


def test_certify_pair_rejects_invalid():
    with pytest.raises(ParameterError):
        certify_dandy_pair(SQRT2, GammaDigits(SQRT2, tail_rule="half"))


def test_sharpness_schedules():
    cf, g = sharpness_construct("0", "relaxed", 3)
    assert cf.require_partial(1) == 64
    assert cf.require_partial(2) == 64 * 64 ** 3
    assert dandy_check(cf, g, 3) == []

    cf, g = sharpness_construct("10", "hybrid", 3)
    for u in (1, 2, 3):
        assert cf.require_partial(u) % 64 == 0

    with pytest.raises(DepthError):
        sharpness_construct("0", "paper", 3)
    with pytest.raises(ParameterError):
        sharpness_construct("", "relaxed", 2)
    with pytest.raises(ParameterError):
        sharpness_construct("0", "relaxed", 0)
    with pytest.raises(ParameterError):
        sharpness_construct("0", "fast", 2)


# ------------------------------------------------------------ sigma routes

def test_sigma_decompose_structure():
    pair = (C100, GammaDigits(C100, tail_rule="half"))
    for s in sigma_sweep(pair, 300):
        c = ostrowski_encode(s.n, C100).digits
        for k, dk in enumerate(s.deltas):
            ck = c[k] if k < len(c) else 0
            assert dk == ck - pair[1].b(k + 1)
        nonzero = [k for k, dk in enumerate(s.deltas) if dk != 0]
        assert s.m == nonzero[0]
        # the two routes enclose the same distance
        assert s.dist.width <= Fraction(1, 10 ** 30)
        assert s.direct.width <= Fraction(1, 10 ** 30)
        assert max(s.dist.lo, s.direct.lo) <= min(s.dist.hi, s.direct.hi)


def test_sigma_undefined_when_digits_match():
    g = GammaDigits(C100, prefix=(5,), tail_rule="zero")
    with pytest.raises(ParameterError):
        sigma_decompose(5, (C100, g))


def test_sud_partial_sum_counts_members():
    pair = (C100, GammaDigits(C100, tail_rule="half"))
    out = sud_partial_sum(0, 1, pair, 120)
    # members are n = 49 and n = 51 (first digit one off the shift digit)
    assert out["count"] == 2
    assert out["min_n"] == 49
    assert out["min_ratio"] == Fraction(49, 1)
    assert not out["empty"]
    assert out["sum"].lo > 0


def test_sud_partial_sum_validates_d():
    pair = (C100, GammaDigits(C100, tail_rule="half"))
    with pytest.raises(ParameterError):
        sud_partial_sum(0, 51, pair, 50)
    with pytest.raises(ParameterError):
        sud_partial_sum(0, 0, pair, 50)
