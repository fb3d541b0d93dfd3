from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from pillaicert.certified import CertifiedReal, PrecisionError, certified

P = 128
fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10**6)


def enc(x):
    return CertifiedReal.from_fraction(x, P)


@given(fractions, fractions)
def test_arithmetic_contains_exact_result(x, y):
    a, b = enc(x), enc(y)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    if y != 0:
        assert (a / b).contains(x / y)


@given(positive)
def test_log_exp_sqrt_contain_reference(x):
    a = enc(x)
    with mp.workprec(400):
        ref_log = mp.log(mpf(x.numerator) / x.denominator)
        ref_sqrt = mp.sqrt(mpf(x.numerator) / x.denominator)
        ref_exp = mp.exp(mpf(x.numerator) / x.denominator / 100)
    assert a.log().lower <= ref_log <= a.log().upper
    assert a.sqrt().lower <= ref_sqrt <= a.sqrt().upper
    e = (a / 100).exp()
    assert e.lower <= ref_exp <= e.upper


@given(fractions)
def test_dist_to_int_matches_exact(x):
    d = enc(x).dist_to_int()
    exact = abs(x - round(x))
    assert d.contains(exact)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=1000), st.fractions(min_value=0, max_value=2, max_denominator=1000))
def test_dist_to_int_wide_interval_covers_every_point(lo, w):
    iv = CertifiedReal.from_bounds(lo, lo + w, P)
    d = iv.dist_to_int()
    for k in range(11):
        x = lo + w * k / 10
        assert d.contains(abs(x - round(x)))


def test_floor_refuses_straddling_enclosure():
    iv = CertifiedReal.from_bounds(Fraction(99, 100), Fraction(101, 100), P)
    assert iv.floor() is None
    assert enc(Fraction(7, 2)).floor() == 3


def test_division_by_enclosure_containing_zero():
    with pytest.raises(ZeroDivisionError):
        enc(Fraction(1)) / CertifiedReal.from_bounds(-1, 1, P)


def test_log_of_nonpositive_rejected():
    with pytest.raises(ValueError):
        CertifiedReal.from_bounds(-1, 1, P).log()


def test_decimal_literal_enclosure_is_outward():
    x = CertifiedReal.from_decimal("0.1", 64)
    lo, hi = x.bounds()
    assert lo <= Fraction(1, 10) <= hi and lo < hi


def test_certified_helper_and_comparisons():
    x = certified("2.45e47", 192)
    assert x.certainly_gt(10**47) and x.certainly_lt(10**48)
    assert certified(3, 64).contains(3)
    assert issubclass(PrecisionError, ArithmeticError)


@settings(max_examples=50)
@given(st.integers(min_value=-10, max_value=40), fractions)
def test_integer_power(n, x):
    if x == 0 and n < 0:
        return
    assert (enc(x) ** n).contains(x**n)
