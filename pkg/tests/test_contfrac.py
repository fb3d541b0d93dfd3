from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from pillaicert.certified import CertifiedReal, PrecisionError
from pillaicert.contfrac import (
    InsufficientTerms,
    cf_expand,
    convergents_of,
    find_convergent_exceeding,
    legendre_lower_bound,
    tau,
    tau_inverse,
)

M_PRINTED = 245 * 10**45
Q98 = 45634243076387457097046528084208490147594968308975
P98 = 78093067704223831799032754534503501859635391435517


def rational_cf(x: Fraction, n: int):
    out = []
    for _ in range(n):
        a = x.numerator // x.denominator
        out.append(a)
        if x == a:
            break
        x = 1 / (x - a)
    return out


@pytest.fixture(scope="module")
def tau_cf():
    return cf_expand(tau, 110)


@pytest.fixture(scope="module")
def tau_ref():
    """tau to 200 digits from an independent mpmath evaluation."""
    with mp.workdps(220):
        alpha = mp.findroot(lambda x: x**3 - x - 1, mp.mpf("1.3"))
        t = mp.log((1 + mp.sqrt(5)) / 2) / mp.log(alpha)
        return Fraction(mp.nstr(t, 200, strip_zeros=False))


def test_tau_prefix(tau_cf):
    assert list(tau_cf.quotients[:13]) == [1, 1, 2, 2, 6, 2, 1, 2, 1, 2, 1, 1, 11]


def test_inverse_prefix():
    e = cf_expand(tau_inverse, 20)
    assert list(e.quotients[:14]) == [0, 1, 1, 2, 2, 6, 2, 1, 2, 1, 2, 1, 1, 11]


def test_rational_expansion():
    e = cf_expand(Fraction(10, 7), 10)
    assert list(e.quotients) == [1, 2, 3] and e.exact
    assert e.convergents[-1] == (10, 7)


def test_quotients_match_rational_oracle(tau_cf, tau_ref):
    assert list(tau_cf.quotients[:100]) == rational_cf(tau_ref, 100)


def test_convergent_exceeding_6M(tau_cf):
    idx, p, q = find_convergent_exceeding(tau_cf, 6 * M_PRINTED)
    assert idx == 98 and q == Q98 and p == P98
    assert q > 6 * M_PRINTED


def test_convergent_exceeding_small_bounds(tau_cf, tau_ref):
    assert find_convergent_exceeding(tau_cf, 0)[0] == 0
    idx, p, q = find_convergent_exceeding(tau_cf, 10**6)
    ref = convergents_of(rational_cf(tau_ref, 60))
    want = next(i for i, (_, qq) in enumerate(ref) if qq > 10**6)
    assert idx == want and (p, q) == ref[want]


def test_insufficient_terms():
    e = cf_expand(tau, 10)
    with pytest.raises(InsufficientTerms):
        find_convergent_exceeding(e, 10**30)


def test_fixed_enclosure_too_wide():
    with pytest.raises(PrecisionError):
        cf_expand(tau(64), 60)


def test_determinant_identity_and_recurrence(tau_cf):
    qs, cv = tau_cf.quotients, tau_cf.convergents
    for i in range(1, len(cv)):
        p, q = cv[i]
        p0, q0 = cv[i - 1]
        assert p * q0 - p0 * q == (-1) ** (i - 1)
        if i >= 2:
            assert p == qs[i] * p0 + cv[i - 2][0] and q == qs[i] * q0 + cv[i - 2][1]
            assert q > q0


def test_convergent_quality(tau_cf):
    x = tau(512)
    cv = tau_cf.convergents
    for i in range(len(cv) - 1):
        p, q = cv[i]
        err = abs(x - Fraction(p, q))
        assert err.certainly_lt(Fraction(1, q * cv[i + 1][1]))


def test_reconstruction(tau_cf):
    x = Fraction(tau_cf.quotients[-1])
    for a in reversed(tau_cf.quotients[:-1]):
        x = a + 1 / x
    assert x == Fraction(*tau_cf.convergents[-1])


def test_precision_stability():
    lo = cf_expand(tau(384), 100)
    hi = cf_expand(tau(768), 150)
    assert hi.quotients[: lo.certified_terms] == lo.quotients


@settings(max_examples=50)
@given(st.fractions(min_value=0, max_value=100, max_denominator=10**8))
def test_rational_roundtrip(x):
    e = cf_expand(x, 100)
    assert Fraction(*e.convergents[-1]) == x


def test_legendre_bound(tau_cf):
    lb = legendre_lower_bound(tau_cf, 10**6)
    assert lb.a_M == max(tau_cf.quotients[: lb.index + 1])
    x = tau(512)
    for p, q in tau_cf.convergents:
        if q >= 10**6:
            break
        assert abs(x - Fraction(p, q)).certainly_gt(lb.bound_at(q))


def test_legendre_degenerate_and_monotone(tau_cf):
    lb = legendre_lower_bound(tau_cf, 1)
    assert lb.index in (0, 1, 2)
    assert lb.a_M == max(tau_cf.quotients[: lb.index + 1])
    assert all(lb.bound_at(s) > lb.bound_at(s + 1) for s in range(1, 50))
