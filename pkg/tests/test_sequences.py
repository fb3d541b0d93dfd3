import pytest
from hypothesis import given
from hypothesis import strategies as st

from pillaicert.sequences import LUCAS, PADOVAN, RecurrenceDef, lucas, padovan, recurrence_term, recurrence_terms

# Reference values typed in from the standard tables.
PADOVAN_HEAD = [1, 1, 1, 2, 2, 3, 4, 5, 7, 9, 12, 16, 21, 28, 37, 49, 65, 86, 114, 151]
LUCAS_HEAD = [2, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123, 199, 322, 521, 843, 1364]


def naive(rec, k):
    terms = list(rec.initial)
    while len(terms) <= k:
        terms.append(sum(c * terms[-rec.order + i] for i, c in enumerate(rec.coeffs)))
    return terms[k]


def test_heads():
    assert [padovan(k) for k in range(len(PADOVAN_HEAD))] == PADOVAN_HEAD
    assert [lucas(k) for k in range(len(LUCAS_HEAD))] == LUCAS_HEAD


@given(st.integers(min_value=0, max_value=700))
def test_recurrences_hold(k):
    assert padovan(k + 3) == padovan(k + 1) + padovan(k)
    assert lucas(k + 2) == lucas(k + 1) + lucas(k)


@given(st.integers(min_value=0, max_value=400))
def test_against_independent_loop(k):
    assert padovan(k) == naive(PADOVAN, k)
    assert lucas(k) == naive(LUCAS, k)


def test_lucas_fibonacci_identity():
    # L_k = F_{k-1} + F_{k+1}
    fib = [0, 1]
    while len(fib) < 302:
        fib.append(fib[-1] + fib[-2])
    assert all(lucas(k) == fib[k - 1] + fib[k + 1] for k in range(1, 300))


def test_large_index_is_exact():
    assert padovan(1000) == naive(PADOVAN, 1000)
    assert len(str(lucas(1000))) == 209


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        padovan(-1)
    with pytest.raises(ValueError):
        lucas(-3)


def test_terms_list_is_a_copy():
    t = recurrence_terms(LUCAS, 5)
    t[0] = 99
    assert lucas(0) == 2
    assert recurrence_terms(LUCAS, 0) == []


def test_custom_recurrence_and_validation():
    fib = RecurrenceDef(2, (1, 1), (0, 1))
    assert recurrence_term(fib, 30) == 832040
    with pytest.raises(ValueError):
        RecurrenceDef(2, (1,), (0, 1))
    with pytest.raises(ValueError):
        RecurrenceDef(1, (0,), (1,))
