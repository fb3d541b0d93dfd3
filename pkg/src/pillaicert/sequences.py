"""Exact big-integer linear recurrences (Padovan, Lucas and friends)."""

from __future__ import annotations

import threading
from dataclasses import dataclass


@dataclass(frozen=True)
class RecurrenceDef:
    """``x[k + order] = sum(coeffs[i] * x[k + i])`` with the given initial terms."""

    order: int
    coeffs: tuple[int, ...]
    initial: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "initial", tuple(int(c) for c in self.initial))
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if len(self.coeffs) != self.order or len(self.initial) != self.order:
            raise ValueError("coeffs and initial must both have `order` entries")
        if not any(self.coeffs):
            raise ValueError("coefficients are all zero")


@dataclass(frozen=True)
class SequenceTerm:
    index: int
    value: int


PADOVAN = RecurrenceDef(3, (1, 1, 0), (1, 1, 1))
LUCAS = RecurrenceDef(2, (1, 1), (2, 1))


class _Prefix:
    """Memoized prefix of a recurrence, extended on demand under a lock."""

    def __init__(self, rec: RecurrenceDef):
        self.rec = rec
        self.terms = list(rec.initial)
        self._lock = threading.Lock()

    def upto(self, k: int) -> list[int]:
        if k >= len(self.terms):
            with self._lock:
                terms = self.terms
                order, coeffs = self.rec.order, self.rec.coeffs
                while len(terms) <= k:
                    base = len(terms) - order
                    terms.append(sum(c * terms[base + i] for i, c in enumerate(coeffs) if c))
        return self.terms


_prefixes: dict[RecurrenceDef, _Prefix] = {}
_prefix_lock = threading.Lock()


def _prefix(rec: RecurrenceDef) -> _Prefix:
    with _prefix_lock:
        p = _prefixes.get(rec)
        if p is None:
            p = _prefixes[rec] = _Prefix(rec)
        return p


def _check_index(k: int) -> None:
    if k < 0:
        raise ValueError(f"negative index {k} is not supported")


def recurrence_term(rec: RecurrenceDef, k: int) -> int:
    _check_index(k)
    return _prefix(rec).upto(k)[k]


def recurrence_terms(rec: RecurrenceDef, count: int) -> list[int]:
    """The first ``count`` terms as a fresh list."""
    if count <= 0:
        return []
    return list(_prefix(rec).upto(count - 1)[:count])


def padovan(k: int) -> int:
    """Padovan number with P(0) = P(1) = P(2) = 1 and P(k+3) = P(k+1) + P(k)."""
    return recurrence_term(PADOVAN, k)


def lucas(k: int) -> int:
    """Lucas number with L(0) = 2, L(1) = 1."""
    return recurrence_term(LUCAS, k)
