"""Certified continued fractions and Legendre's approximation bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .certified import MAX_PRECISION, CertifiedReal, PrecisionError
from .field import DEFAULT_PRECISION, build_constants

Source = Union[CertifiedReal, Fraction, int, Callable[[int], CertifiedReal]]


class InsufficientTerms(LookupError):
    pass


@dataclass(frozen=True)
class CFExpansion:
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    certified_terms: int
    precision_bits: int | None = None
    exact: bool = False

    def __len__(self) -> int:
        return len(self.quotients)


def convergents_of(quotients) -> list[tuple[int, int]]:
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in quotients:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def _quotients(lo: Fraction, hi: Fraction, max_terms: int) -> tuple[list[int], bool]:
    """Quotients shared by every real in ``[lo, hi]``; flag is True when the expansion ended exactly."""
    out: list[int] = []
    while len(out) < max_terms:
        a = math.floor(lo)
        if math.floor(hi) != a:
            return out, False
        out.append(a)
        lo_f, hi_f = lo - a, hi - a
        if hi_f == 0:
            return out, True  # the point a itself
        if lo_f == 0:
            return out, False  # straddles the integer a
        lo, hi = 1 / hi_f, 1 / lo_f
    return out, False


def _expand_once(x: CertifiedReal | Fraction, max_terms: int) -> tuple[list[int], bool]:
    if isinstance(x, CertifiedReal):
        lo, hi = x.bounds()
    else:
        lo = hi = Fraction(x)
    return _quotients(lo, hi, max_terms)


def cf_expand(x: Source, max_terms: int, start_bits: int = DEFAULT_PRECISION) -> CFExpansion:
    """Expand ``x`` to ``max_terms`` certified partial quotients.

    ``x`` may be an exact rational, a fixed enclosure, or a recipe mapping a
    precision in bits to an enclosure; only recipes can be retried at higher
    precision (doubling up to the cap).
    """
    if max_terms < 1:
        raise ValueError("max_terms must be positive")
    if isinstance(x, (int, Fraction)):
        qs, _ = _expand_once(Fraction(x), max_terms)
        return CFExpansion(tuple(qs), tuple(convergents_of(qs)), len(qs), None, True)

    if isinstance(x, CertifiedReal):
        qs, done = _expand_once(x, max_terms)
        if len(qs) < max_terms and not done:
            raise PrecisionError(f"only {len(qs)} of {max_terms} quotients certified at {x.precision_bits} bits")
        return CFExpansion(tuple(qs), tuple(convergents_of(qs)), len(qs), x.precision_bits, done)

    bits = start_bits
    while True:
        qs, done = _expand_once(x(bits), max_terms)
        if len(qs) == max_terms or done:
            return CFExpansion(tuple(qs), tuple(convergents_of(qs)), len(qs), bits, done)
        if bits >= MAX_PRECISION:
            raise PrecisionError(f"only {len(qs)} of {max_terms} quotients certified at {bits} bits")
        bits = min(2 * bits, MAX_PRECISION)


def find_convergent_exceeding(exp: CFExpansion, bound: int) -> tuple[int, int, int]:
    for i, (p, q) in enumerate(exp.convergents[: exp.certified_terms]):
        if q > bound:
            return i, p, q
    raise InsufficientTerms(f"no certified convergent denominator exceeds {bound}")


@dataclass(frozen=True)
class LegendreBound:
    a_M: int
    index: int

    def bound_at(self, s: int) -> Fraction:
        """Lower bound for |tau - r/s| valid for every integer r and 0 < s < M."""
        if s < 1:
            raise ValueError("s must be positive")
        return Fraction(1, (self.a_M + 2) * s * s)


def legendre_lower_bound(exp: CFExpansion, M: int) -> LegendreBound:
    """a_M = max(a_0..a_N) with N the first index having q_N > M."""
    n, _, _ = find_convergent_exceeding(exp, M)
    return LegendreBound(max(exp.quotients[: n + 1]), n)


# -- the two ratios used by the reduction ---------------------------------


def tau(bits: int) -> CertifiedReal:
    """log(delta) / log(alpha)."""
    c = build_constants(bits)
    return c.log_delta / c.log_alpha


def tau_inverse(bits: int) -> CertifiedReal:
    """log(alpha) / log(delta)."""
    c = build_constants(bits)
    return c.log_alpha / c.log_delta
