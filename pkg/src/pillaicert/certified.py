"""Rigorous real enclosures.

A :class:`CertifiedReal` is a closed interval ``[lo, hi]`` whose endpoints are
binary floating-point numbers held as raw mpmath ``mpf`` tuples.  Every
operation rounds its endpoints outward, so the exact real being tracked always
lies inside the interval.  The mid/rad view (``center``, ``radius``) is derived
from the endpoints with the radius rounded up.

All operations take the working precision from their operands; no global
mpmath context state is read or written, which keeps the type safe to share
across threads and processes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from mpmath import mp, mpf, nstr
from mpmath.libmp import (
    fzero,
    from_int,
    from_rational,
    libmpi,
    mpf_add,
    mpf_ceil,
    mpf_cmp,
    mpf_floor,
    mpf_lt,
    mpf_neg,
    mpf_shift,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_int,
    to_rational,
)

Number = Union[int, Fraction, "CertifiedReal"]

MAX_PRECISION = 4096


class PrecisionError(ArithmeticError):
    """Raised when an enclosure is too wide to decide a required inequality."""


def mpf_max(x, y):
    return x if mpf_cmp(x, y) >= 0 else y


def mpf_min(x, y):
    return x if mpf_cmp(x, y) <= 0 else y


def _frac(x) -> Fraction:
    p, q = to_rational(x)
    return Fraction(int(p), int(q))


class CertifiedReal:
    __slots__ = ("_lo", "_hi", "precision_bits")

    def __init__(self, lo, hi, precision_bits: int):
        if mpf_lt(hi, lo):
            raise ValueError("empty interval")
        self._lo = lo
        self._hi = hi
        self.precision_bits = precision_bits

    # -- construction ---------------------------------------------------

    @classmethod
    def from_int(cls, n: int, precision_bits: int) -> CertifiedReal:
        v = from_int(n)
        return cls(v, v, precision_bits)

    @classmethod
    def from_fraction(cls, x: Fraction, precision_bits: int) -> CertifiedReal:
        x = Fraction(x)
        if x.denominator == 1:
            return cls.from_int(x.numerator, precision_bits)
        lo = from_rational(x.numerator, x.denominator, precision_bits, round_floor)
        hi = from_rational(x.numerator, x.denominator, precision_bits, round_ceiling)
        return cls(lo, hi, precision_bits)

    @classmethod
    def from_decimal(cls, text: str, precision_bits: int) -> CertifiedReal:
        """Enclose a decimal literal such as ``"1.74"`` or ``"2.45e47"``."""
        return cls.from_fraction(Fraction(text), precision_bits)

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, precision_bits: int) -> CertifiedReal:
        a = cls.from_fraction(Fraction(lo), precision_bits)
        b = cls.from_fraction(Fraction(hi), precision_bits)
        return cls(a._lo, b._hi, precision_bits)

    @classmethod
    def pi(cls, precision_bits: int) -> CertifiedReal:
        return cls(*libmpi.mpi_pi(precision_bits), precision_bits)

    def _coerce(self, other: Number) -> CertifiedReal:
        if isinstance(other, CertifiedReal):
            return other
        if isinstance(other, int):
            return CertifiedReal.from_int(other, self.precision_bits)
        if isinstance(other, Fraction):
            return CertifiedReal.from_fraction(other, self.precision_bits)
        return NotImplemented

    def _wrap(self, pair, other: CertifiedReal | None = None) -> CertifiedReal:
        prec = self.precision_bits
        if other is not None and other.precision_bits > prec:
            prec = other.precision_bits
        return CertifiedReal(pair[0], pair[1], prec)

    @property
    def _pair(self):
        return (self._lo, self._hi)

    # -- views ----------------------------------------------------------

    @property
    def lower(self) -> mpf:
        return mp.make_mpf(self._lo)

    @property
    def upper(self) -> mpf:
        return mp.make_mpf(self._hi)

    @property
    def center(self) -> mpf:
        """Exact midpoint of the endpoints."""
        return mp.make_mpf(mpf_shift(mpf_add(self._lo, self._hi), -1))

    @property
    def radius(self) -> mpf:
        mid = mpf_shift(mpf_add(self._lo, self._hi), -1)
        return mp.make_mpf(mpf_sub(self._hi, mid, 53, round_ceiling))

    @property
    def width(self) -> mpf:
        return mp.make_mpf(mpf_sub(self._hi, self._lo, 53, round_ceiling))

    def bounds(self) -> tuple[Fraction, Fraction]:
        """Exact rational endpoints."""
        return _frac(self._lo), _frac(self._hi)

    def __float__(self) -> float:
        return float(self.center)

    def __repr__(self) -> str:
        digits = max(8, min(30, int(self.precision_bits * 0.30103)))
        return (
            f"CertifiedReal([{nstr(self.lower, digits)}, {nstr(self.upper, digits)}], "
            f"{self.precision_bits} bits)"
        )

    def to_str(self, digits: int = 12) -> str:
        return nstr(self.center, digits)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = max(self.precision_bits, o.precision_bits)
        return self._wrap(libmpi.mpi_add(self._pair, o._pair, prec), o)

    __radd__ = __add__

    def __sub__(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = max(self.precision_bits, o.precision_bits)
        return self._wrap(libmpi.mpi_sub(self._pair, o._pair, prec), o)

    def __rsub__(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = max(self.precision_bits, o.precision_bits)
        return self._wrap(libmpi.mpi_mul(self._pair, o._pair, prec), o)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not (o.is_positive() or o.is_negative()):
            raise ZeroDivisionError("divisor enclosure contains zero")
        prec = max(self.precision_bits, o.precision_bits)
        return self._wrap(libmpi.mpi_div(self._pair, o._pair, prec), o)

    def __rtruediv__(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self) -> CertifiedReal:
        return CertifiedReal(mpf_neg(self._hi), mpf_neg(self._lo), self.precision_bits)

    def __abs__(self) -> CertifiedReal:
        return self._wrap(libmpi.mpi_abs(self._pair))

    def __pow__(self, n: int) -> CertifiedReal:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        return self._wrap(libmpi.mpi_pow_int(self._pair, n, self.precision_bits))

    def sqrt(self) -> CertifiedReal:
        if mpf_lt(self._lo, fzero):
            raise ValueError("sqrt of possibly negative enclosure")
        return self._wrap(libmpi.mpi_sqrt(self._pair, self.precision_bits))

    def log(self) -> CertifiedReal:
        if not self.is_positive():
            raise ValueError("log of possibly non-positive enclosure")
        return self._wrap(libmpi.mpi_log(self._pair, self.precision_bits))

    def exp(self) -> CertifiedReal:
        return self._wrap(libmpi.mpi_exp(self._pair, self.precision_bits))

    def cos(self) -> CertifiedReal:
        return self._wrap(libmpi.mpi_cos(self._pair, self.precision_bits))

    @staticmethod
    def atan2(y: CertifiedReal, x: CertifiedReal) -> CertifiedReal:
        prec = max(y.precision_bits, x.precision_bits)
        return CertifiedReal(*libmpi.mpi_atan2(y._pair, x._pair, prec), prec)

    # -- set operations -------------------------------------------------

    def hull(self, other: CertifiedReal) -> CertifiedReal:
        return self._wrap((mpf_min(self._lo, other._lo), mpf_max(self._hi, other._hi)), other)

    def intersect(self, other: CertifiedReal) -> CertifiedReal:
        lo = mpf_max(self._lo, other._lo)
        hi = mpf_min(self._hi, other._hi)
        if mpf_lt(hi, lo):
            raise ValueError("enclosures are disjoint")
        return self._wrap((lo, hi), other)

    def max_with(self, other: Number) -> CertifiedReal:
        o = self._coerce(other)
        return self._wrap((mpf_max(self._lo, o._lo), mpf_max(self._hi, o._hi)), o)

    def contains(self, x: Number) -> bool:
        if isinstance(x, CertifiedReal):
            return mpf_cmp(self._lo, x._lo) <= 0 and mpf_cmp(x._hi, self._hi) <= 0
        if isinstance(x, int):
            v = from_int(x)
            return mpf_cmp(self._lo, v) <= 0 and mpf_cmp(v, self._hi) <= 0
        lo, hi = self.bounds()
        return lo <= Fraction(x) <= hi

    def __contains__(self, x: Number) -> bool:
        return self.contains(x)

    def overlaps(self, other: CertifiedReal) -> bool:
        return mpf_cmp(self._lo, other._hi) <= 0 and mpf_cmp(other._lo, self._hi) <= 0

    # -- certified comparisons -----------------------------------------

    def is_positive(self) -> bool:
        return mpf_cmp(self._lo, fzero) > 0

    def is_negative(self) -> bool:
        return mpf_cmp(self._hi, fzero) < 0

    def certainly_lt(self, other: Number) -> bool:
        o = self._coerce(other)
        return mpf_cmp(self._hi, o._lo) < 0

    def certainly_le(self, other: Number) -> bool:
        o = self._coerce(other)
        return mpf_cmp(self._hi, o._lo) <= 0

    def certainly_gt(self, other: Number) -> bool:
        o = self._coerce(other)
        return mpf_cmp(self._lo, o._hi) > 0

    def certainly_ge(self, other: Number) -> bool:
        o = self._coerce(other)
        return mpf_cmp(self._lo, o._hi) >= 0

    # -- integer structure ---------------------------------------------

    def floor(self) -> int | None:
        """Common floor of every point in the enclosure, or None if it straddles an integer."""
        a = to_int(mpf_floor(self._lo))
        b = to_int(mpf_floor(self._hi))
        return a if a == b else None

    def ceil_upper(self) -> int:
        return to_int(mpf_ceil(self._hi))

    def floor_lower(self) -> int:
        return to_int(mpf_floor(self._lo))

    def dist_to_int(self) -> CertifiedReal:
        """Enclosure of ``min_n |x - n|`` over all x in the interval."""
        prec = self.precision_bits
        k = from_int(to_int(mpf_floor(self._lo)))
        lo = mpf_sub(self._lo, k, prec, round_floor)
        hi = mpf_sub(self._hi, k, prec, round_ceiling)
        one = from_int(1)
        half = mpf_shift(one, -1)
        if mpf_cmp(hi, half) <= 0:
            return CertifiedReal(lo, hi, prec)
        if mpf_cmp(hi, one) <= 0:
            if mpf_cmp(lo, half) >= 0:
                return CertifiedReal(
                    mpf_sub(one, hi, prec, round_floor), mpf_sub(one, lo, prec, round_ceiling), prec
                )
            return CertifiedReal(mpf_min(lo, mpf_sub(one, hi, prec, round_floor)), half, prec)
        # contains the integer k + 1
        if mpf_cmp(lo, half) <= 0 or mpf_cmp(hi, mpf_add(one, half, prec)) >= 0:
            return CertifiedReal(fzero, half, prec)
        top = mpf_max(mpf_sub(one, lo, prec, round_ceiling), mpf_sub(hi, one, prec, round_ceiling))
        return CertifiedReal(fzero, top, prec)


def certified(x: Number, precision_bits: int) -> CertifiedReal:
    if isinstance(x, CertifiedReal):
        return x
    if isinstance(x, int):
        return CertifiedReal.from_int(x, precision_bits)
    if isinstance(x, str):
        return CertifiedReal.from_decimal(x, precision_bits)
    return CertifiedReal.from_fraction(Fraction(x), precision_bits)
