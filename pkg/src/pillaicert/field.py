"""Certified constants of the Padovan and Lucas characteristic fields.

The Padovan polynomial x^3 - x - 1 has the real root alpha (the plastic
number) and a complex-conjugate pair beta, gamma = conj(beta).  The Lucas
polynomial x^2 - x - 1 has roots delta (golden ratio) and eta = -1/delta.
Everything here is returned as a :class:`CertifiedReal`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from mpmath import mpf

from .certified import CertifiedReal, PrecisionError

DEFAULT_PRECISION = 192

PADOVAN_POLY = (1, 0, -1, -1)  # x^3 - x - 1
LUCAS_POLY = (1, -1, -1)  # x^2 - x - 1
BINET_A_POLY = (23, -23, 6, -1)  # minimal polynomial of the Binet coefficients a, b, c

HEIGHT_SLACK = "1.74"


def _eval_exact(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _eval_interval(coeffs: Sequence[int], x: CertifiedReal) -> CertifiedReal:
    acc = CertifiedReal.from_int(coeffs[0], x.precision_bits)
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


def _derivative(coeffs: Sequence[int]) -> tuple[int, ...]:
    d = len(coeffs) - 1
    return tuple(c * (d - i) for i, c in enumerate(coeffs[:-1]))


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def isolate_root(coeffs: Sequence[int], lo: Fraction, hi: Fraction, precision_bits: int) -> CertifiedReal:
    """Enclose the unique simple root of an integer polynomial inside ``[lo, hi]``.

    Bisection on exact rationals brings the bracket down to about 2^-32, then
    interval Newton contracts it to working precision.  The returned enclosure
    is certified by an exact sign change of the polynomial at its endpoints.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    s_lo, s_hi = _sign(_eval_exact(coeffs, lo)), _sign(_eval_exact(coeffs, hi))
    if s_lo == 0:
        return CertifiedReal.from_fraction(lo, precision_bits)
    if s_hi == 0:
        return CertifiedReal.from_fraction(hi, precision_bits)
    if s_lo == s_hi:
        raise ValueError("no sign change on the bracket")

    while hi - lo > Fraction(1, 1 << 32):
        mid = (lo + hi) / 2
        s = _sign(_eval_exact(coeffs, mid))
        if s == 0:
            return CertifiedReal.from_fraction(mid, precision_bits)
        if s == s_lo:
            lo = mid
        else:
            hi = mid

    dcoeffs = _derivative(coeffs)
    x = CertifiedReal.from_bounds(lo, hi, precision_bits)
    for _ in range(4 * precision_bits.bit_length() + 16):
        m = _point(x)
        step = _eval_interval(coeffs, m) / _eval_interval(dcoeffs, x)
        try:
            nxt = x.intersect(m - step)
        except ValueError:
            break
        if nxt.width >= x.width:
            break
        x = nxt

    a, b = x.bounds()
    sa, sb = _sign(_eval_exact(coeffs, a)), _sign(_eval_exact(coeffs, b))
    if sa * sb > 0 or (sa != 0 and sa != s_lo) or (sb != 0 and sb != s_hi):
        raise PrecisionError("root enclosure failed its sign-change certificate")
    return x


def _point(x: CertifiedReal) -> CertifiedReal:
    c = x.center._mpf_
    return CertifiedReal(c, c, x.precision_bits)


@dataclass(frozen=True)
class FieldConstants:
    precision_bits: int
    alpha: CertifiedReal
    beta_abs: CertifiedReal
    a: CertifiedReal
    b_abs: CertifiedReal
    delta: CertifiedReal
    eta_abs: CertifiedReal
    log_alpha: CertifiedReal
    log_delta: CertifiedReal
    log_a: CertifiedReal
    beta_arg: CertifiedReal
    b_arg: CertifiedReal

    def const(self, value) -> CertifiedReal:
        """Lift an int, Fraction or decimal string into an enclosure at this precision."""
        if isinstance(value, str):
            return CertifiedReal.from_decimal(value, self.precision_bits)
        if isinstance(value, int):
            return CertifiedReal.from_int(value, self.precision_bits)
        return CertifiedReal.from_fraction(Fraction(value), self.precision_bits)


@lru_cache(maxsize=16)
def build_constants(precision_bits: int = DEFAULT_PRECISION) -> FieldConstants:
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    p = precision_bits
    alpha = isolate_root(PADOVAN_POLY, Fraction(1), Fraction(2), p)
    delta = isolate_root(LUCAS_POLY, Fraction(1), Fraction(2), p)

    # beta = x + i*y with x = -alpha/2, y = sqrt(1/alpha - alpha^2/4)
    bx = -alpha / 2
    by = (1 / alpha - alpha * alpha / 4).sqrt()
    beta_abs = (1 / alpha).sqrt()
    a = (1 + alpha) / (3 * alpha + 1 - alpha * alpha)

    # b = (1 + beta) / (-beta^2 + 3 beta + 1)
    num_re, num_im = 1 + bx, by
    den_re = by * by - bx * bx + 3 * bx + 1
    den_im = 3 * by - 2 * bx * by
    b_abs = ((num_re * num_re + num_im * num_im) / (den_re * den_re + den_im * den_im)).sqrt()
    b_arg = CertifiedReal.atan2(num_im, num_re) - CertifiedReal.atan2(den_im, den_re)
    beta_arg = CertifiedReal.atan2(by, bx)

    consts = FieldConstants(
        precision_bits=p,
        alpha=alpha,
        beta_abs=beta_abs,
        a=a,
        b_abs=b_abs,
        delta=delta,
        eta_abs=1 / delta,
        log_alpha=alpha.log(),
        log_delta=delta.log(),
        log_a=a.log(),
        beta_arg=beta_arg,
        b_arg=b_arg,
    )
    limit = mpf(2) ** (-(p // 2))
    for name in ("alpha", "beta_abs", "a", "b_abs", "delta", "eta_abs"):
        if getattr(consts, name).radius > limit:
            raise PrecisionError(f"{name} enclosure too wide at {p} bits")
    return consts


def binet_padovan(k: int, consts: FieldConstants) -> CertifiedReal:
    """Enclosure of a*alpha^k + b*beta^k + c*gamma^k.

    The conjugate pair equals 2|b||beta|^k cos(arg b + k arg beta); that value
    is intersected with the modulus bound 2|b||beta|^k.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    main = consts.a * consts.alpha**k
    modulus = 2 * consts.b_abs * consts.beta_abs**k
    pair = modulus * (consts.b_arg + k * consts.beta_arg).cos()
    pair = pair.intersect(modulus.hull(-modulus))
    return main + pair


def binet_lucas(k: int, consts: FieldConstants) -> CertifiedReal:
    if k < 0:
        raise ValueError("k must be non-negative")
    eta_k = consts.eta_abs**k
    return consts.delta**k + (eta_k if k % 2 == 0 else -eta_k)


@dataclass(frozen=True)
class HeightInput:
    leading_coeff: int
    conjugate_moduli: tuple[CertifiedReal, ...]
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "conjugate_moduli", tuple(self.conjugate_moduli))
        if self.leading_coeff == 0:
            raise ValueError("leading coefficient must be non-zero")
        if self.degree != len(self.conjugate_moduli):
            raise ValueError("degree must equal the number of conjugates")


def abs_log_height(inp: HeightInput) -> CertifiedReal:
    """(1/d) * (log|a_d| + sum(log max(1, |conjugate|)))."""
    prec = max(m.precision_bits for m in inp.conjugate_moduli)
    total = CertifiedReal.from_int(abs(inp.leading_coeff), prec).log()
    for m in inp.conjugate_moduli:
        total = total + m.max_with(1).log()
    return total / inp.degree


def height_bound_gamma1(n_minus_n1: int, consts: FieldConstants) -> CertifiedReal:
    """Upper bound k/2 * log(delta) + 1.74 for h((delta^k - 1)/a), k = n - n1."""
    if n_minus_n1 < 1:
        raise ValueError("n - n1 must be positive")
    return n_minus_n1 * consts.log_delta / 2 + consts.const(HEIGHT_SLACK)


def height_slack(consts: FieldConstants) -> CertifiedReal:
    """log 2 + h(a) = log 2 + log(23)/3, the additive part absorbed into 1.74."""
    return consts.const(2).log() + consts.const(23).log() / 3
