"""Lower bounds for linear forms in logarithms and the absolute bound on n.

Bounds of the shape ``log|Lambda| > -C (1 + log 2n)^p`` are tracked by their
coefficient ``C`` and power ``p``; the symbolic ``n`` is resolved only at the
end, by a fixed-point iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from mpmath import mp, mpf

from .certified import CertifiedReal
from .claims import ClaimResult, compare, load_registry
from .field import FieldConstants, height_slack

BMS_FACTOR = "1.4"
LMN_FACTOR = "24.34"

# Printed A_1 choices.  Each is checked to be a valid upper bound on 6 h(gamma_1)
# and then propagated, so the later constants match the published chain.
CASE1_A1 = "2.2e14"
CASE2_A1 = "1.47e14"
LAMBDA3_A1 = "1.54e28"
LAMBDA3_PREFACTOR = "13.5"
ETA_BETA_SUM = "3.02"


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LinearFormSpec:
    num_terms: int
    degree: int
    heights: tuple[CertifiedReal, ...]
    b_max: int

    def __post_init__(self):
        object.__setattr__(self, "heights", tuple(self.heights))
        if self.num_terms < 1 or self.degree < 1:
            raise ValueError("num_terms and degree must be positive")
        if len(self.heights) != self.num_terms:
            raise ValueError("need one height per term")
        if not all(h.is_positive() for h in self.heights):
            raise ValueError("heights must be positive")
        if self.b_max < 1:
            raise ValueError("b_max must be at least 1")


def bms_real_coefficient(num_terms: int, degree: int, heights: Sequence[CertifiedReal]) -> CertifiedReal:
    """Everything in the real-field bound except the factor ``1 + log B``."""
    prec = heights[0].precision_bits
    s, d = num_terms, degree
    c = CertifiedReal.from_decimal(BMS_FACTOR, prec) * CertifiedReal.from_int(30, prec) ** (s + 3)
    c = c * CertifiedReal.from_int(s, prec) ** 4 * CertifiedReal.from_int(s, prec).sqrt()
    c = c * d * d * (1 + CertifiedReal.from_int(d, prec).log())
    for h in heights:
        c = c * h
    return c


def bms_real_lower_exponent(spec: LinearFormSpec) -> CertifiedReal:
    """E with ``log|Lambda| > -E`` for a non-zero real linear form."""
    c = bms_real_coefficient(spec.num_terms, spec.degree, spec.heights)
    prec = c.precision_bits
    return c * (1 + CertifiedReal.from_int(spec.b_max, prec).log())


def matveev_c1(num_terms: int, real_field: bool, precision_bits: int = 192) -> CertifiedReal:
    n = num_terms
    if n < 1:
        raise ValueError("num_terms must be positive")
    one = CertifiedReal.from_int(1, precision_bits)
    xi = 1 if real_field else 2
    e = one.exp()
    nn = CertifiedReal.from_int(n, precision_bits)
    first = (e * nn / 2) ** xi * CertifiedReal.from_int(30, precision_bits) ** (n + 3)
    first = first * nn**3 * nn.sqrt() / xi
    second = CertifiedReal.from_int(2 ** (6 * n + 20), precision_bits)
    if first.certainly_le(second):
        return first
    if second.certainly_le(first):
        return second
    return first.hull(second)


def lmn_two_log_lower(
    logB1: CertifiedReal, logB2: CertifiedReal, bprime: CertifiedReal, d: int
) -> CertifiedReal:
    """Two-logarithm bound: ``log|Gamma| > -E``."""
    prec = logB1.precision_bits
    inv_d = CertifiedReal.from_fraction(Fraction(1, d), prec)
    if logB1.certainly_lt(inv_d) or logB2.certainly_lt(inv_d):
        raise ValueError("log B_i must be at least 1/d")
    m = (bprime.log() + CertifiedReal.from_decimal("0.14", prec)).max_with(Fraction(21, d)).max_with(Fraction(1, 2))
    return CertifiedReal.from_decimal(LMN_FACTOR, prec) * d**4 * m * m * logB1 * logB2


# -- index relations ------------------------------------------------------


@dataclass(frozen=True)
class IndexWindow:
    n_lo: CertifiedReal
    n_hi: CertifiedReal
    m_lt_2n: bool


def ratio(consts: FieldConstants) -> CertifiedReal:
    """log(alpha) / log(delta) ~ 0.5843."""
    return consts.log_alpha / consts.log_delta


def index_window(m: int, consts: FieldConstants) -> IndexWindow:
    """Range of n compatible with a solution of index m.

    Uses P(m - 5) >= alpha^(m - 7) on the lower side, which needs m >= 8.
    """
    if m < 8:
        raise ValueError("index_window needs m >= 8")
    r = ratio(consts)
    n_lo = (m - 7) * r - 1
    n_hi = (m - 1) * r + 3
    # every integer n in the window has n > n_lo, so 2 n_lo >= m settles m < 2n
    first_n = n_lo.floor_lower() + 1
    return IndexWindow(n_lo, n_hi, 2 * first_n > m)


def max_m_for_n(n_bound: int, consts: FieldConstants) -> CertifiedReal:
    """Strict upper bound on m over all solutions with n < n_bound."""
    # n > (m - 7) r - 1 and n <= n_bound - 1 give m < n_bound / r + 7
    return n_bound / ratio(consts) + 7


def m_lt_2n_from(n_min: int, consts: FieldConstants) -> bool:
    """Certify m < 2n for every n >= n_min (the bound on m is linear in n with slope 1/r < 2)."""
    r = ratio(consts)
    slope_ok = (1 / r).certainly_lt(2)
    return slope_ok and ((n_min + 1) / r + 7).certainly_le(2 * n_min)


def linear_forms(n: int, m: int, n1: int, m1: int, consts: FieldConstants):
    """Enclosures of the four linear forms Gamma, Gamma_1, Gamma_2, Gamma_3."""
    if not (n > n1 >= 1 and m > m1 >= 1):
        raise ValueError("need n > n1 >= 1 and m > m1 >= 1")
    ld, la, lg_a = consts.log_delta, consts.log_alpha, consts.log_a
    log_dk = (consts.delta ** (n - n1) - 1).log()
    log_al = (consts.alpha ** (m - m1) - 1).log()
    g = n * ld - m * la - lg_a
    g1 = n1 * ld - m * la + log_dk - lg_a
    g2 = n * ld - m1 * la - lg_a - log_al
    g3 = n1 * ld - m1 * la + log_dk - lg_a - log_al
    return g, g1, g2, g3


# -- the bound chain ------------------------------------------------------


@dataclass(frozen=True)
class LogTerm:
    """``coeff * (1 + log 2n)^power``."""

    coeff: CertifiedReal
    power: int

    def at(self, x: mpf) -> mpf:
        with mp.workprec(self.coeff.precision_bits):
            return self.coeff.upper * (1 + mp.log(2 * x)) ** self.power


@dataclass
class BoundChainReport:
    min_bound: LogTerm
    max_bound: LogTerm
    n_upper: mpf
    n_upper_strict: mpf
    values: dict = field(default_factory=dict)
    stages: list[ClaimResult] = field(default_factory=list)

    def stage(self, claim_id: str) -> ClaimResult:
        for s in self.stages:
            if s.id == claim_id:
                return s
        raise KeyError(claim_id)


def solve_fixed_point(f: Callable[[mpf], mpf], x0=1000, rtol: float = 1e-9, max_iter: int = 10_000) -> mpf:
    """Iterate ``x <- f(x)`` from ``x0`` until the relative change drops below ``rtol``."""
    x = mpf(x0)
    for _ in range(max_iter):
        nxt = f(x)
        if abs(nxt - x) <= rtol * abs(nxt):
            return nxt
        x = nxt
    raise ConvergenceError("fixed-point iteration did not converge")


def _certify_fixed_point(f: Callable[[mpf], mpf], x: mpf, rtol: float) -> mpf:
    """Nudge ``x`` up until ``f(X) < X`` holds, so no n >= X satisfies n < f(n)."""
    bump = max(rtol * 10, 1e-12)
    for _ in range(60):
        X = x * (1 + bump)
        if f(X) < X:
            return X
        bump *= 2
    raise ConvergenceError("could not certify the fixed point")


def _heights_initial(consts: FieldConstants) -> list[CertifiedReal]:
    # D h(gamma_j) with D = 6: h(a) = log(23)/3, h(delta) = log(delta)/2, h(alpha) = log(alpha)/3
    return [2 * consts.const(23).log(), 3 * consts.log_delta, 2 * consts.log_alpha]


def bound_chain(consts: FieldConstants, rtol: float = 1e-9) -> BoundChainReport:
    reg = load_registry()
    p = consts.precision_bits
    c = consts.const
    results: list[ClaimResult] = []
    values: dict = {}

    def record(claim_id: str, value, detail: str = "") -> None:
        values[claim_id] = value
        results.append(compare(reg[claim_id], value, detail))

    s, d = 3, 6
    h_rest = _heights_initial(consts)[1:]

    # Lambda: the initial three-term form
    e0 = bms_real_coefficient(s, d, _heights_initial(consts))
    record("plastic_number", consts.alpha)
    envelopes = (
        consts.alpha.certainly_gt(Fraction(132, 100)) and consts.alpha.certainly_lt(Fraction(133, 100))
        and consts.beta_abs.certainly_gt(Fraction(86, 100)) and consts.beta_abs.certainly_lt(Fraction(87, 100))
        and consts.a.certainly_gt(Fraction(72, 100)) and consts.a.certainly_lt(Fraction(73, 100))
        and consts.b_abs.certainly_gt(Fraction(24, 100)) and consts.b_abs.certainly_lt(Fraction(25, 100))
    )
    record("numeric_envelopes", envelopes)
    # worst case: n1 = 0 contributes |eta|^0 = 1, and the conjugate parts of
    # P_m, P_m1 are each at most 2|b||beta|^k with k >= 1
    eta_sum = 1 + consts.eta_abs ** 300 + 4 * consts.b_abs * consts.beta_abs
    record("eta_beta_sum", eta_sum)
    record("lambda_exponent", lambda_exponent(consts))
    record("initial", e0)

    # Case 1: (n - n1) log(delta) is the small one
    slack = height_slack(consts)
    record("h_gamma1_slack", slack)
    h1 = e0 / 2
    record("h_gamma1_case1", h1, "h(gamma_1) < (n - n1) log(delta)/2 + 1.74")
    record("case1_A1", 6 * (h1 + c("1.74")))
    e1 = bms_real_coefficient(s, d, [c(CASE1_A1), *h_rest])
    record("case1", e1)
    record("case1_comparison", e1)

    # Case 2: (m - m1) log(alpha) is the small one
    h2 = e0 / 3
    record("case2_h", h2, "h(gamma_1) < (m - m1) log(alpha)/3 + 1.74")
    record("case2_A1", 6 * (h2 + c("1.74")))
    e2 = bms_real_coefficient(s, d, [c(CASE2_A1), *h_rest])
    record("case2", e2)

    min_bound = LogTerm(e0, 1)
    big = e1.max_with(e2)
    max_bound = LogTerm(big, 2)
    record("lmin_max", e0)
    record("plmin_max", big)

    # Lambda_3: both gaps are bounded by max_bound
    pref3 = c(ETA_BETA_SUM) / (consts.a * (consts.alpha - 1))
    record("lambda3_prefactor", pref3)
    h3 = big * 5 / 6
    record("lambda3_h", h3, "h(gamma_1) < (n - n1) log(delta)/2 + (m - m1) log(alpha)/3 + 1.74")
    record("lambda3_A1", 6 * (h3 + c("1.74")))
    e3 = bms_real_coefficient(s, d, [c(LAMBDA3_A1), *h_rest])
    record("lambda3", e3)
    record("lambda3_n_inequality", e3 / consts.log_delta,
           "coefficient of (1 + log 2n)^3 once log|Lambda_3| < log 13.5 - (n - 3) log(delta) is divided by log(delta)")

    term3 = LogTerm(e3, 3)
    with mp.workprec(p):
        def loose(x):
            return 3 + term3.at(x)

        ld_lo = consts.log_delta.lower
        log_pref = mp.log(c(LAMBDA3_PREFACTOR).upper)

        def strict(x):
            return 3 + (term3.at(x) + log_pref) / ld_lo

        x_loose = _certify_fixed_point(loose, solve_fixed_point(loose, rtol=rtol), rtol)
        x_strict = _certify_fixed_point(strict, solve_fixed_point(strict, rtol=rtol), rtol)
    record("n_upper", CertifiedReal(x_loose._mpf_, x_loose._mpf_, p),
           f"solving n - 3 < C (1 + log 2n)^3 as printed; keeping the 1/log(delta) factor gives {mp.nstr(x_strict, 6)}")

    return BoundChainReport(min_bound, max_bound, x_loose, x_strict, values, results)


def lambda_exponent(consts: FieldConstants) -> int:
    """Smallest integer e with |a^-1 delta^n alpha^-m - 1| < max(delta^(n1-n+e), alpha^(m1-m+e)).

    From |delta^n - a alpha^m| < (1 + a + 3.02) max(delta^n1, alpha^m1) and
    alpha^m > alpha delta^(n-3), the delta branch needs
    3 + log(K / (a alpha)) / log(delta) and the alpha branch log(K / a) / log(alpha),
    with K = 1 + a + 3.02.
    """
    k = 1 + consts.a + consts.const(ETA_BETA_SUM)
    d_side = 3 + (k / (consts.a * consts.alpha)).log() / consts.log_delta
    a_side = (k / consts.a).log() / consts.log_alpha
    need = d_side.max_with(a_side)
    return math.ceil(need.bounds()[1])
