"""The Dujella-Petho reduction and the campaigns that shrink the bound on n.

Every family member solves ``0 < u tau - v + mu < A B^-w`` for a fixed
convergent denominator q.  Members whose epsilon is not positive at the chosen
convergent are retried with the following convergents (still q > 6M).  Per
convergent, the largest w comes from the smallest epsilon, so a family is
summarised by one minimum per convergent and one bound per (A, B) pair.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .certified import MAX_PRECISION, CertifiedReal, PrecisionError
from .claims import integer_bound
from .contfrac import CFExpansion, cf_expand, find_convergent_exceeding
from .field import FieldConstants, build_constants

PRINTED_M = 245 * 10**45
MAX_FALLBACK = 6
CF_TERMS = 110
REDUCTION_START_BITS = 384


class Indeterminate(PrecisionError):
    """An epsilon enclosure straddles zero."""


# -- the lemma ------------------------------------------------------------


@dataclass(frozen=True)
class DPInstance:
    tau: CertifiedReal
    mu: CertifiedReal
    A: CertifiedReal
    B: CertifiedReal
    M: int
    q: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be positive")
        if self.q <= 6 * self.M:
            raise ValueError("q must exceed 6M")
        if not self.A.is_positive():
            raise ValueError("A must be positive")
        if not self.B.certainly_gt(1):
            raise ValueError("B must exceed 1")


@dataclass(frozen=True)
class ReductionOutcome:
    epsilon: CertifiedReal
    w_bound: CertifiedReal | None
    status: str  # reduced, epsilon_nonpositive or indeterminate


def epsilon(mu_q: CertifiedReal, tau_q: CertifiedReal, M: int) -> CertifiedReal:
    """||mu q|| - M ||tau q||, from the products mu*q and tau*q."""
    return mu_q.dist_to_int() - M * tau_q.dist_to_int()


def w_bound(A: CertifiedReal, q: int, eps: CertifiedReal, log_B: CertifiedReal) -> CertifiedReal:
    return (A * q / eps).log() / log_B


def dp_reduce(inst: DPInstance) -> ReductionOutcome:
    eps = epsilon(inst.mu * inst.q, inst.tau * inst.q, inst.M)
    if eps.is_positive():
        return ReductionOutcome(eps, w_bound(inst.A, inst.q, eps, inst.B.log()), "reduced")
    if eps.certainly_le(0):
        return ReductionOutcome(eps, None, "epsilon_nonpositive")
    return ReductionOutcome(eps, None, "indeterminate")


# -- shared context -------------------------------------------------------


@dataclass
class ReductionContext:
    """Constants and convergents at one working precision."""

    bits: int
    consts: FieldConstants
    tau: CertifiedReal
    tau_inv: CertifiedReal
    cf_tau: CFExpansion
    cf_inv: CFExpansion

    @classmethod
    def build(cls, bits: int) -> ReductionContext:
        c = build_constants(bits)
        tau = c.log_delta / c.log_alpha
        inv = c.log_alpha / c.log_delta
        return cls(bits, c, tau, inv, cf_expand(tau, CF_TERMS), cf_expand(inv, CF_TERMS))

    def ratio(self, kind: str) -> CertifiedReal:
        return self.tau if kind == "tau" else self.tau_inv

    def expansion(self, kind: str) -> CFExpansion:
        return self.cf_tau if kind == "tau" else self.cf_inv

    def base_log(self, kind: str) -> CertifiedReal:
        """Denominator of mu: log(alpha) for tau, log(delta) for its inverse."""
        return self.consts.log_alpha if kind == "tau" else self.consts.log_delta


# -- families -------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    """mu for member (i, j) is (row[i] - col[j]) / base; 1-D families have col == (0,)."""

    kind: str  # "tau" or "inv"
    labels_row: tuple
    labels_col: tuple
    row: tuple[CertifiedReal, ...]
    col: tuple[CertifiedReal, ...]

    @property
    def size(self) -> int:
        return len(self.row) * len(self.col)

    def label(self, i: int, j: int):
        if len(self.col) == 1:
            return self.labels_row[i]
        return (self.labels_row[i], self.labels_col[j])


@dataclass
class FamilyResult:
    kind: str
    M: int
    size: int
    primary_index: int
    min_eps: dict[int, CertifiedReal]  # convergent index -> smallest epsilon
    fallbacks: list[tuple] = field(default_factory=list)  # (label, convergent index)
    unresolved: list = field(default_factory=list)
    eps_samples: list[float] = field(default_factory=list)
    bits: int = 0

    @property
    def min_eps_primary(self) -> CertifiedReal:
        return self.min_eps[self.primary_index]

    def w(self, ctx: ReductionContext, A: CertifiedReal, log_B: CertifiedReal) -> CertifiedReal | None:
        if self.unresolved:
            return None
        exp = ctx.expansion(self.kind)
        out = None
        for idx in sorted(self.min_eps):
            wi = w_bound(A, exp.convergents[idx][1], self.min_eps[idx], log_B)
            out = wi if out is None else out.max_with(wi)
        return out


def _min(a: CertifiedReal | None, b: CertifiedReal) -> CertifiedReal:
    if a is None:
        return b
    return -((-a).max_with(-b))


def _scaled(values: Sequence[CertifiedReal], factor: CertifiedReal) -> list[CertifiedReal]:
    return [v * factor for v in values]


def _eval_rows(ctx: ReductionContext, fam: Family, M: int, rows: range, keep_samples: bool) -> FamilyResult:
    exp = ctx.expansion(fam.kind)
    tau = ctx.ratio(fam.kind)
    base = ctx.base_log(fam.kind)
    primary, _, _ = find_convergent_exceeding(exp, 6 * M)
    cache: dict[int, tuple] = {}

    def prepared(idx: int):
        if idx not in cache:
            if idx >= exp.certified_terms:
                raise PrecisionError("ran out of certified convergents")
            q = exp.convergents[idx][1]
            factor = q / base
            cache[idx] = (_scaled(fam.row, factor), _scaled(fam.col, factor), M * (tau * q).dist_to_int())
        return cache[idx]

    res = FamilyResult(fam.kind, M, len(rows) * len(fam.col), primary, {}, bits=ctx.bits)
    rq, cq, mt = prepared(primary)
    for i in rows:
        for j in range(len(fam.col)):
            eps = (rq[i] - cq[j]).dist_to_int() - mt
            idx = primary
            while not eps.is_positive():
                if not eps.certainly_le(0):
                    raise Indeterminate(f"epsilon undecided for member {fam.label(i, j)} at {ctx.bits} bits")
                idx += 1
                if idx > primary + MAX_FALLBACK:
                    res.unresolved.append(fam.label(i, j))
                    break
                r2, c2, m2 = prepared(idx)
                eps = (r2[i] - c2[j]).dist_to_int() - m2
            else:
                res.min_eps[idx] = _min(res.min_eps.get(idx), eps)
                if idx != primary:
                    res.fallbacks.append((fam.label(i, j), idx))
                elif keep_samples:
                    res.eps_samples.append(float(eps))
    return res


def _merge(parts: list[FamilyResult]) -> FamilyResult:
    out = parts[0]
    for p in parts[1:]:
        out.size += p.size
        for idx, e in p.min_eps.items():
            out.min_eps[idx] = _min(out.min_eps.get(idx), e)
        out.fallbacks.extend(p.fallbacks)
        out.unresolved.extend(p.unresolved)
        out.eps_samples.extend(p.eps_samples)
    return out


# Grid families are rebuilt inside worker processes from this small recipe.
def _family_from_recipe(ctx: ReductionContext, recipe: tuple) -> Family:
    name, args = recipe[0], recipe[1:]
    return FAMILY_BUILDERS[name](ctx, *args)


def _worker(bits: int, recipe: tuple, M: int, start: int, stop: int, keep: bool) -> FamilyResult:
    ctx = ReductionContext.build(bits)
    fam = _family_from_recipe(ctx, recipe)
    return _eval_rows(ctx, fam, M, range(start, stop), keep)


def run_family(
    ctx: ReductionContext, recipe: tuple, M: int, workers: int = 1, keep_samples: bool = True
) -> FamilyResult:
    fam = _family_from_recipe(ctx, recipe)
    n = len(fam.row)
    if workers <= 1 or fam.size < 5000:
        return _eval_rows(ctx, fam, M, range(n), keep_samples)
    chunks = max(workers * 4, 1)
    bounds = [(n * i // chunks, n * (i + 1) // chunks) for i in range(chunks)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(_worker, ctx.bits, recipe, M, a, b, keep_samples) for a, b in bounds if b > a]
        parts = [f.result() for f in futs]  # submission order keeps the merge deterministic
    return _merge(parts)


# -- family definitions ---------------------------------------------------


def _log_delta_k_minus_1(ctx: ReductionContext, k: int) -> CertifiedReal:
    return (ctx.consts.delta**k - 1).log()


def _log_alpha_l_minus_1(ctx: ReductionContext, l: int) -> CertifiedReal:
    return (ctx.consts.alpha**l - 1).log()


def fam_initial(ctx: ReductionContext, sign: int) -> Family:
    la = ctx.consts.log_a
    if sign > 0:  # n tau - m + log(1/a)/log(alpha)
        return Family("tau", ("-",), (0,), (-la,), (ctx.consts.const(0),))
    return Family("inv", ("-",), (0,), (la,), (ctx.consts.const(0),))  # m tau' - n + log(a)/log(delta)


def fam_gamma1(ctx: ReductionContext, sign: int, k_max: int) -> Family:
    la = ctx.consts.log_a
    ks = tuple(range(1, k_max + 1))
    vals = [_log_delta_k_minus_1(ctx, k) - la for k in ks]  # log((delta^k - 1)/a)
    zero = (ctx.consts.const(0),)
    if sign > 0:
        return Family("tau", ks, (0,), tuple(vals), zero)
    return Family("inv", ks, (0,), tuple(-v for v in vals), zero)


def fam_gamma2(ctx: ReductionContext, sign: int, l_max: int) -> Family:
    la = ctx.consts.log_a
    ls = tuple(range(1, l_max + 1))
    vals = [la + _log_alpha_l_minus_1(ctx, l) for l in ls]  # log(a (alpha^l - 1))
    zero = (ctx.consts.const(0),)
    if sign > 0:  # mu = log(1/(a (alpha^l - 1)))/log(alpha)
        return Family("tau", ls, (0,), tuple(-v for v in vals), zero)
    return Family("inv", ls, (0,), tuple(vals), zero)


def fam_gamma3(ctx: ReductionContext, sign: int, k_max: int, l_max: int) -> Family:
    la = ctx.consts.log_a
    ks = tuple(range(1, k_max + 1))
    ls = tuple(range(1, l_max + 1))
    row = [_log_delta_k_minus_1(ctx, k) - la for k in ks]
    col = [_log_alpha_l_minus_1(ctx, l) for l in ls]
    if sign > 0:  # mu = (row_k - col_l)/log(alpha)
        return Family("tau", ks, ls, tuple(row), tuple(col))
    return Family("inv", ks, ls, tuple(-r for r in row), tuple(-c for c in col))


FAMILY_BUILDERS: dict[str, Callable[..., Family]] = {
    "initial": fam_initial,
    "gamma1": fam_gamma1,
    "gamma2": fam_gamma2,
    "gamma3": fam_gamma3,
}


# -- prefactors -----------------------------------------------------------


def prefactors(consts: FieldConstants) -> dict[str, CertifiedReal]:
    """Re-derived A constants for every sub-case, keyed like the claims they check."""
    c = consts.const
    la, ld = consts.log_alpha, consts.log_delta
    d3 = consts.delta**3
    lam1 = c("5.21")
    return {
        "gamma_pos_prefactor_delta": consts.delta**9 / la,
        "gamma_pos_prefactor_alpha": consts.alpha**10 / la,
        "gamma_neg_prefactor_delta": consts.delta**9 / ld,
        "gamma_neg_prefactor_alpha": consts.alpha**10 / ld,
        "gamma1_pos_prefactor": 2 * lam1 / la,
        "gamma1_neg_prefactor": 2 * lam1 / ld,
        "gamma2_pos_prefactor": 36 * d3 / la,
        "gamma2_neg_prefactor": 36 * d3 / ld,
        "gamma3_prefactor": 27 * d3 / la,
        "gamma3_neg_prefactor": 27 * d3 / ld,
    }


def rigorous_prefactors(consts: FieldConstants) -> dict[str, CertifiedReal]:
    """Prefactors rebuilt from the error terms themselves rather than the rounded constants."""
    c = consts.const
    a, al = consts.a, consts.alpha
    la, ld = consts.log_alpha, consts.log_delta
    d3 = consts.delta**3
    k = c("3.02")
    lam1 = 1 + k / (a * al)  # |Lambda_1| < lam1 alpha^(m1 - m)
    lam2 = (1 + k) / (a * (al - 1))  # |Lambda_2| < lam2 delta^(n1 - n + 3)
    lam3 = k / (a * (al - 1))  # |Lambda_3| < lam3 delta^(3 - n)
    out = prefactors(consts)
    out.update(
        {
            "gamma1_pos_prefactor": 2 * lam1 / la,
            "gamma1_neg_prefactor": 2 * lam1 / ld,
            "gamma2_pos_prefactor": 2 * lam2 * d3 / la,
            "gamma2_neg_prefactor": 2 * lam2 * d3 / ld,
            "gamma3_prefactor": 2 * lam3 * d3 / la,
            "gamma3_neg_prefactor": 2 * lam3 * d3 / ld,
        }
    )
    return out


# Constants as printed, used when replaying the published computation.
PRINTED_A = {
    "gamma_pos_prefactor_delta": "270",
    "gamma_pos_prefactor_alpha": "60",
    "gamma_neg_prefactor_delta": "160",
    "gamma_neg_prefactor_alpha": "37",
    "gamma1_pos_prefactor": "38",
    "gamma1_neg_prefactor": "30",
    "gamma2_pos_prefactor": "540",
    "gamma2_neg_prefactor": "320",
    "gamma3_prefactor": "240",
    "gamma3_neg_prefactor": "240",
}


# -- campaigns ------------------------------------------------------------


@dataclass
class CampaignResult:
    id: str
    family: FamilyResult
    bounds: dict[str, CertifiedReal | None]  # bound name -> w enclosure
    derived: dict[str, int | None]
    printed: dict[str, int] = field(default_factory=dict)

    @property
    def family_size(self) -> int:
        return self.family.size

    @property
    def min_epsilon(self) -> CertifiedReal:
        return self.family.min_eps_primary

    @property
    def status(self) -> str:
        return "reduced" if all(v is not None for v in self.derived.values()) else "epsilon_nonpositive"


def _campaign(ctx, cid, recipe, M, bounds_spec, workers, printed=None) -> CampaignResult:
    fam = run_family(ctx, recipe, M, workers)
    ws, derived = {}, {}
    for name, (A, base, relation) in bounds_spec.items():
        log_B = ctx.consts.log_delta if base == "delta" else ctx.consts.log_alpha
        w = fam.w(ctx, A, log_B)
        ws[name] = w
        derived[name] = None if w is None else integer_bound(w, relation)
    return CampaignResult(cid, fam, ws, derived, printed or {})


@dataclass(frozen=True)
class CampaignPlan:
    """Which constants, multipliers M and ranges to use for the four campaigns."""

    A: dict[str, CertifiedReal]
    M_n: int  # bound for u in {n, n1}
    M_m: int  # bound for u in {m, m1}
    k_gamma1: int = 250
    l_gamma2: int = 420
    k_gamma3: int = 256
    l_gamma3: int = 441


def printed_plan(consts: FieldConstants) -> CampaignPlan:
    return CampaignPlan({k: consts.const(v) for k, v in PRINTED_A.items()}, PRINTED_M, PRINTED_M)


def campaign_initial(ctx: ReductionContext, plan: CampaignPlan, workers: int = 1) -> list[CampaignResult]:
    A = plan.A
    pos = _campaign(
        ctx, "gamma_pos", ("initial", 1), plan.M_n,
        {"n": (A["gamma_pos_prefactor_delta"], "delta", "<"), "m": (A["gamma_pos_prefactor_alpha"], "alpha", "<")},
        workers, {"n": 250, "m": 420},
    )
    neg = _campaign(
        ctx, "gamma_neg", ("initial", -1), plan.M_m,
        {"n": (A["gamma_neg_prefactor_delta"], "delta", "<"), "m": (A["gamma_neg_prefactor_alpha"], "alpha", "<")},
        workers, {"n": 246, "m": 413},
    )
    return [pos, neg]


def campaign_gamma1(ctx: ReductionContext, plan: CampaignPlan, k_max: int | None = None, workers: int = 1):
    k_max = plan.k_gamma1 if k_max is None else k_max
    A = plan.A
    pos = _campaign(ctx, "gamma1_pos", ("gamma1", 1, k_max), plan.M_n,
                    {"m": (A["gamma1_pos_prefactor"], "alpha", "<")}, workers, {"m": 441})
    neg = _campaign(ctx, "gamma1_neg", ("gamma1", -1, k_max), plan.M_m,
                    {"m": (A["gamma1_neg_prefactor"], "alpha", "<=")}, workers, {"m": 435})
    return [pos, neg]


def campaign_gamma2(ctx: ReductionContext, plan: CampaignPlan, l_max: int | None = None, workers: int = 1):
    l_max = plan.l_gamma2 if l_max is None else l_max
    A = plan.A
    pos = _campaign(ctx, "gamma2_pos", ("gamma2", 1, l_max), plan.M_n,
                    {"n": (A["gamma2_pos_prefactor"], "delta", "<")}, workers, {"n": 256})
    neg = _campaign(ctx, "gamma2_neg", ("gamma2", -1, l_max), plan.M_m,
                    {"n": (A["gamma2_neg_prefactor"], "delta", "<")}, workers, {"n": 256})
    return [pos, neg]


def campaign_gamma3(
    ctx: ReductionContext, plan: CampaignPlan, k_max: int | None = None, l_max: int | None = None, workers: int = 1
):
    k_max = plan.k_gamma3 if k_max is None else k_max
    l_max = plan.l_gamma3 if l_max is None else l_max
    A = plan.A
    pos = _campaign(ctx, "gamma3_pos", ("gamma3", 1, k_max, l_max), plan.M_n,
                    {"n": (A["gamma3_prefactor"], "delta", "<")}, workers, {"n": 271})
    neg = _campaign(ctx, "gamma3_neg", ("gamma3", -1, k_max, l_max), plan.M_m,
                    {"n": (A["gamma3_neg_prefactor"], "delta", "<")}, workers)
    return [pos, neg]


@dataclass
class ReductionReport:
    bits: int
    escalations: list[str]
    campaigns: dict[str, CampaignResult]
    plan: CampaignPlan
    context: ReductionContext

    def final_bound(self) -> int | None:
        vals = [self.campaigns[c].derived["n"] for c in ("gamma3_pos", "gamma3_neg")]
        return None if None in vals else max(vals)


def _run_all(ctx: ReductionContext, plan_for: Callable[[ReductionContext], CampaignPlan], chained: bool, workers: int):
    plan = plan_for(ctx)
    results: dict[str, CampaignResult] = {}
    for r in campaign_initial(ctx, plan, workers):
        results[r.id] = r
    if chained:
        # feed each stage's derived ranges into the next
        k1 = _range_from(results, [("gamma_pos", "n"), ("gamma_neg", "n")])
        l2 = _range_from(results, [("gamma_pos", "m"), ("gamma_neg", "m")])
        plan = CampaignPlan(plan.A, plan.M_n, plan.M_m, k1, l2, plan.k_gamma3, plan.l_gamma3)
    for r in campaign_gamma1(ctx, plan, workers=workers) + campaign_gamma2(ctx, plan, workers=workers):
        results[r.id] = r
    if chained:
        k3 = max(plan.k_gamma1, _range_from(results, [("gamma2_pos", "n"), ("gamma2_neg", "n")]))
        l3 = max(plan.l_gamma2, _range_from(results, [("gamma1_pos", "m"), ("gamma1_neg", "m")]))
        plan = CampaignPlan(plan.A, plan.M_n, plan.M_m, plan.k_gamma1, plan.l_gamma2, k3, l3)
    for r in campaign_gamma3(ctx, plan, workers=workers):
        results[r.id] = r
    return results, plan


def _range_from(results, keys) -> int:
    """Largest gap allowed by the given bounds (converted to '<=' form)."""
    out = 0
    for cid, name in keys:
        w = results[cid].bounds[name]
        if w is None:
            raise PrecisionError(f"{cid} did not reduce")
        out = max(out, integer_bound(w, "<="))
    return out


def run_reductions(
    start_bits: int = REDUCTION_START_BITS,
    plan_for: Callable[[ReductionContext], CampaignPlan] | None = None,
    chained: bool = False,
    workers: int = 1,
) -> ReductionReport:
    """All campaigns, doubling the precision whenever a quantity cannot be certified."""
    plan_for = plan_for or (lambda ctx: printed_plan(ctx.consts))
    bits = start_bits
    escalations: list[str] = []
    while True:
        try:
            ctx = ReductionContext.build(bits)
            results, plan = _run_all(ctx, plan_for, chained, workers)
            return ReductionReport(bits, escalations, results, plan, ctx)
        except PrecisionError as exc:
            if bits >= MAX_PRECISION:
                raise
            escalations.append(f"{bits} bits: {exc}")
            bits = min(2 * bits, MAX_PRECISION)


def rigorous_plan(n_upper: int) -> Callable[[ReductionContext], CampaignPlan]:
    """Re-derived prefactors, M from the strict fixed point, and u = m bounded by 2n."""

    def make(ctx: ReductionContext) -> CampaignPlan:
        return CampaignPlan(rigorous_prefactors(ctx.consts), n_upper, 2 * n_upper)

    return make


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))
