import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pillaicert.certified import CertifiedReal
from pillaicert.contfrac import cf_expand, find_convergent_exceeding
from pillaicert.reduction import (
    PRINTED_M,
    DPInstance,
    ReductionContext,
    dp_reduce,
    epsilon,
    fam_gamma1,
    prefactors,
    run_family,
)

BITS = 256


def cr(x, bits=BITS):
    return CertifiedReal.from_fraction(Fraction(x), bits)


@pytest.fixture(scope="module")
def toy():
    sqrt2 = CertifiedReal.from_int(2, BITS).sqrt()
    _, _, q = find_convergent_exceeding(cf_expand(sqrt2, 40), 6000)
    return sqrt2, q


def brute_force_violations(tau: float, mu: float, A: float, B: float, M: int, w_min: int, w_cap: int = 50):
    """All (u, v, w) with u <= M, w_min <= w <= w_cap and 0 < |u tau - v + mu| < A B^-w."""
    out = []
    for u in range(M + 1):
        x = u * tau + mu
        v = round(x)
        for vv in (v - 1, v, v + 1):
            d = abs(x - vv)
            if d == 0:
                continue
            for w in range(max(w_min, 0), w_cap + 1):
                if d < A * B ** (-w):
                    out.append((u, vv, w))
    return out


def test_toy_third_is_nonpositive(toy):
    # q = 13860 is a multiple of 3, so ||q/3|| = 0 and the lemma gives nothing
    sqrt2, q = toy
    assert q == 13860
    out = dp_reduce(DPInstance(sqrt2, cr(Fraction(1, 3)), cr(10), cr(2), 1000, q))
    assert out.status == "epsilon_nonpositive"


def test_toy_instance_against_exhaustive_search(toy):
    sqrt2, q = toy
    inst = DPInstance(sqrt2, cr(Fraction(1, 13)), cr(10), cr(2), 1000, q)
    out = dp_reduce(inst)
    assert out.status == "reduced" and out.epsilon.is_positive()
    w0 = out.w_bound.ceil_upper()
    assert brute_force_violations(math.sqrt(2), 1 / 13, 10, 2, 1000, w0) == []
    # the search itself can find solutions below the bound, so it is not vacuous
    assert brute_force_violations(math.sqrt(2), 1 / 3, 10, 2, 1000, 0)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50), max_denominator=97),
       st.integers(1, 40), st.integers(100, 1000))
def test_toy_soundness_property(mu, A, M):
    sqrt2 = CertifiedReal.from_int(2, BITS).sqrt()
    _, _, q = find_convergent_exceeding(cf_expand(sqrt2, 40), 6 * M)
    out = dp_reduce(DPInstance(sqrt2, cr(mu), cr(A), cr(3), M, q))
    if out.status == "reduced":
        w0 = out.w_bound.ceil_upper()
        assert brute_force_violations(math.sqrt(2), float(mu), A, 3, M, w0) == []


def test_reduced_outcome_matches_formula(toy):
    sqrt2, q = toy
    out = dp_reduce(DPInstance(sqrt2, cr(Fraction(1, 13)), cr(10), cr(2), 1000, q))
    want = (10 * q / out.epsilon).log() / cr(2).log()
    assert out.w_bound.overlaps(want)


def test_mu_zero_is_nonpositive(toy):
    sqrt2, q = toy
    out = dp_reduce(DPInstance(sqrt2, cr(0), cr(10), cr(2), 1000, q))
    assert out.status == "epsilon_nonpositive" and out.w_bound is None
    assert out.epsilon.certainly_lt(0)


def test_instance_validation(toy):
    sqrt2, q = toy
    with pytest.raises(ValueError):
        DPInstance(sqrt2, cr(0), cr(10), cr(2), q, q)
    with pytest.raises(ValueError):
        DPInstance(sqrt2, cr(0), cr(-1), cr(2), 1000, q)
    with pytest.raises(ValueError):
        DPInstance(sqrt2, cr(0), cr(1), cr(1), 1000, q)


@given(st.fractions(min_value=0, max_value=Fraction(1, 2)), st.fractions(min_value=0, max_value=Fraction(1, 2)),
       st.integers(1, 10**6), st.integers(1, 10**6))
def test_epsilon_monotone_in_M(a, b, m1, m2):
    lo, hi = sorted((m1, m2))
    e_lo, e_hi = epsilon(cr(a), cr(b), lo), epsilon(cr(a), cr(b), hi)
    assert e_hi.certainly_le(e_lo) or e_hi.overlaps(e_lo)


@pytest.fixture(scope="module")
def ctx():
    return ReductionContext.build(384)


def test_initial_positive_branch(ctx):
    res = run_family(ctx, ("initial", 1), PRINTED_M)
    A = prefactors(ctx.consts)["gamma_pos_prefactor_delta"]
    assert res.min_eps_primary.certainly_gt(Fraction(37, 100))
    assert res.w(ctx, A, ctx.consts.log_delta).certainly_lt(252)


def test_doubling_M_moves_bound_by_log2(ctx):
    A = ctx.consts.const(270)
    logB = ctx.consts.log_delta
    w1 = run_family(ctx, ("initial", 1), PRINTED_M).w(ctx, A, logB)
    w2 = run_family(ctx, ("initial", 1), 2 * PRINTED_M).w(ctx, A, logB)
    growth = w2 - w1
    assert growth.certainly_ge(0)
    assert growth.certainly_le(ctx.consts.const(2).log() / logB)


def test_k1_golden_identity(ctx):
    fam = fam_gamma1(ctx, 1, 3)
    c = ctx.consts
    want = -c.log_delta - c.log_a  # delta - 1 = 1/delta
    assert fam.row[0].overlaps(want)


def test_family_min_matches_single_instances(ctx):
    res = run_family(ctx, ("gamma2", 1, 12), PRINTED_M, keep_samples=True)
    exp = ctx.expansion("tau")
    q = exp.convergents[res.primary_index][1]
    best = None
    for l in range(1, 13):
        mu = -(ctx.consts.log_a + (ctx.consts.alpha**l - 1).log()) / ctx.consts.log_alpha
        out = dp_reduce(DPInstance(ctx.tau, mu, ctx.consts.const(540), ctx.consts.delta, PRINTED_M, q))
        if out.status == "reduced":
            best = out.epsilon if best is None or out.epsilon.center < best.center else best
    assert best.overlaps(res.min_eps[res.primary_index])


def test_gamma3_corner_member_stable_under_doubling():
    lo = run_family(ReductionContext.build(384), ("gamma3", 1, 1, 1), PRINTED_M)
    hi = run_family(ReductionContext.build(768), ("gamma3", 1, 1, 1), PRINTED_M)
    assert lo.min_eps.keys() == hi.min_eps.keys()
    for k in lo.min_eps:
        assert lo.min_eps[k].overlaps(hi.min_eps[k])


def test_determinism_and_parallel_agreement(ctx):
    recipe = ("gamma3", -1, 20, 300)
    a = run_family(ctx, recipe, PRINTED_M, workers=1)
    b = run_family(ctx, recipe, PRINTED_M, workers=1)
    c = run_family(ctx, recipe, PRINTED_M, workers=2)
    assert a.min_eps.keys() == b.min_eps.keys() == c.min_eps.keys()
    for k in a.min_eps:
        assert a.min_eps[k].bounds() == b.min_eps[k].bounds() == c.min_eps[k].bounds()
    assert sorted(map(repr, a.fallbacks)) == sorted(map(repr, c.fallbacks))
    assert a.size == c.size == 6000


# -- the published campaigns ----------------------------------------------

PUBLISHED_CASES = [
    # campaign, bound name, printed epsilon, printed bound
    ("gamma_pos", "n", "0.37", 250),
    ("gamma_neg", "n", "0.0867", 246),
    ("gamma_neg", "m", "0.0867", 413),
    ("gamma1_pos", "m", "0.00292", 441),
    ("gamma1_neg", "m", None, 435),
    ("gamma2_pos", "n", "0.000354", 256),
    ("gamma2_neg", "n", "0.000508", 256),
    ("gamma3_pos", "n", "1.43e-6", 271),
]


@pytest.mark.parametrize("cid,name,eps,bound", PUBLISHED_CASES)
def test_published_campaign(replay_reductions, cid, name, eps, bound):
    r = replay_reductions.campaigns[cid]
    if eps is not None:
        assert r.min_epsilon.certainly_ge(Fraction(eps)), f"{cid}: eps {r.min_epsilon} below {eps}"
    derived = r.derived[name]
    assert derived is not None
    assert bound - 2 <= derived <= bound + 2, f"{cid}.{name}: derived {derived}, printed {bound}"


def test_all_campaign_bounds_within_slack(replay_reductions):
    for cid, r in replay_reductions.campaigns.items():
        for name, val in r.derived.items():
            assert val is not None and val >= 1
            if name in r.printed:
                assert val <= r.printed[name] + 2, f"{cid}.{name}: {val} vs {r.printed[name]}"


def test_final_bound_below_300(replay_reductions):
    assert replay_reductions.final_bound() < 300
    assert replay_reductions.bits >= 384
