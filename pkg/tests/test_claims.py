import json
from fractions import Fraction

import pytest

from pillaicert.certified import CertifiedReal
from pillaicert.claims import KINDS, Claim, compare, integer_bound, load_registry, parse_registry


def test_registry_loads_with_unique_ids():
    reg = load_registry()
    ids = [c.id for c in reg.claims]
    assert len(ids) == len(set(ids))
    assert all(c.kind in KINDS for c in reg.claims)
    assert all(c.anchor for c in reg.claims)
    assert {c.stage for c in reg.claims} == {"search", "cf", "bounds", "reduce", "certify"}


def test_errata_are_the_audited_ones():
    reg = load_registry()
    assert sorted(c.id for c in reg.claims if c.erratum) == ["case1_comparison", "convergent_p"]


def test_duplicate_ids_rejected():
    raw = {"version": "1", "claims": [{"id": "x", "stage": "cf", "anchor": "a", "printed": 1, "kind": "exact"}] * 2}
    with pytest.raises(ValueError):
        parse_registry(raw)


def test_integer_bound_relations():
    w = CertifiedReal.from_fraction(Fraction(25132, 100), 64)
    assert integer_bound(w, "<") == 252
    assert integer_bound(w, "<=") == 251
    with pytest.raises(ValueError):
        integer_bound(w, ">")


def _claim(**kw):
    base = dict(id="t", stage="cf", anchor="a", printed="1", kind="approx")
    base.update(kw)
    return Claim(**base)


def test_compare_kinds():
    c = CertifiedReal.from_fraction(Fraction(101, 100), 64)
    assert compare(_claim(tolerance=0.02), c).status == "match"
    assert compare(_claim(tolerance=0.001), c).status == "mismatch"
    assert compare(_claim(kind="upper", printed="1.02"), c).status == "match"
    assert compare(_claim(kind="lower", printed="1.02"), c).status == "mismatch"
    assert compare(_claim(kind="int_bound", printed=250, relation="<", tolerance=2), 252).status == "match"
    assert compare(_claim(kind="int_bound", printed=250, relation="<", tolerance=2), 253).status == "mismatch"
    assert compare(_claim(kind="set", printed=[1, 2]), [2, 1]).status == "match"
    r = compare(_claim(kind="set", printed=[1, 2]), [2, 3])
    assert r.status == "mismatch" and "missing [1]" in r.detail and "extra [3]" in r.detail
    assert compare(_claim(kind="assumption", printed=None), None).status == "assumption"
    d = CertifiedReal.from_fraction(Fraction(10134, 10000), 64)
    assert compare(_claim(kind="digits", printed="1.01"), d).status == "match"
    assert compare(_claim(kind="digits", printed="1.02"), d).status == "mismatch"


def test_erratum_used_for_comparison():
    cl = _claim(printed="2.57e28", tolerance=0.01, erratum={"value": "2.57e27", "reason": "typo"})
    r = compare(cl, CertifiedReal.from_decimal("2.5704e27", 128))
    assert r.status == "match" and r.printed == "2.57e28" and r.corrected == "2.57e27"


def test_result_roundtrip():
    r = compare(_claim(tolerance=0.02), CertifiedReal.from_int(1, 64))
    assert type(r).from_dict(json.loads(json.dumps(r.to_dict()))) == r
