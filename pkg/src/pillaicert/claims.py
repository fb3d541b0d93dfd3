"""The claims registry and the comparison rules applied to each claim kind.

The registry (``data/claims.json``) lists every published constant that the
pipeline re-derives, together with the value exactly as printed and, for the
few genuine typos, an audited correction.  Comparisons are made against the
corrected value when one exists; the printed value is always echoed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any

from .certified import CertifiedReal

KINDS = ("approx", "upper", "lower", "int_bound", "exact", "set", "bool", "digits", "assumption")
STATUSES = ("match", "mismatch", "assumption", "error")


@dataclass(frozen=True)
class Claim:
    id: str
    stage: str
    anchor: str
    printed: Any
    kind: str
    tolerance: float | None = None
    relation: str | None = None
    erratum: dict | None = None
    note: str | None = None

    @property
    def reference(self) -> Any:
        """The value comparisons are made against."""
        return self.erratum["value"] if self.erratum else self.printed


@dataclass(frozen=True)
class ClaimResult:
    id: str
    printed: Any
    recomputed: Any
    tolerance: float | None
    status: str
    detail: str = ""
    corrected: Any = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "printed": self.printed,
            "corrected": self.corrected,
            "recomputed": self.recomputed,
            "tolerance": self.tolerance,
            "status": self.status,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ClaimResult:
        return cls(
            id=d["id"],
            printed=d["printed"],
            recomputed=d["recomputed"],
            tolerance=d["tolerance"],
            status=d["status"],
            detail=d.get("detail", ""),
            corrected=d.get("corrected"),
        )


@dataclass(frozen=True)
class Registry:
    version: str
    claims: tuple[Claim, ...] = field(default_factory=tuple)

    def __getitem__(self, claim_id: str) -> Claim:
        for c in self.claims:
            if c.id == claim_id:
                return c
        raise KeyError(claim_id)

    def ids(self, stage: str | None = None) -> list[str]:
        return [c.id for c in self.claims if stage is None or c.stage == stage]


def parse_registry(data: dict) -> Registry:
    claims = []
    seen = set()
    for raw in data["claims"]:
        c = Claim(**raw)
        if c.kind not in KINDS:
            raise ValueError(f"claim {c.id}: unknown kind {c.kind!r}")
        if c.id in seen:
            raise ValueError(f"duplicate claim id {c.id}")
        seen.add(c.id)
        claims.append(c)
    return Registry(version=str(data["version"]), claims=tuple(claims))


@lru_cache(maxsize=1)
def load_registry() -> Registry:
    text = resources.files("pillaicert").joinpath("data/claims.json").read_text(encoding="utf-8")
    return parse_registry(json.loads(text))


def integer_bound(upper: CertifiedReal | float, relation: str) -> int:
    """Smallest integer N certified by ``w < upper`` in the form ``w < N`` or ``w <= N``."""
    if isinstance(upper, CertifiedReal):
        f = math.floor(upper.bounds()[1])
    else:
        f = math.floor(upper)
    if relation == "<":
        return f + 1
    if relation == "<=":
        return f
    raise ValueError(f"unknown relation {relation!r}")


def format_value(value: Any, digits: int = 12) -> Any:
    """JSON-friendly rendering of a recomputed value."""
    if isinstance(value, CertifiedReal):
        return value.to_str(digits)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    return value


def _as_fraction(text: Any) -> Fraction:
    return Fraction(str(text))


def compare(claim: Claim, recomputed: Any, detail: str = "") -> ClaimResult:
    """Apply the claim's comparison rule to a recomputed value."""
    ref = claim.reference
    kind = claim.kind
    notes = [detail] if detail else []

    if kind == "assumption":
        ok = None
    elif kind == "approx":
        rec = float(recomputed)
        target = float(_as_fraction(ref))
        rel = abs(rec - target) / abs(target)
        notes.append(f"relative difference {rel:.3g}")
        ok = rel <= claim.tolerance
    elif kind == "upper":
        # the printed number is asserted to be a valid upper bound
        ok = recomputed.certainly_le(_as_fraction(ref))
        if not ok:
            notes.append("recomputed quantity exceeds the printed bound")
    elif kind == "lower":
        ok = recomputed.certainly_ge(_as_fraction(ref))
        if not ok:
            notes.append("recomputed value falls below the printed lower bound")
    elif kind == "int_bound":
        tol = int(claim.tolerance or 0)
        diff = int(recomputed) - int(ref)
        notes.append(f"derived {claim.relation} {recomputed} vs printed {claim.relation} {ref} ({diff:+d})")
        ok = int(recomputed) >= 1 and diff <= tol
    elif kind == "exact":
        ok = format_value(recomputed) == ref
    elif kind == "set":
        got, want = set(recomputed), set(ref)
        missing, extra = sorted(want - got), sorted(got - want)
        if missing:
            notes.append(f"missing {missing}")
        if extra:
            notes.append(f"extra {extra}")
        ok = not missing and not extra
    elif kind == "bool":
        ok = bool(recomputed) is bool(ref)
    elif kind == "digits":
        text = str(ref)
        places = len(text.split(".")[1]) if "." in text else 0
        scaled = recomputed * (10**places)
        lo, hi = scaled.floor_lower(), scaled.floor()
        if hi is None:
            notes.append("enclosure too wide to fix the truncated digits")
            ok = False
        else:
            ok = Fraction(lo, 10**places) == _as_fraction(text)
    else:  # pragma: no cover - guarded by parse_registry
        raise ValueError(kind)

    if ok is None:
        status = "assumption"
    else:
        status = "match" if ok else "mismatch"
    if claim.erratum:
        notes.append(f"compared against corrected value {claim.erratum['value']}: {claim.erratum['reason']}")
    return ClaimResult(
        id=claim.id,
        printed=claim.printed,
        recomputed=format_value(recomputed),
        tolerance=claim.tolerance,
        status=status,
        detail="; ".join(notes),
        corrected=claim.erratum["value"] if claim.erratum else None,
    )


def error_result(claim: Claim, message: str) -> ClaimResult:
    return ClaimResult(claim.id, claim.printed, None, claim.tolerance, "error", message)
