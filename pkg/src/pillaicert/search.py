"""Exhaustive search for integers c with several representations P_m - L_n."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .sequences import LUCAS, PADOVAN, lucas, padovan, recurrence_terms

# Integers with at least two representations, as stated in the main theorem.
THEOREM1 = (
    -643, -310, -171, -74, -48, -27, -26, -13, -11, -9, -8, -6, -4, -2, -1, 0, 1, 2, 3, 4, 5,
    6, 8, 9, 10, 14, 17, 18, 19, 20, 26, 36, 38, 47, 64, 68, 75, 85, 189, 2864, 58269,
)


@dataclass(frozen=True)
class SearchWindow:
    m_min: int = 4
    m_max: int = 189
    n_min: int = 0
    n_max: int = 300

    def __post_init__(self):
        if self.m_min < 0 or self.n_min < 0:
            raise ValueError("window indices must be non-negative")

    @property
    def empty(self) -> bool:
        return self.m_max < self.m_min or self.n_max < self.n_min


@dataclass(frozen=True)
class IndexConvention:
    """Smallest indices admitted for P_m and L_n."""

    m_min: int = 4
    n_min: int = 0

    @property
    def name(self) -> str:
        return f"m>={self.m_min},n>={self.n_min}"

    @classmethod
    def parse(cls, text: str) -> IndexConvention:
        """Accepts ``"m>=4,n>=0"`` (either part optional)."""
        vals = {"m": 4, "n": 0}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, num = part.partition(">=")
            if not sep or key.strip() not in vals:
                raise ValueError(f"bad convention component {part!r}")
            vals[key.strip()] = int(num)
        return cls(vals["m"], vals["n"])


DEFAULT_CONVENTION = IndexConvention()
CONVENTIONS = (
    IndexConvention(4, 0),
    IndexConvention(4, 1),
    IndexConvention(4, 2),
    IndexConvention(5, 0),
    IndexConvention(3, 0),
)


@dataclass(frozen=True)
class RepresentationRecord:
    c: int
    witnesses: tuple[tuple[int, int], ...]

    def verify(self) -> bool:
        return len(set(self.witnesses)) == len(self.witnesses) and all(
            padovan(m) - lucas(n) == self.c for m, n in self.witnesses
        )


def enumerate_differences(
    window: SearchWindow, convention: IndexConvention = DEFAULT_CONVENTION
) -> dict[int, list[tuple[int, int]]]:
    m_lo = max(window.m_min, convention.m_min)
    n_lo = max(window.n_min, convention.n_min)
    out: dict[int, list[tuple[int, int]]] = defaultdict(list)
    if window.m_max < m_lo or window.n_max < n_lo:
        return {}
    P = recurrence_terms(PADOVAN, window.m_max + 1)
    L = recurrence_terms(LUCAS, window.n_max + 1)
    for m in range(m_lo, window.m_max + 1):
        pm = P[m]
        for n in range(n_lo, window.n_max + 1):
            out[pm - L[n]].append((m, n))
    return dict(out)


def multi_represented(diffs: dict[int, list[tuple[int, int]]]) -> list[RepresentationRecord]:
    return [
        RepresentationRecord(c, tuple(sorted(w)))
        for c, w in sorted(diffs.items())
        if len(w) >= 2
    ]


@dataclass
class TheoremComparison:
    window: SearchWindow
    convention: IndexConvention
    found: list[int]
    missing: list[int]
    extra: list[int]
    records: list[RepresentationRecord] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return not self.missing and not self.extra


def verify_theorem(
    window: SearchWindow = SearchWindow(), convention: IndexConvention = DEFAULT_CONVENTION
) -> TheoremComparison:
    records = multi_represented(enumerate_differences(window, convention))
    found = [r.c for r in records]
    want = set(THEOREM1)
    return TheoremComparison(
        window, convention, found, sorted(want - set(found)), sorted(set(found) - want), records
    )


def compare_conventions(window: SearchWindow = SearchWindow(), conventions=CONVENTIONS) -> list[TheoremComparison]:
    """Run the comparison under several index conventions to see which reproduces the published set."""
    return [verify_theorem(window, conv) for conv in conventions]
