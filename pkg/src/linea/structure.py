"""Modular points, supersolvability and classification of arrangements.

Also holds executable versions of the structural lemmas, each returning a
:class:`LemmaReport` so callers can tell a pass from a gated skip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .arrangement import Arrangement, CrossingSummary, build
from .projective import ProjPoint, join, line, point, incident
from .scalar import FieldDescriptor

__all__ = [
    "PENCIL",
    "NEAR_PENCIL",
    "SUPERSOLVABLE",
    "NOT_SUPERSOLVABLE",
    "Classification",
    "LemmaReport",
    "PreconditionError",
    "is_modular",
    "modular_points",
    "classify",
    "check_lemma_high_mult_modular",
    "check_no_three_collinear_modular",
    "check_min_crossing_bound",
    "check_mixed_multiplicity",
    "rebuild_from_modular_point",
    "m3_cases",
    "fermat_extension_search",
]

PENCIL = "pencil"
NEAR_PENCIL = "near_pencil"
SUPERSOLVABLE = "supersolvable_nontrivial"
NOT_SUPERSOLVABLE = "not_supersolvable"


class PreconditionError(ValueError):
    """A structural check was asked about an arrangement outside its hypotheses."""


@dataclass(frozen=True)
class Classification:
    verdict: str
    modular_points: tuple  # of (ProjPoint, multiplicity)
    homogeneous: Optional[int]
    notes: tuple = ()

    @property
    def trivial(self) -> bool:
        return self.verdict in (PENCIL, NEAR_PENCIL)

    @property
    def supersolvable(self) -> bool:
        return bool(self.modular_points)

    @property
    def modular_multiplicities(self) -> tuple:
        return tuple(k for _, k in self.modular_points)


@dataclass
class LemmaReport:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    detail: str = ""
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _summary(arr: Arrangement, summary: Optional[CrossingSummary]) -> CrossingSummary:
    return arr.summary if summary is None else summary


def is_modular(arr: Arrangement, summary: Optional[CrossingSummary], p: ProjPoint) -> bool:
    """True iff the join of p with every other crossing is a line of arr.

    Two distinct crossings span a line of arr exactly when some line of arr
    passes through both, so this is decided on line indices alone.
    """
    summary = _summary(arr, summary)
    here = summary.crossing_at(p)
    if here is None:
        raise ValueError(f"{p} is not a crossing point of the arrangement")
    return _modular(here, summary)


def _modular(here, summary: CrossingSummary) -> bool:
    mine = set(here.lines)
    return all(c is here or not mine.isdisjoint(c.lines) for c in summary.crossings)


def modular_points(arr: Arrangement, summary: Optional[CrossingSummary] = None) -> list:
    """Modular crossings as (point, multiplicity), in canonical coordinate order."""
    summary = _summary(arr, summary)
    return [(c.point, c.multiplicity) for c in summary.crossings if _modular(c, summary)]


def _mixed_violations(s: int, summary: CrossingSummary, mods: list, verdict: str) -> list:
    out = []
    for _, m in mods:
        bigger = [c for c in summary.crossings if c.multiplicity > m]
        for c in bigger:
            if s != m + c.multiplicity - 1:
                out.append(f"modular mult {m} with crossing mult {c.multiplicity} but s={s}")
        if bigger:
            if m > 2 and len(mods) != 2:
                out.append(f"modular mult {m} < max but {len(mods)} modular points")
            if m == 2 and verdict != NEAR_PENCIL:
                out.append("double modular point below a higher crossing, yet not a near pencil")
    return out


def classify(arr: Arrangement, summary: Optional[CrossingSummary] = None) -> Classification:
    summary = _summary(arr, summary)
    s = arr.s
    mods = modular_points(arr, summary)
    if summary.n == 1:
        verdict = PENCIL
    elif any(c.multiplicity == s - 1 for c in summary.crossings):
        verdict = NEAR_PENCIL
    elif mods:
        verdict = SUPERSOLVABLE
    else:
        verdict = NOT_SUPERSOLVABLE
    mults = {k for _, k in mods}
    homogeneous = mults.pop() if len(mults) == 1 else None
    violations = _mixed_violations(s, summary, mods, verdict)
    if violations:
        raise RuntimeError("mixed-multiplicity law violated: " + "; ".join(violations))
    notes = []
    if s == 3 and verdict == NEAR_PENCIL:
        notes.append("s=3 triangle: near pencil whose three double points are all modular")
    return Classification(verdict, tuple(mods), homogeneous, tuple(notes))


def check_mixed_multiplicity(arr: Arrangement, summary=None, cls=None) -> LemmaReport:
    summary = _summary(arr, summary)
    cls = cls or classify(arr, summary)
    bad = _mixed_violations(arr.s, summary, list(cls.modular_points), cls.verdict)
    return LemmaReport("mixed_multiplicity", "fail" if bad else "pass", violations=bad)


def check_lemma_high_mult_modular(arr: Arrangement, summary=None) -> LemmaReport:
    """Every crossing at least as heavy as some modular point is itself modular."""
    summary = _summary(arr, summary)
    mods = modular_points(arr, summary)
    if not mods:
        raise PreconditionError("arrangement is not supersolvable")
    m = min(k for _, k in mods)
    modular_set = {p for p, _ in mods}
    bad = [
        c.point for c in summary.crossings
        if c.multiplicity >= m and c.point not in modular_set
    ]
    detail = f"smallest modular multiplicity {m}"
    return LemmaReport("high_mult_modular", "fail" if bad else "pass", detail, bad)


def check_no_three_collinear_modular(arr: Arrangement, summary=None) -> LemmaReport:
    """No line of the plane holds three modular points (characteristic 0)."""
    name = "no_three_collinear_modular"
    if arr.field.characteristic:
        return LemmaReport(name, "skipped", f"characteristic {arr.field.characteristic}")
    summary = _summary(arr, summary)
    cls = classify(arr, summary)
    if cls.homogeneous is None or cls.homogeneous < 3:
        raise PreconditionError("needs a homogeneous supersolvable arrangement with m >= 3")
    pts = [p for p, _ in cls.modular_points]
    bad = [
        (a, b, c) for a, b, c in combinations(pts, 3)
        if join(a, b) == join(a, c)
    ]
    return LemmaReport(name, "fail" if bad else "pass", f"{len(pts)} modular points", bad)


def check_min_crossing_bound(arr: Arrangement, summary=None) -> LemmaReport:
    """Outside pencils and near pencils there are at least 2m crossings."""
    summary = _summary(arr, summary)
    cls = classify(arr, summary)
    name = "min_crossing_bound"
    if cls.trivial:
        return LemmaReport(name, "skipped", cls.verdict)
    n, m = summary.n, summary.m
    status = "pass" if n >= 2 * m else "fail"
    return LemmaReport(name, status, f"n={n}, m={m}")


def rebuild_from_modular_point(arr: Arrangement, p: ProjPoint, summary=None) -> Arrangement:
    """Drop the lines through p, then add back the joins of p with the
    crossings of what remains."""
    summary = _summary(arr, summary)
    if summary.crossing_at(p) is None:
        raise ValueError("p is not a crossing point")
    rest = [L for L in arr.lines if not incident(p, L)]
    lines = list(rest)
    if len(rest) >= 2:
        sub = build(arr.field, rest)
        seen = set(lines)
        for c in sub.summary.crossings:
            L = join(p, c.point)
            if L not in seen:
                seen.add(L)
                lines.append(L)
    return build(arr.field, lines)


def m3_cases(field: FieldDescriptor) -> dict:
    """Walk the three cases for two modular points of multiplicity 3.

    Starting from the five lines through p=(0:0:1) and q=(0:1:0), add the
    line A through r1=(1:0:0), r2=(1:1:1), then the line B through
    s1=(1:0:1), s2=(1:1:0). Returns the arrangements and classifications.
    """
    L = lambda a, b, c: line(field, a, b, c)  # noqa: E731
    base = [L(1, 0, 0), L(0, 1, 0), L(1, -1, 0), L(0, 0, 1), L(1, 0, -1)]
    A = join(point(field, 1, 0, 0), point(field, 1, 1, 1))
    B = join(point(field, 1, 0, 1), point(field, 1, 1, 0))
    out = {}
    for name, lines in (("case1", base), ("case2", base + [A]), ("case2_plus_B", base + [A, B])):
        arr = build(field, lines)
        out[name] = (arr, classify(arr))
    out["A"], out["B"] = A, B
    out["A_meet_B"] = A.coords, B.coords
    return out


def fermat_extension_search(n: int) -> dict:
    """Look for lines that could extend xyz(x^n-y^n)(x^n-z^n)(y^n-z^n).

    Two searches:

    * the root-of-unity argument: for every i, j in 1..n, join
      (e^i, e, 1) with (e^j, e^2, 1) and keep joins that pass through
      (1, 1, 1) but avoid all three coordinate vertices;
    * exhaustive: every line through two crossings that avoids the
      vertices, kept if adding it leaves the vertices modular.
    """
    from . import generators

    arr = generators.fermat_plus_axes(n, 3)
    field = arr.field
    summary = arr.summary
    vertices = [point(field, 0, 0, 1), point(field, 0, 1, 0), point(field, 1, 0, 0)]
    out = {"n": n, "root_of_unity_lines": [], "extending_lines": []}
    if n >= 3:
        from .scalar import primitive_root

        e = primitive_root(n)
        one = point(field, 1, 1, 1)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                a = point(field, e ** i, e, 1)
                b = point(field, e ** j, e ** 2, 1)
                L = join(a, b)
                if incident(one, L) and not any(incident(v, L) for v in vertices):
                    out["root_of_unity_lines"].append((i, j, L))
    candidates = set()
    pts = [c.point for c in summary.crossings]
    for a, b in combinations(pts, 2):
        L = join(a, b)
        if L in arr or any(incident(v, L) for v in vertices):
            continue
        candidates.add(L)
    for L in sorted(candidates, key=lambda x: x.sort_key()):
        bigger = build(field, list(arr.lines) + [L])
        if all(
            bigger.summary.crossing_at(v) is not None and is_modular(bigger, None, v)
            for v in vertices
        ):
            out["extending_lines"].append(L)
    out["candidates_checked"] = len(candidates)
    return out
