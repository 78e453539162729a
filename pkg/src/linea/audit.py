"""Identities, inequalities, conjecture predicates and the unexpected-curve test.

Every check is three-valued: inapplicable (hypotheses not met or unknown),
holds, or fails. Applicable checks carry exact rational lhs/rhs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional, Union

from .arrangement import Arrangement, CrossingSummary, TVectorRecord, is_real
from .scalar import format_fraction
from .structure import Classification, classify

__all__ = [
    "Check",
    "Facts",
    "AuditReport",
    "facts_for",
    "audit_identity",
    "audit_hirzebruch",
    "audit_melchior",
    "audit_at",
    "audit_conjectures",
    "audit_real_t2_theorem",
    "unexpected_curve_criterion",
    "run_audit",
    "COUNTEREXAMPLE_CHECKS",
]

# Roles decide what a failure means for the exit code:
#   law / theorem / conjecture -> failure; question / criterion -> informational.
FAILING_ROLES = ("law", "theorem", "conjecture")
COUNTEREXAMPLE_CHECKS = ("conj_t2_positive", "conj_t2_half_s")


@dataclass
class Check:
    name: str
    applicable: bool
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    holds: Optional[bool] = None
    role: str = "law"
    note: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "applicable": self.applicable, "role": self.role}
        if self.applicable:
            out.update(lhs=format_fraction(self.lhs), rhs=format_fraction(self.rhs), holds=self.holds)
        if self.note:
            out["note"] = self.note
        return out

    @property
    def failed(self) -> bool:
        return self.applicable and not self.holds and self.role in FAILING_ROLES


def _na(name: str, role: str = "law", note: str = "") -> Check:
    return Check(name, False, role=role, note=note)


def _ge(name: str, lhs, rhs, role: str = "law", note: str = "") -> Check:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    return Check(name, True, lhs, rhs, lhs >= rhs, role, note)


@dataclass(frozen=True)
class Facts:
    """What is known about the subject beyond its t-vector. None = unknown."""

    characteristic: int = 0
    is_real: Optional[bool] = None
    supersolvable: Optional[bool] = None
    modular_multiplicities: Optional[tuple] = None


Subject = Union[CrossingSummary, TVectorRecord]


def _st(subject: Subject) -> tuple[int, dict]:
    return subject.s, dict(subject.t)


def _trivial(s: int, t: dict) -> bool:
    """Pencil or near pencil, read off the t-vector."""
    return t.get(s, 0) > 0 or t.get(s - 1, 0) > 0


def _pencil(s: int, t: dict) -> bool:
    return t.get(s, 0) > 0


def facts_for(subject, cls: Optional[Classification] = None) -> Facts:
    if isinstance(subject, TVectorRecord):
        return Facts(subject.characteristic, subject.is_real, subject.supersolvable)
    arr: Arrangement = subject
    cls = cls or classify(arr)
    char = arr.field.characteristic
    return Facts(
        char,
        None if char else is_real(arr),
        cls.supersolvable,
        cls.modular_multiplicities,
    )


def audit_identity(subject: Subject) -> Check:
    s, t = _st(subject)
    lhs = sum(comb(k, 2) * v for k, v in t.items())
    return Check("identity", True, Fraction(lhs), Fraction(comb(s, 2)), lhs == comb(s, 2))


def audit_hirzebruch(subject: Subject, characteristic: int = 0) -> Check:
    """t2 + 3/4 t3 >= s + sum_{k>4} (k-4) t_k for nontrivial complex arrangements."""
    name = "hirzebruch"
    s, t = _st(subject)
    if characteristic:
        return _na(name, note="positive characteristic")
    if _trivial(s, t):
        return _na(name, note="pencil or near pencil")
    lhs = t.get(2, 0) + Fraction(3, 4) * t.get(3, 0)
    rhs = s + sum((k - 4) * v for k, v in t.items() if k > 4)
    return _ge(name, lhs, rhs)


def audit_melchior(subject: Subject, real: Optional[bool]) -> Check:
    """t2 >= 3 + sum_{k>=3} (k-3) t_k for real non-pencils."""
    name = "melchior"
    s, t = _st(subject)
    if not real:
        return _na(name, note="not known to be real")
    if _pencil(s, t):
        return _na(name, note="pencil")
    return _ge(name, t.get(2, 0), 3 + sum((k - 3) * v for k, v in t.items() if k >= 3))


def audit_at(subject: Subject, supersolvable: Optional[bool], characteristic: int = 0) -> Check:
    """t2 >= 2n - m(s - m) - 2 for supersolvable arrangements in characteristic 0."""
    name = "anzis_tohaneanu"
    s, t = _st(subject)
    if characteristic:
        return _na(name, note="positive characteristic")
    if not supersolvable:
        return _na(name, note="not known to be supersolvable")
    n = sum(t.values())
    m = max(t)
    return _ge(name, t.get(2, 0), 2 * n - m * (s - m) - 2)


def audit_conjectures(subject: Subject, facts: Facts) -> list[Check]:
    s, t = _st(subject)
    t2 = t.get(2, 0)
    complex_ = facts.characteristic == 0
    ss = bool(facts.supersolvable)
    out = []

    if complex_ and ss and not _trivial(s, t):
        out.append(Check("conj_t2_positive", True, Fraction(t2), Fraction(0), t2 > 0, "conjecture"))
    else:
        out.append(_na("conj_t2_positive", "conjecture", "needs a nontrivial complex supersolvable subject"))

    if complex_ and ss and not _pencil(s, t):
        out.append(_ge("conj_t2_half_s", t2, Fraction(s, 2), "conjecture"))
    else:
        out.append(_na("conj_t2_half_s", "conjecture", "needs a non-pencil complex supersolvable subject"))

    if facts.is_real and not _pencil(s, t):
        out.append(_ge("dirac_motzkin", t2, s // 2, "conjecture"))
    else:
        out.append(_na("dirac_motzkin", "conjecture", "needs a real non-pencil subject"))

    # Asked over C; failures are expected (Fermat, Klein, ...), so informational only.
    if complex_ and not _pencil(s, t):
        out.append(_ge("dm_bound_complex", t2, s // 2, "question"))
    else:
        out.append(_na("dm_bound_complex", "question", "needs a complex non-pencil subject"))

    mults = facts.modular_multiplicities
    if complex_ and ss and mults and not _pencil(s, t):
        rhs = max(max(s - k, k) for k in mults)
        out.append(_ge("t2_vs_modular_multiplicity", t2, rhs, "question"))
    else:
        out.append(_na("t2_vs_modular_multiplicity", "question", "needs known modular points"))
    return out


def audit_real_t2_theorem(arr: Arrangement, cls: Optional[Classification] = None) -> list[Check]:
    """For real non-pencil supersolvable arrangements and every modular point p
    of multiplicity m: t2 >= max(s-m, m) >= s/2, and every line missing p
    carries a double point."""
    if arr.field.characteristic or not is_real(arr):
        raise ValueError("needs a real arrangement")
    summary = arr.summary
    cls = cls or classify(arr, summary)
    if cls.verdict == "pencil" or not cls.supersolvable:
        raise ValueError("needs a non-pencil supersolvable arrangement")
    s, t2 = arr.s, summary.t.get(2, 0)
    ms = [k for _, k in cls.modular_points]
    bound = max(max(s - k, k) for k in ms)
    checks = [
        _ge("real_t2_bound", t2, bound, "theorem"),
        _ge("real_t2_half", bound, Fraction(s, 2), "theorem"),
    ]
    doubles_per_line = [0] * s
    for c in summary.crossings:
        if c.multiplicity == 2:
            for i in c.lines:
                doubles_per_line[i] += 1
    missing = 0
    lines_checked = 0
    for p, _ in cls.modular_points:
        through = set(summary.crossing_at(p).lines)
        for i in range(s):
            if i not in through:
                lines_checked += 1
                if doubles_per_line[i] == 0:
                    missing += 1
    checks.append(Check(
        "real_double_point_witness", True, Fraction(lines_checked - missing),
        Fraction(lines_checked), missing == 0, "theorem",
        "lines avoiding a modular point that carry a double point / all such lines",
    ))
    return checks


def unexpected_curve_criterion(subject: Subject, supersolvable: Optional[bool]) -> Check:
    """Dual points of a supersolvable arrangement carry an unexpected curve iff s > 2m."""
    if not supersolvable:
        raise ValueError("criterion only applies to supersolvable arrangements")
    s, t = _st(subject)
    m = max(t)
    return Check(
        "unexpected_curve", True, Fraction(s), Fraction(2 * m), s > 2 * m, "criterion",
        f"{s} dual points",
    )


@dataclass
class AuditReport:
    subject: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.failed]

    def counterexamples(self) -> list:
        return [c for c in self.failures if c.name in COUNTEREXAMPLE_CHECKS]

    def exit_code(self) -> int:
        if self.counterexamples():
            return 3
        return 1 if self.failures else 0

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "checks": [c.to_json() for c in self.checks],
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    def csv_rows(self) -> list:
        rows = []
        for c in self.checks:
            rows.append([
                self.subject, c.name, c.role, str(c.applicable).lower(),
                format_fraction(c.lhs) if c.applicable else "",
                format_fraction(c.rhs) if c.applicable else "",
                "" if not c.applicable else str(c.holds).lower(),
            ])
        return rows


CSV_HEADER = ["subject", "name", "role", "applicable", "lhs", "rhs", "holds"]


def run_audit(subject, label: str = "", facts: Optional[Facts] = None) -> AuditReport:
    """Full battery on an Arrangement or a TVectorRecord."""
    if isinstance(subject, TVectorRecord):
        summary_like = subject
        label = label or subject.label
        cls = None
        facts = facts or facts_for(subject)
    else:
        summary_like = subject.summary
        cls = classify(subject, summary_like)
        facts = facts or facts_for(subject, cls)
    report = AuditReport(label or "arrangement")
    report.checks.append(audit_identity(summary_like))
    report.checks.append(audit_hirzebruch(summary_like, facts.characteristic))
    report.checks.append(audit_melchior(summary_like, facts.is_real))
    report.checks.append(audit_at(summary_like, facts.supersolvable, facts.characteristic))
    report.checks.extend(audit_conjectures(summary_like, facts))
    if (
        cls is not None and facts.is_real and cls.supersolvable and cls.verdict != "pencil"
    ):
        report.checks.extend(audit_real_t2_theorem(subject, cls))
    if facts.supersolvable and summary_like.t:
        report.checks.append(unexpected_curve_criterion(summary_like, True))
    else:
        report.checks.append(_na("unexpected_curve", "criterion", "needs a supersolvable subject"))
    if cls is not None:
        report.notes.append(f"verdict: {cls.verdict}")
    if facts.supersolvable is None:
        report.notes.append("supersolvability unknown: gated checks reported inapplicable")
    if facts.characteristic == 0 and facts.is_real is None:
        report.notes.append("realness unknown: real-only checks reported inapplicable")
    return report
