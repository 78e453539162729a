"""Line arrangements, their crossing points, t-vectors and JSON files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Optional, Union

from .projective import ProjLine, ProjPoint, meet
from .scalar import FieldDescriptor, FieldMismatchError

__all__ = [
    "Arrangement",
    "Crossing",
    "CrossingSummary",
    "TVectorRecord",
    "SchemaError",
    "build",
    "crossing_summary",
    "is_real",
    "identity_sides",
    "load",
    "save",
    "to_json",
    "from_json",
]


class SchemaError(ValueError):
    """Input does not match the arrangement or record file schema."""


def identity_sides(s: int, t: dict) -> tuple[int, int]:
    """Both sides of sum_k C(k,2) t_k = C(s,2)."""
    return sum(comb(k, 2) * v for k, v in t.items()), comb(s, 2)


class Arrangement:
    """Ordered list of distinct lines over one field; index = line id."""

    def __init__(self, field: FieldDescriptor, lines):
        self.field = field
        self.lines = tuple(lines)

    @property
    def s(self) -> int:
        return len(self.lines)

    @cached_property
    def line_index(self) -> dict:
        return {L: i for i, L in enumerate(self.lines)}

    @cached_property
    def summary(self) -> CrossingSummary:
        return crossing_summary(self)

    def __contains__(self, L: ProjLine) -> bool:
        return L in self.line_index

    def __len__(self):
        return len(self.lines)

    def __repr__(self):
        return f"Arrangement({self.field}, s={self.s})"


def build(field: FieldDescriptor, lines) -> Arrangement:
    """Validate and wrap a list of lines. Duplicates are rejected, not merged."""
    lines = list(lines)
    if len(lines) < 2:
        raise ValueError(f"an arrangement needs at least 2 lines, got {len(lines)}")
    seen = {}
    for i, L in enumerate(lines):
        if L.field != field:
            raise FieldMismatchError(f"line {i} is over {L.field}, expected {field}")
        if L in seen:
            raise ValueError(f"lines {seen[L]} and {i} coincide")
        seen[L] = i
    return Arrangement(field, lines)


@dataclass(frozen=True)
class Crossing:
    point: ProjPoint
    lines: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class CrossingSummary:
    s: int
    crossings: tuple[Crossing, ...]
    t: dict

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def m(self) -> int:
        return max(self.t)

    @cached_property
    def index(self) -> dict:
        return {c.point: i for i, c in enumerate(self.crossings)}

    def crossing_at(self, p: ProjPoint) -> Optional[Crossing]:
        i = self.index.get(p)
        return None if i is None else self.crossings[i]

    def points_on_line(self, line_id: int) -> list[Crossing]:
        return [c for c in self.crossings if line_id in c.lines]


def crossing_summary(arr: Arrangement) -> CrossingSummary:
    """All pairwise meets, grouped by exact point equality."""
    groups: dict[ProjPoint, set] = {}
    lines = arr.lines
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            p = meet(lines[i], lines[j])
            g = groups.get(p)
            if g is None:
                groups[p] = {i, j}
            else:
                g.add(i)
                g.add(j)
    crossings = tuple(
        Crossing(p, tuple(sorted(ids)))
        for p, ids in sorted(groups.items(), key=lambda kv: kv[0].sort_key())
    )
    t: dict[int, int] = {}
    for c in crossings:
        t[c.multiplicity] = t.get(c.multiplicity, 0) + 1
    t = dict(sorted(t.items()))
    lhs, rhs = identity_sides(arr.s, t)
    if lhs != rhs:
        raise RuntimeError(f"pair count identity broken: {lhs} != {rhs}")
    return CrossingSummary(arr.s, crossings, t)


def is_real(arr: Arrangement) -> bool:
    from .projective import is_real_line

    if arr.field.characteristic:
        raise ValueError("realness is undefined in positive characteristic")
    return all(is_real_line(L) for L in arr.lines)


@dataclass(frozen=True)
class TVectorRecord:
    """A t-vector without coordinates, with optional facts supplied as metadata.

    ``is_real`` and ``supersolvable`` are None when unknown; audits treat
    unknown facts as failing the hypothesis of a gated check.
    """

    label: str
    s: int
    t: dict
    is_real: Optional[bool] = None
    supersolvable: Optional[bool] = None
    characteristic: int = 0
    notes: tuple = dc_field(default=())

    def __post_init__(self):
        if self.s < 2:
            raise SchemaError("record needs s >= 2")
        for k, v in self.t.items():
            if k < 2 or v < 0:
                raise SchemaError(f"bad t-vector entry t_{k} = {v}")
        object.__setattr__(self, "t", {k: v for k, v in sorted(self.t.items()) if v})

    @property
    def n(self) -> int:
        return sum(self.t.values())

    @property
    def m(self) -> int:
        return max(self.t) if self.t else 0

    def identity_holds(self) -> bool:
        lhs, rhs = identity_sides(self.s, self.t)
        return lhs == rhs


# -- serialization ------------------------------------------------------------

def to_json(obj: Union[Arrangement, TVectorRecord]) -> dict:
    if isinstance(obj, Arrangement):
        return {"field": obj.field.to_json(), "lines": [L.to_json() for L in obj.lines]}
    out = {"label": obj.label, "s": obj.s, "t": {str(k): v for k, v in obj.t.items()}}
    if obj.is_real is not None:
        out["is_real"] = obj.is_real
    if obj.supersolvable is not None:
        out["supersolvable"] = obj.supersolvable
    if obj.characteristic:
        out["characteristic"] = obj.characteristic
    if obj.notes:
        out["notes"] = list(obj.notes)
    return out


def _int(value, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"{what} must be an integer, got {value!r}")
    return value


def _optional_bool(obj: dict, key: str):
    value = obj.get(key)
    if value is not None and not isinstance(value, bool):
        raise SchemaError(f"{key} must be a boolean")
    return value


def from_json(obj, allow_unchecked: bool = False) -> Union[Arrangement, TVectorRecord]:
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object")
    if "lines" in obj:
        extra = set(obj) - {"field", "lines"}
        if extra:
            raise SchemaError(f"unexpected keys {sorted(extra)}")
        try:
            field = FieldDescriptor.from_json(obj.get("field"))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        if not isinstance(obj["lines"], list):
            raise SchemaError("'lines' must be a list")
        try:
            lines = [ProjLine.from_json(field, L) for L in obj["lines"]]
            return build(field, lines)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(str(exc)) from exc
    if "t" in obj:
        extra = set(obj) - {"label", "s", "t", "is_real", "supersolvable", "characteristic", "notes"}
        if extra:
            raise SchemaError(f"unexpected keys {sorted(extra)}")
        label = obj.get("label")
        if not isinstance(label, str):
            raise SchemaError("record needs a string 'label'")
        s = _int(obj.get("s"), "s")
        if not isinstance(obj["t"], dict):
            raise SchemaError("'t' must be an object")
        t = {}
        for key, value in obj["t"].items():
            try:
                k = int(key)
            except ValueError as exc:
                raise SchemaError(f"bad multiplicity key {key!r}") from exc
            t[k] = _int(value, f"t[{key}]")
        char = _int(obj.get("characteristic", 0), "characteristic")
        notes = obj.get("notes", [])
        if not isinstance(notes, list) or not all(isinstance(x, str) for x in notes):
            raise SchemaError("'notes' must be a list of strings")
        record = TVectorRecord(
            label, s, t,
            is_real=_optional_bool(obj, "is_real"),
            supersolvable=_optional_bool(obj, "supersolvable"),
            characteristic=char,
            notes=tuple(notes),
        )
        if not allow_unchecked and not record.identity_holds():
            lhs, rhs = identity_sides(record.s, record.t)
            raise SchemaError(
                f"record {label!r} violates the pair count identity ({lhs} != {rhs}); "
                "use --allow-unchecked to load it anyway"
            )
        return record
    raise SchemaError("expected an arrangement ('lines') or a record ('t')")


def load(path, allow_unchecked: bool = False) -> Union[Arrangement, TVectorRecord]:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return from_json(obj, allow_unchecked=allow_unchecked)


def dumps(obj) -> str:
    return json.dumps(to_json(obj), sort_keys=True, indent=1) + "\n"


def save(obj: Union[Arrangement, TVectorRecord], path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
