"""The bundled corpus: generated family instances plus t-vector records.

Run ``python -m linea.corpus DIR`` to (re)write a corpus directory. The
manifest lists every entry with its kind and, for arrangements, the family
spec that regenerates it. Records carry their realness and supersolvability
flags in the manifest.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from . import arrangement, generators
from .arrangement import TVectorRecord, build
from .generators import FamilySpec
from .projective import line
from .structure import classify

__all__ = [
    "CorpusEntry",
    "Manifest",
    "default_corpus_dir",
    "family_specs",
    "spec_from_json",
    "spec_to_json",
    "write_corpus",
    "load_manifest",
]

MANIFEST = "manifest.json"

KLEIN = TVectorRecord("klein", 21, {3: 28, 4: 21})
WIMAN = TVectorRecord("wiman", 45, {3: 120, 4: 45, 5: 36})
DELETED_KLEIN = TVectorRecord("deleted_klein", 20, {2: 4, 3: 28, 4: 17})

# A line avoiding a modular point of multiplicity m meets at most m crossings,
# each absorbing at most m - 1 other lines, so (m - 1) m >= s - 1. All three
# records violate this; they also violate Melchior, so none is real.
RECORD_FLAGS = {"is_real": False, "supersolvable": False}


def default_corpus_dir() -> Path:
    return Path(str(resources.files("linea") / "data" / "corpus"))


def family_specs() -> list:
    specs = [FamilySpec("pencil", s=s) for s in range(2, 9)]
    specs += [FamilySpec("near_pencil", s=s) for s in range(3, 9)]
    specs.append(FamilySpec("triangle_case1"))
    specs += [FamilySpec("fermat", n=n) for n in range(1, 6)]
    specs += [FamilySpec("fermat_plus_axes", n=n, eps=e) for n in range(1, 6) for e in (2, 3)]
    for a in range(2, 8):
        for d in (0, 1, 2):
            if d == 2 and a % 2 == 0:
                continue
            specs.append(FamilySpec("grid", a=a, diagonals=d))
    specs += [FamilySpec("finite_plane", p=p) for p in (2, 3, 5)]
    specs += [FamilySpec("polygon_plus_infinity", n=n) for n in (4, 6, 8)]
    specs.append(FamilySpec("cone", base=FamilySpec("triangle_case1"), seed=1))
    specs.append(FamilySpec("cone", base=FamilySpec("grid", a=3, diagonals=0), seed=1))
    return specs


def spec_to_json(spec: FamilySpec) -> dict:
    params = {}
    for k, v in spec.params:
        params[k] = spec_to_json(v) if isinstance(v, FamilySpec) else v
    return {"name": spec.name, "params": params}


def spec_from_json(obj: dict) -> FamilySpec:
    params = {}
    for k, v in obj.get("params", {}).items():
        params[k] = spec_from_json(v) if isinstance(v, dict) else v
    return FamilySpec(obj["name"], **params)


def realize(spec: FamilySpec):
    return generators.generate(spec)


def _file_name(spec: FamilySpec) -> str:
    parts = [spec.name]
    for k, v in spec.params:
        if isinstance(v, FamilySpec):
            parts.append(_file_name(v))
        else:
            parts.append(f"{k}{v}")
    return "_".join(parts)


def fermat_plus_line(n: int) -> TVectorRecord:
    """Record of the Fermat arrangement with the line x = 0 added, computed exactly."""
    base = generators.fermat(n)
    arr = build(base.field, list(base.lines) + [line(base.field, 1, 0, 0)])
    cls = classify(arr)
    return TVectorRecord(
        f"fermat_plus_line_n{n}", arr.s, arr.summary.t,
        is_real=arrangement.is_real(arr), supersolvable=cls.supersolvable,
    )


def records() -> list:
    out = [(r, dict(RECORD_FLAGS)) for r in (KLEIN, WIMAN, DELETED_KLEIN)]
    for n in (3, 4, 5):
        r = fermat_plus_line(n)
        out.append((r, {"is_real": r.is_real, "supersolvable": r.supersolvable}))
    return out


@dataclass(frozen=True)
class CorpusEntry:
    path: str
    kind: str  # "arrangement" | "record"
    family: Optional[FamilySpec] = None
    is_real: Optional[bool] = None
    supersolvable: Optional[bool] = None

    def to_json(self) -> dict:
        out = {"path": self.path, "kind": self.kind}
        if self.family is not None:
            out["family"] = spec_to_json(self.family)
        if self.kind == "record":
            for key in ("is_real", "supersolvable"):
                value = getattr(self, key)
                if value is not None:
                    out[key] = value
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusEntry":
        kind = obj.get("kind")
        if kind not in ("arrangement", "record"):
            raise ValueError(f"bad entry kind {kind!r}")
        if kind == "arrangement" and ("is_real" in obj or "supersolvable" in obj):
            raise ValueError(f"{obj.get('path')}: metadata flags are only allowed on records")
        family = spec_from_json(obj["family"]) if "family" in obj else None
        return cls(obj["path"], kind, family, obj.get("is_real"), obj.get("supersolvable"))


@dataclass(frozen=True)
class Manifest:
    root: Path
    entries: tuple

    def load(self, entry: CorpusEntry, allow_unchecked: bool = False):
        obj = arrangement.load(self.root / entry.path, allow_unchecked=allow_unchecked)
        if entry.kind == "record":
            if not isinstance(obj, TVectorRecord):
                raise arrangement.SchemaError(f"{entry.path}: expected a record")
            flags = {}
            if entry.is_real is not None:
                flags["is_real"] = entry.is_real
            if entry.supersolvable is not None:
                flags["supersolvable"] = entry.supersolvable
            if flags:
                obj = TVectorRecord(
                    obj.label, obj.s, obj.t,
                    is_real=flags.get("is_real", obj.is_real),
                    supersolvable=flags.get("supersolvable", obj.supersolvable),
                    characteristic=obj.characteristic, notes=obj.notes,
                )
        elif not isinstance(obj, arrangement.Arrangement):
            raise arrangement.SchemaError(f"{entry.path}: expected an arrangement")
        return obj


def load_manifest(root) -> Manifest:
    """Read DIR/manifest.json; raises FileNotFoundError or ValueError."""
    root = Path(root)
    path = root / MANIFEST
    if not path.is_file():
        raise FileNotFoundError(f"no {MANIFEST} in {root}")
    obj = json.loads(path.read_text(encoding="utf-8"))
    raw = obj.get("entries") if isinstance(obj, dict) else None
    if not raw:
        raise ValueError(f"{path}: manifest has no entries")
    entries = []
    for item in raw:
        entry = CorpusEntry.from_json(item)
        if not (root / entry.path).is_file():
            raise FileNotFoundError(f"manifest entry {entry.path} does not exist")
        entries.append(entry)
    return Manifest(root, tuple(sorted(entries, key=lambda e: e.path)))


def write_corpus(root) -> Manifest:
    root = Path(root)
    (root / "arrangements").mkdir(parents=True, exist_ok=True)
    (root / "records").mkdir(parents=True, exist_ok=True)
    entries = []
    for spec in family_specs():
        rel = f"arrangements/{_file_name(spec)}.json"
        arrangement.save(realize(spec), root / rel)
        entries.append(CorpusEntry(rel, "arrangement", spec))
    for record, flags in records():
        rel = f"records/{record.label}.json"
        bare = TVectorRecord(record.label, record.s, record.t)
        arrangement.save(bare, root / rel)
        entries.append(CorpusEntry(rel, "record", None, flags["is_real"], flags["supersolvable"]))
    entries.sort(key=lambda e: e.path)
    manifest = {"entries": [e.to_json() for e in entries]}
    (root / MANIFEST).write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return Manifest(root, tuple(entries))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    target = Path(argv[0]) if argv else default_corpus_dir()
    manifest = write_corpus(target)
    print(f"wrote {len(manifest.entries)} entries to {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
