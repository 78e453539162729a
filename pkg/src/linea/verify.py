"""Run the full reproduction suite over a corpus directory.

Each corpus entry goes through one sequential pipeline (load, crossings,
classification, audit, structural checks, profile comparison); entries run
in parallel and the results are assembled in path order. Twelve numbered
criteria are then evaluated over the entry results plus a few standalone
computations (LP scans, cone seeds). The summary is plain JSON with sorted
keys and no timings, so two runs over the same corpus are byte-identical.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from . import feasibility, generators
from .arrangement import Arrangement, TVectorRecord, is_real
from .audit import run_audit, unexpected_curve_criterion
from .corpus import CorpusEntry, Manifest, load_manifest, realize
from .generators import expected_profile
from .structure import (
    NEAR_PENCIL,
    PENCIL,
    SUPERSOLVABLE,
    check_lemma_high_mult_modular,
    check_min_crossing_bound,
    check_mixed_multiplicity,
    check_no_three_collinear_modular,
    classify,
)

__all__ = ["run", "analyze_entry", "cone_rules", "dumps", "CRITERIA"]

CONE_SEEDS = range(1, 21)
S_RANGE_BOUNDS = {5: (6, 60, 10, 13), 100: (101, 7500, 103, 7412)}
SCAN_BUDGET_SECONDS = 60


def _t_json(t: dict) -> dict:
    return {str(k): v for k, v in sorted(t.items())}


# -- per-entry pipeline ---------------------------------------------------------

def cone_rules(base: Arrangement, arr: Arrangement, apex) -> dict:
    """Compare a cone with its base: line count, t-vector shift and modular apex."""
    base_t = base.summary.t
    t = arr.summary.t
    n_base = base.summary.n
    cls = classify(arr)
    expected = {}
    for k, v in base_t.items():
        if k > 2:
            expected[k + 1] = expected.get(k + 1, 0) + v
    expected[n_base] = expected.get(n_base, 0) + 1  # the apex itself
    shift_ok = all(t.get(k, 0) == v for k, v in expected.items() if k > 3)
    return {
        "s": arr.s,
        "base_s": base.s,
        "base_n": n_base,
        "line_count_ok": arr.s == base.s + n_base,
        "shift_ok": shift_ok,
        "modular_count": len(cls.modular_points),
        "apex_is_modular": any(p == apex for p, _ in cls.modular_points),
        "apex_multiplicity": arr.summary.crossing_at(apex).multiplicity,
    }


def _analyze_arrangement(entry: CorpusEntry, arr: Arrangement) -> dict:
    summary = arr.summary
    cls = classify(arr, summary)
    char = arr.field.characteristic
    real = None if char else is_real(arr)
    report = run_audit(arr, entry.path)
    lemmas = {
        "mixed_multiplicity": check_mixed_multiplicity(arr, summary, cls).status,
        "min_crossing_bound": check_min_crossing_bound(arr, summary).status,
    }
    if cls.supersolvable:
        lemmas["high_mult_modular"] = check_lemma_high_mult_modular(arr, summary).status
    if cls.homogeneous is not None and cls.homogeneous >= 3:
        lemmas["no_three_collinear_modular"] = check_no_three_collinear_modular(arr, summary).status
    out = {
        "path": entry.path,
        "kind": "arrangement",
        "family": entry.family.label if entry.family else None,
        "family_name": entry.family.name if entry.family else None,
        "field": str(arr.field),
        "characteristic": char,
        "s": arr.s,
        "t": _t_json(summary.t),
        "n": summary.n,
        "m": summary.m,
        "is_real": real,
        "verdict": cls.verdict,
        "modular_multiplicities": sorted(cls.modular_multiplicities),
        "audit": report.to_json(),
        "exit_code": report.exit_code(),
        "lemmas": lemmas,
    }
    if cls.supersolvable:
        out["unexpected_curve"] = unexpected_curve_criterion(summary, True).holds
    if entry.family is not None:
        try:
            profile = expected_profile(entry.family)
        except ValueError:
            profile = None
        if profile is not None:
            out["profile"] = {
                "expected_t": _t_json(profile.record.t),
                "t_matches": profile.record.t == summary.t,
                "modular_matches": list(profile.modular_multiplicities)
                == sorted(cls.modular_multiplicities),
                "stated_t": _t_json(profile.stated_t) if profile.stated_t else None,
                "notes": list(profile.notes),
            }
        if entry.family.name == "cone":
            base = realize(entry.family["base"])
            _, apex = generators.cone(base, entry.family.get("seed", 0))
            out["cone"] = cone_rules(base, arr, apex)
    return out


def _analyze_record(entry: CorpusEntry, record: TVectorRecord) -> dict:
    report = run_audit(record, record.label)
    return {
        "path": entry.path,
        "kind": "record",
        "label": record.label,
        "s": record.s,
        "t": _t_json(record.t),
        "is_real": record.is_real,
        "supersolvable": record.supersolvable,
        "audit": report.to_json(),
        "exit_code": report.exit_code(),
    }


def analyze_entry(root: str, entry_json: dict) -> dict:
    """Pipeline for one manifest entry; top-level so worker processes can run it."""
    manifest = Manifest(Path(root), ())
    entry = CorpusEntry.from_json(entry_json)
    # records load unchecked so a broken identity shows up as a failing check
    obj = manifest.load(entry, allow_unchecked=True)
    if isinstance(obj, TVectorRecord):
        return _analyze_record(entry, obj)
    return _analyze_arrangement(entry, obj)


def analyze_all(manifest: Manifest, threads: Optional[int] = None, reverse: bool = False) -> list:
    entries = list(manifest.entries)
    if reverse:
        entries.reverse()
    args = [(str(manifest.root), e.to_json()) for e in entries]
    workers = min(feasibility.thread_count(threads), len(args))
    if workers <= 1:
        results = [analyze_entry(*a) for a in args]
    else:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(analyze_entry, *zip(*args)))
    return sorted(results, key=lambda r: r["path"])


# -- criteria -------------------------------------------------------------------

def _check(audit_json: dict, name: str) -> dict:
    for c in audit_json["checks"]:
        if c["name"] == name:
            return c
    raise KeyError(name)


def _by_family(entries: list, label: str) -> Optional[dict]:
    for e in entries:
        if e.get("family") == label:
            return e
    return None


def _record(entries: list, label: str) -> Optional[dict]:
    for e in entries:
        if e.get("label") == label:
            return e
    return None


def _c1_identity(entries, _):
    arrs = [e for e in entries if e["kind"] == "arrangement"]
    bad = [e["path"] for e in arrs if not _check(e["audit"], "identity")["holds"]]
    families = sorted({e["family_name"] for e in arrs if e["family_name"]})
    required = {
        "pencil", "near_pencil", "fermat", "fermat_plus_axes", "grid",
        "finite_plane", "polygon_plus_infinity", "cone",
    }
    missing = sorted(required - set(families))
    return not bad and not missing and bool(arrs), {
        "arrangements": len(arrs), "failures": bad, "missing_families": missing,
    }


def _c2_records(entries, _):
    details, ok = {}, True
    expect = {
        "klein": ("210", "210", "21", "21"),
        "wiman": ("990", "990", "90", "81"),
    }
    for label, (il, ir, hl, hr) in expect.items():
        rec = _record(entries, label)
        if rec is None:
            details[label] = "missing"
            ok = False
            continue
        ident = _check(rec["audit"], "identity")
        hirz = _check(rec["audit"], "hirzebruch")
        this = (
            ident["holds"] and (ident["lhs"], ident["rhs"]) == (il, ir)
            and hirz.get("holds") and (hirz["lhs"], hirz["rhs"]) == (hl, hr)
        )
        details[label] = {
            "identity": [ident["lhs"], ident["rhs"]],
            "hirzebruch": [hirz.get("lhs"), hirz.get("rhs")],
            "hirzebruch_equality": hirz.get("lhs") == hirz.get("rhs"),
            "passed": bool(this),
        }
        ok = ok and bool(this)
    rec = _record(entries, "deleted_klein")
    if rec is None:
        details["deleted_klein"] = "missing"
        ok = False
    else:
        ident = _check(rec["audit"], "identity")
        dm = _check(rec["audit"], "dm_bound_complex")
        this = (
            ident["holds"] and (ident["lhs"], ident["rhs"]) == ("190", "190")
            and dm["applicable"] and not dm["holds"] and (dm["lhs"], dm["rhs"]) == ("4", "10")
        )
        details["deleted_klein"] = {
            "identity": [ident["lhs"], ident["rhs"]],
            "t2_vs_floor_half_s": [dm.get("lhs"), dm.get("rhs")],
            "bound_fails": dm["applicable"] and not dm["holds"],
            "passed": bool(this),
        }
        ok = ok and bool(this)
    return ok, details


def _c3_fermat_axes(entries, _):
    e = _by_family(entries, "fermat_plus_axes(eps=3,n=2)")
    if e is None:
        return False, {"error": "fermat_plus_axes(eps=3,n=2) missing"}
    ok = (
        e["t"] == {"2": 6, "3": 4, "4": 3}
        and e["verdict"] == SUPERSOLVABLE
        and e["modular_multiplicities"] == [4, 4, 4]
        and e.get("unexpected_curve") is True
        and e["s"] == 9
    )
    return ok, {
        "t": e["t"], "verdict": e["verdict"], "modular": e["modular_multiplicities"],
        "unexpected_curve": e.get("unexpected_curve"), "s": e["s"],
    }


def _c4_grid(entries, _):
    details, ok = {}, True
    for e in entries:
        if e.get("family_name") != "grid":
            continue
        label = e["family"]
        prof = e.get("profile", {})
        row = {"t": e["t"], "modular": e["modular_multiplicities"]}
        good = bool(prof.get("t_matches") and prof.get("modular_matches"))
        if label.endswith("diagonals=0)"):
            a = (e["s"] - 1) // 2
            good = good and e["t"].get("2") == a * a and e["modular_multiplicities"] == [a + 1, a + 1]
        if label == "grid(a=3,diagonals=1)":
            good = good and e["t"] == {"2": 7, "3": 3, "4": 2}
        if label == "grid(a=3,diagonals=2)":
            good = good and e["t"] == {"2": 6, "3": 4, "4": 3} and e["modular_multiplicities"] == [4, 4, 4]
        if label == "grid(a=5,diagonals=2)":
            row["stated_t"] = prof.get("stated_t")
            row["notes"] = prof.get("notes")
            good = (
                good and e["t"].get("2") == 18
                and (prof.get("stated_t") or {}).get("2") == 16
                and bool(prof.get("notes"))
            )
        row["passed"] = good
        details[label] = row
        ok = ok and good
    required = ["grid(a=3,diagonals=1)", "grid(a=3,diagonals=2)", "grid(a=5,diagonals=2)"]
    missing = [r for r in required if r not in details]
    return ok and not missing and bool(details), {"rows": details, "missing": missing}


_SCANS: dict = {}


def timed_scan(m: int, allowed, lo: int, hi: int, threads: Optional[int] = None) -> tuple:
    """Memoized t2-free scan with the wall time of its first (uncached) run.

    The worker count does not change the results, so it is not part of the key.
    """
    key = (m, None if allowed is None else frozenset(allowed), lo, hi)
    if key not in _SCANS:
        start = time.perf_counter()
        results = feasibility.scan(m, key[1], True, (lo, hi), threads=threads)
        _SCANS[key] = tuple(results), time.perf_counter() - start
    return _SCANS[key]


def _scan_ok(results) -> tuple[bool, list]:
    infeasible = all(not o.feasible for _, o in results)
    verified = all(o.verify() for _, o in results)
    return infeasible and verified, feasibility.feasible_set(list(results))


def _c5_theorem(_, threads):
    details, ok = {}, True
    for m, allowed in ((3, {3}), (4, {3, 4})):
        results, _ = timed_scan(m, frozenset(allowed), 3, 200, threads)
        good, feas = _scan_ok(results)
        details[f"m={m}"] = {
            "s_range": [3, 200],
            "feasible_s": feas,
            "certificates_verified": sum(1 for _, o in results if o.certificate and o.verify()),
            "instances": len(results),
        }
        ok = ok and good
    return ok, details


def _c6_s_ranges(_, threads):
    details, ok = {}, True
    for m, (lo, hi, a, b) in sorted(S_RANGE_BOUNDS.items()):
        results, elapsed = timed_scan(m, None, lo, hi, threads)
        feas = feasibility.feasible_set(list(results))
        contained = all(a <= s <= b for s in feas)
        sound = all(o.verify() for _, o in results)
        fast = elapsed < SCAN_BUDGET_SECONDS
        details[f"m={m}"] = {
            "s_range": [lo, hi],
            "outer_bound": [a, b],
            "feasible_count": len(feas),
            "feasible_min": feas[0] if feas else None,
            "feasible_max": feas[-1] if feas else None,
            "contained": contained,
            "all_results_verified": sound,
            "within_time_budget": fast,
        }
        ok = ok and contained and sound and fast
    return ok, details


def _c7_modular_bound(entries, _):
    bad, rows = [], {}
    for e in entries:
        if e["kind"] != "arrangement" or e["characteristic"] or e["verdict"] != SUPERSOLVABLE:
            continue
        count = len(e["modular_multiplicities"])
        if not 1 <= count <= 4:
            bad.append(e["path"])
        rows[e["family"] or e["path"]] = count
    expect = {"fermat_plus_axes(eps=3,n=1)": 4}
    for n in range(2, 6):
        expect[f"fermat_plus_axes(eps=3,n={n})"] = 3
    for e in entries:
        fam = e.get("family") or ""
        if fam.startswith("grid(") and fam.endswith("diagonals=0)"):
            expect[fam] = 2
        if e.get("family_name") == "cone":
            expect[fam] = 1
    wrong = {k: rows.get(k) for k, v in expect.items() if rows.get(k) != v}
    return not bad and not wrong, {"out_of_range": bad, "mismatched": wrong, "counts": rows}


def _c8_lemmas(entries, _):
    failures, skipped_fano = [], None
    counts = {"high_mult_modular": 0, "no_three_collinear_modular": 0, "min_crossing_bound": 0}
    for e in entries:
        if e["kind"] != "arrangement":
            continue
        lem = e["lemmas"]
        if e["modular_multiplicities"]:
            if lem.get("high_mult_modular") != "pass":
                failures.append([e["path"], "high_mult_modular"])
            counts["high_mult_modular"] += 1
        hom = set(e["modular_multiplicities"])
        if len(hom) == 1 and min(hom) >= 3:
            status = lem.get("no_three_collinear_modular")
            if e["characteristic"] == 0:
                if status != "pass":
                    failures.append([e["path"], "no_three_collinear_modular"])
                counts["no_three_collinear_modular"] += 1
            elif e["family"] == "finite_plane(p=2)":
                skipped_fano = status
        if e["verdict"] not in (PENCIL, NEAR_PENCIL):
            if lem.get("min_crossing_bound") != "pass":
                failures.append([e["path"], "min_crossing_bound"])
            counts["min_crossing_bound"] += 1
    ok = not failures and skipped_fano == "skipped"
    return ok, {"failures": failures, "checked": counts, "fano_plane": skipped_fano}


def _c9_real_theorem(entries, _):
    failures, checked = [], 0
    for e in entries:
        if e["kind"] != "arrangement" or not e["is_real"]:
            continue
        if e["verdict"] == PENCIL or not e["modular_multiplicities"]:
            continue
        checked += 1
        for name in ("real_t2_bound", "real_t2_half", "real_double_point_witness"):
            c = _check(e["audit"], name)
            if not (c["applicable"] and c["holds"]):
                failures.append([e["path"], name])
    return not failures and checked > 0, {"checked": checked, "failures": failures}


def _c10_conjectures(entries, _):
    failures, witnesses, checked = [], [], 0
    for e in entries:
        conj = [_check(e["audit"], n) for n in ("conj_t2_positive", "conj_t2_half_s")]
        if not any(c["applicable"] for c in conj):
            continue
        checked += 1
        for c in conj:
            if c["applicable"] and not c["holds"]:
                failures.append([e["path"], c["name"]])
                witnesses.append({"path": e["path"], "check": c["name"], "s": e["s"], "t": e["t"]})
    return not failures and checked > 0, {
        "checked": checked, "failures": failures, "witnesses": witnesses,
    }


def _c11_cones(_, __):
    base = generators.grid(3, 0)
    rows, ok = {}, True
    for seed in CONE_SEEDS:
        try:
            arr, apex = generators.cone(base, seed)
        except generators.NoGeneralApexError as exc:
            rows[str(seed)] = {"error": str(exc)}
            ok = False
            continue
        rules = cone_rules(base, arr, apex)
        good = (
            rules["line_count_ok"] and rules["shift_ok"]
            and rules["modular_count"] == 1 and rules["apex_is_modular"]
        )
        rows[str(seed)] = {"s": rules["s"], "modular_count": rules["modular_count"], "passed": good}
        ok = ok and good
    return ok, {"base": "grid(a=3,diagonals=0)", "seeds": rows}


CRITERIA = (
    (1, "identity_law", _c1_identity),
    (2, "klein_wiman_records", _c2_records),
    (3, "fermat_plus_axes_2_3", _c3_fermat_axes),
    (4, "grid_table", _c4_grid),
    (5, "no_supersolvable_m3_m4_without_double_points", _c5_theorem),
    (6, "s_range_bounds", _c6_s_ranges),
    (7, "modular_point_count_bound", _c7_modular_bound),
    (8, "structural_lemmas", _c8_lemmas),
    (9, "real_t2_theorem", _c9_real_theorem),
    (10, "conjecture_predicates", _c10_conjectures),
    (11, "cone_construction", _c11_cones),
)


def _entry_digest(e: dict) -> dict:
    keep = ("path", "kind", "family", "label", "s", "t", "verdict", "modular_multiplicities", "exit_code")
    out = {k: e[k] for k in keep if k in e}
    out["failed_checks"] = [
        c["name"] for c in e["audit"]["checks"]
        if c["applicable"] and not c["holds"] and c["role"] in ("law", "theorem", "conjecture")
    ]
    return out


def run(root, threads: Optional[int] = None) -> dict:
    """Evaluate every criterion over the corpus at ``root``.

    Raises FileNotFoundError / ValueError for a missing or empty corpus.
    """
    manifest = load_manifest(root)
    entries = analyze_all(manifest, threads)
    criteria = []
    for cid, name, fn in CRITERIA:
        passed, details = fn(entries, threads)
        criteria.append({"id": cid, "name": name, "passed": bool(passed), "details": details})
    digests = [_entry_digest(e) for e in entries]
    # determinism: a second pass in reverse order must serialize identically
    again = [_entry_digest(e) for e in analyze_all(manifest, threads, reverse=True)]
    same = json.dumps(digests, sort_keys=True) == json.dumps(again, sort_keys=True)
    criteria.append({
        "id": 12, "name": "determinism", "passed": same,
        "details": {"entries_compared": len(digests), "identical": same},
    })
    entry_failures = [[d["path"], name] for d in digests for name in d["failed_checks"]]
    counterexample = any(
        name in ("conj_t2_positive", "conj_t2_half_s") for _, name in entry_failures
    )
    return {
        "entries": digests,
        "criteria": criteria,
        "entry_failures": entry_failures,
        "counterexample": counterexample,
        "passed": all(c["passed"] for c in criteria) and not entry_failures,
    }


def exit_code(summary: dict) -> int:
    if summary["counterexample"]:
        return 3
    return 0 if summary["passed"] else 1


def dumps(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, indent=1) + "\n"
