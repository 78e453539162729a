"""Command-line entry point: ``linea generate|analyze|audit|feasible|verify-paper``.

Exit codes: 0 success, 1 an applicable check failed, 2 bad input,
3 a counterexample to a conjecture was found (a witness file is written).
JSON output is canonical (sorted keys, exact fraction strings); text and
CSV are projections of the same data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import __version__, arrangement, feasibility, generators, verify
from .arrangement import Arrangement, SchemaError, TVectorRecord
from .audit import CSV_HEADER, Facts, run_audit
from .corpus import default_corpus_dir, load_manifest
from .generators import FamilySpec
from .structure import classify

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3

FAMILY_PARAMS = {
    "pencil": ("s",),
    "near_pencil": ("s",),
    "triangle_case1": (),
    "fermat": ("n",),
    "fermat_plus_axes": ("n", "eps"),
    "grid": ("a", "diagonals"),
    "finite_plane": ("p",),
    "polygon_plus_infinity": ("n",),
    "cone": ("seed",),
}


class InputError(Exception):
    """Anything the user can fix by changing arguments or input files."""


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(rows, header=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _load(path, allow_unchecked=False):
    try:
        return arrangement.load(path, allow_unchecked=allow_unchecked)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {path}: no such file") from exc
    except (SchemaError, OSError) as exc:
        raise InputError(str(exc)) from exc


def _t_json(t: dict) -> dict:
    return {str(k): v for k, v in sorted(t.items())}


# -- generate -------------------------------------------------------------------

def cmd_generate(args) -> int:
    family = args.family.replace("-", "_")
    if family not in FAMILY_PARAMS:
        raise InputError(f"unknown family {args.family!r}; choose from {', '.join(sorted(FAMILY_PARAMS))}")
    params = {}
    for key in FAMILY_PARAMS[family]:
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if family == "cone":
        if not args.base:
            raise InputError("cone needs --base PATH (an arrangement file)")
        base = _load(args.base)
        if not isinstance(base, Arrangement):
            raise InputError("cone base must be an arrangement, not a record")
        params["base"] = base
        params["seed"] = args.seed
    try:
        arr = generators.generate(FamilySpec(family, **params))
    except KeyError as exc:
        raise InputError(f"{family} needs --{exc.args[0]}") from exc
    except generators.NoGeneralApexError as exc:
        raise InputError(str(exc)) from exc
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    text = arrangement.dumps(arr)
    _emit(args, text)
    print(f"s={arr.s} field={arr.field}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


# -- analyze --------------------------------------------------------------------

def analysis(arr: Arrangement) -> dict:
    summary = arr.summary
    cls = classify(arr, summary)
    char = arr.field.characteristic
    return {
        "field": arr.field.to_json(),
        "s": arr.s,
        "t": _t_json(summary.t),
        "n": summary.n,
        "m": summary.m,
        "is_real": None if char else arrangement.is_real(arr),
        "verdict": cls.verdict,
        "supersolvable": cls.supersolvable,
        "homogeneous": cls.homogeneous,
        "modular_points": [
            {"point": p.to_json(), "multiplicity": k} for p, k in cls.modular_points
        ],
        "notes": list(cls.notes),
    }


def _poly(coeffs: list) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == "0":
            continue
        power = "" if i == 0 else "z" if i == 1 else f"z^{i}"
        if not power:
            terms.append(c)
        elif c in ("1", "-1"):
            terms.append(("-" if c == "-1" else "") + power)
        else:
            terms.append(f"{c}*{power}")
    return "+".join(terms).replace("+-", "-") or "0"


def _coords(point) -> str:
    """Coordinates for text output; cyclotomic entries print as polynomials in z = zeta."""
    return ":".join(_poly(c) if isinstance(c, list) else str(c) for c in point)


def _analysis_text(a: dict) -> str:
    lines = [
        f"s: {a['s']}",
        "t: " + ", ".join(f"t{k}={v}" for k, v in a["t"].items()),
        f"n: {a['n']}",
        f"m: {a['m']}",
        f"real: {'n/a' if a['is_real'] is None else str(a['is_real']).lower()}",
        f"verdict: {a['verdict']}",
        f"modular points: {len(a['modular_points'])}",
    ]
    for mp in a["modular_points"]:
        lines.append(f"  ({_coords(mp['point'])})  multiplicity {mp['multiplicity']}")
    lines += [f"note: {n}" for n in a["notes"]]
    return "\n".join(lines) + "\n"


def _analysis_csv(a: dict) -> str:
    rows = [["s", a["s"]], ["n", a["n"]], ["m", a["m"]]]
    rows += [[f"t{k}", v] for k, v in a["t"].items()]
    rows += [["is_real", "" if a["is_real"] is None else str(a["is_real"]).lower()]]
    rows += [["verdict", a["verdict"]]]
    rows += [["modular", f"({_coords(mp['point'])})|{mp['multiplicity']}"] for mp in a["modular_points"]]
    return _csv(rows, ["key", "value"])


def _dot(arr: Arrangement) -> str:
    out = ["graph incidence {"]
    for i in range(arr.s):
        out.append(f'  L{i} [shape=box];')
    for j, c in enumerate(arr.summary.crossings):
        out.append(f'  P{j} [label="{c.multiplicity}"];')
        out.extend(f"  P{j} -- L{i};" for i in c.lines)
    out.append("}")
    return "\n".join(out) + "\n"


def cmd_analyze(args) -> int:
    obj = _load(args.path, args.allow_unchecked)
    if not isinstance(obj, Arrangement):
        raise InputError("analyze needs an arrangement file; use 'audit --record' for t-vector records")
    if args.dot:
        _emit(args, _dot(obj))
        return EXIT_OK
    a = analysis(obj)
    if args.format == "text":
        _emit(args, _analysis_text(a))
    elif args.format == "csv":
        _emit(args, _analysis_csv(a))
    else:
        _emit(args, _dumps(a))
    return EXIT_OK


# -- audit ----------------------------------------------------------------------

def _tri(value):
    return None if value is None else value == "yes"


def cmd_audit(args) -> int:
    if bool(args.path) == bool(args.record):
        raise InputError("give exactly one of PATH or --record PATH")
    path = args.path or args.record
    obj = _load(path, args.allow_unchecked)
    if args.record and not isinstance(obj, TVectorRecord):
        raise InputError(f"{path} is not a t-vector record")
    if isinstance(obj, TVectorRecord):
        real = _tri(args.real) if args.real is not None else obj.is_real
        ss = _tri(args.supersolvable) if args.supersolvable is not None else obj.supersolvable
        char = args.characteristic if args.characteristic is not None else obj.characteristic
        facts = Facts(char, real, ss)
        report = run_audit(obj, obj.label, facts)
    else:
        if args.real is not None or args.supersolvable is not None:
            raise InputError("metadata flags only apply to records; arrangements are analyzed directly")
        report = run_audit(obj, Path(path).stem)
    if args.format == "text":
        lines = [f"subject: {report.subject}"]
        for c in report.checks:
            if c.applicable:
                mark = "holds" if c.holds else "FAILS"
                lines.append(f"{c.name:28s} {mark:6s} {c.lhs} vs {c.rhs}  [{c.role}]")
            else:
                lines.append(f"{c.name:28s} n/a    {c.note}")
        lines += [f"note: {n}" for n in report.notes]
        _emit(args, "\n".join(lines) + "\n")
    elif args.format == "csv":
        _emit(args, _csv(report.csv_rows(), CSV_HEADER))
    else:
        _emit(args, report.dumps())
    code = report.exit_code()
    if code == EXIT_COUNTEREXAMPLE:
        witness_path = Path(args.witness or f"{report.subject}.counterexample.json")
        witness = {
            "subject": report.subject,
            "s": obj.s,
            "t": _t_json(obj.summary.t if isinstance(obj, Arrangement) else obj.t),
            "failed_checks": [c.to_json() for c in report.counterexamples()],
        }
        if isinstance(obj, Arrangement):
            witness["arrangement"] = arrangement.to_json(obj)
        witness_path.write_text(_dumps(witness), encoding="utf-8")
        print(f"counterexample witness written to {witness_path}", file=sys.stderr)
    return code


# -- feasible -------------------------------------------------------------------

def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad integer list {text!r}") from exc


def _s_range(text: str) -> list:
    for sep in ("..", ":", "-"):
        if sep in text:
            lo, _, hi = text.partition(sep)
            try:
                return [int(lo), int(hi)]
            except ValueError:
                break
    try:
        v = int(text)
    except ValueError as exc:
        raise InputError(f"bad s range {text!r}; expected A..B") from exc
    return [v, v]


def cmd_feasible(args) -> int:
    if args.problem:
        try:
            obj = json.loads(Path(args.problem).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read problem file: {exc}") from exc
    else:
        if args.m is None or args.s is None:
            raise InputError("give --problem FILE or both --m and --s")
        obj = {"m": args.m, "s": _s_range(args.s), "t2_zero": args.t2_zero}
        if args.allowed:
            obj["allowed"] = _int_list(args.allowed)
        if args.apply:
            obj["apply"] = [x.strip() for x in args.apply.split(",") if x.strip()]
    try:
        spec = feasibility.scan_spec_from_json(obj)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    results = spec.run(args.threads)
    payload = feasibility.scan_to_json(spec, results, detail=args.detail)
    if args.format == "text":
        feas = payload["feasible_s"]
        lines = [f"m={spec.m} s={spec.s_lo}..{spec.s_hi} t2_zero={str(spec.force_t2_zero).lower()}"]
        lines.append(f"feasible s: {_ranges(feas) if feas else 'none'}")
        lines.append(f"instances: {len(results)}, all verified")
        _emit(args, "\n".join(lines) + "\n")
    elif args.format == "csv":
        _emit(args, _csv([[o["s"], o["status"]] for o in payload["outcomes"]], ["s", "status"]))
    else:
        _emit(args, _dumps(payload))
    return EXIT_OK


def _ranges(values: list) -> str:
    parts, start, prev = [], values[0], values[0]
    for v in values[1:] + [None]:
        if v is not None and v == prev + 1:
            prev = v
            continue
        parts.append(str(start) if start == prev else f"{start}..{prev}")
        if v is not None:
            start = prev = v
    return ", ".join(parts)


# -- verify-paper ---------------------------------------------------------------

def cmd_verify(args) -> int:
    root = Path(args.corpus) if args.corpus else default_corpus_dir()
    try:
        load_manifest(root)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        raise InputError(f"corpus {root}: {exc}") from exc
    summary = verify.run(root, args.threads)
    if args.format == "text":
        lines = [
            f"{'PASS' if c['passed'] else 'FAIL'} {c['id']:2d} {c['name']}" for c in summary["criteria"]
        ]
        lines += [f"FAIL entry {p}: {name}" for p, name in summary["entry_failures"]]
        lines.append("all criteria passed" if summary["passed"] else "verification failed")
        _emit(args, "\n".join(lines) + "\n")
    elif args.format == "csv":
        rows = [[c["id"], c["name"], str(c["passed"]).lower()] for c in summary["criteria"]]
        _emit(args, _csv(rows, ["id", "name", "passed"]))
    else:
        _emit(args, verify.dumps(summary))
    for p, name in summary["entry_failures"]:
        print(f"failing check: {p}: {name}", file=sys.stderr)
    return verify.exit_code(summary)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="apex seed for the cone family")
    common.add_argument("--allow-unchecked", action="store_true",
                        help="load records that break the pair count identity")
    common.add_argument("--threads", type=int, help="worker processes (default: LINEA_THREADS or all cores)")

    parser = argparse.ArgumentParser(prog="linea", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"linea {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a family instance")
    g.add_argument("family")
    for key in ("s", "n", "eps", "a", "diagonals", "p"):
        g.add_argument(f"--{key}", type=int)
    g.add_argument("--base", help="base arrangement file for the cone family")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", parents=[common], help="crossings, t-vector, modular points")
    a.add_argument("path")
    a.add_argument("--dot", action="store_true", help="emit the crossing-line incidence graph")
    a.set_defaults(func=cmd_analyze)

    u = sub.add_parser("audit", parents=[common], help="run every identity, inequality and conjecture check")
    u.add_argument("path", nargs="?")
    u.add_argument("--record", help="t-vector record file")
    u.add_argument("--real", choices=("yes", "no"), help="record metadata: defined over the reals")
    u.add_argument("--supersolvable", choices=("yes", "no"), help="record metadata: supersolvable")
    u.add_argument("--characteristic", type=int, help="record metadata: field characteristic")
    u.add_argument("--witness", help="where to write a counterexample witness")
    u.set_defaults(func=cmd_audit)

    f = sub.add_parser("feasible", parents=[common], help="exact LP feasibility scan over s")
    f.add_argument("--problem", help='JSON like {"m":5,"allowed":[3,4,5],"t2_zero":true,"s":[6,60]}')
    f.add_argument("--m", type=int)
    f.add_argument("--s", help="range A..B")
    f.add_argument("--allowed", help="comma-separated multiplicities, e.g. 3,4")
    f.add_argument("--t2-zero", action="store_true")
    f.add_argument("--apply", help="subset of identity,hirzebruch,at")
    f.add_argument("--detail", action="store_true", help="include witnesses and certificates")
    f.set_defaults(func=cmd_feasible)

    v = sub.add_parser("verify-paper", parents=[common], help="run the reproduction suite over a corpus")
    v.add_argument("corpus", nargs="?", help="corpus directory (default: bundled)")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("linea: --threads must be >= 1", file=sys.stderr)
            return EXIT_INPUT
        os.environ["LINEA_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"linea: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
