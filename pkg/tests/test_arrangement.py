import json
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, strategies as st

from linea import generators
from linea.arrangement import (
    SchemaError,
    TVectorRecord,
    build,
    dumps,
    from_json,
    is_real,
    load,
    save,
    to_json,
)
from linea.generators import FamilySpec
from linea.projective import incident, line, meet
from linea.scalar import FieldDescriptor

QQ = FieldDescriptor.rational()

SAMPLES = [
    FamilySpec("grid", a=3, diagonals=2),
    FamilySpec("fermat", n=3),
    FamilySpec("fermat_plus_axes", n=2, eps=3),
    FamilySpec("finite_plane", p=3),
    FamilySpec("near_pencil", s=6),
    FamilySpec("polygon_plus_infinity", n=6),
]


def incidence_oracle(arr):
    """t-vector by counting, for each pairwise meet, the lines through it."""
    points = {meet(a, b) for a, b in combinations(arr.lines, 2)}
    t = {}
    for p in points:
        k = sum(1 for L in arr.lines if incident(p, L))
        t[k] = t.get(k, 0) + 1
    return dict(sorted(t.items())), points


@pytest.mark.parametrize("spec", SAMPLES, ids=lambda s: s.label)
def test_summary_matches_incidence_oracle(spec):
    arr = generators.generate(spec)
    t, points = incidence_oracle(arr)
    assert arr.summary.t == t
    assert {c.point for c in arr.summary.crossings} == points


@pytest.mark.parametrize("spec", SAMPLES, ids=lambda s: s.label)
def test_crossings_partition_line_pairs(spec):
    arr = generators.generate(spec)
    seen = []
    for c in arr.summary.crossings:
        assert c.multiplicity >= 2
        seen.extend(combinations(c.lines, 2))
    assert sorted(seen) == list(combinations(range(arr.s), 2))
    s = arr.summary
    assert s.n == sum(s.t.values())
    assert s.m == max(s.t)
    assert sum(comb(k, 2) * v for k, v in s.t.items()) == comb(arr.s, 2)


def test_small_examples():
    axes = build(QQ, [line(QQ, 1, 0, 0), line(QQ, 0, 1, 0), line(QQ, 0, 0, 1)])
    assert axes.s == 3
    assert axes.summary.t == {2: 3}
    assert generators.pencil(5).summary.t == {5: 1}
    assert generators.pencil(5).summary.n == 1
    assert generators.near_pencil(6).summary.t == {2: 5, 5: 1}
    f3 = generators.fermat(3)
    assert f3.s == 9 and f3.summary.t == {3: 12}
    braid = generators.fermat_plus_axes(1, 3)
    assert braid.s == 6


def test_duplicates_and_tiny_inputs_rejected():
    with pytest.raises(ValueError):
        build(QQ, [line(QQ, 1, 0, 0), line(QQ, 2, 0, 0)])
    with pytest.raises(ValueError):
        build(QQ, [line(QQ, 1, 0, 0)])


def test_realness():
    assert is_real(generators.grid(4, 1))
    assert not is_real(generators.fermat(3))
    assert is_real(generators.fermat_plus_axes(2, 3))
    assert is_real(generators.polygon_plus_infinity(8))
    with pytest.raises(ValueError):
        is_real(generators.finite_plane(2))


@given(st.sampled_from(SAMPLES[:4]), st.randoms(use_true_random=False))
def test_line_order_does_not_matter(spec, rnd):
    arr = generators.generate(spec)
    lines = list(arr.lines)
    rnd.shuffle(lines)
    other = build(arr.field, lines)
    assert other.summary.t == arr.summary.t
    assert {c.point for c in other.summary.crossings} == {c.point for c in arr.summary.crossings}


@pytest.mark.parametrize("spec", SAMPLES, ids=lambda s: s.label)
def test_arrangement_file_round_trip(spec, tmp_path):
    arr = generators.generate(spec)
    path = tmp_path / "a.json"
    save(arr, path)
    back = load(path)
    assert back.lines == arr.lines
    assert back.field == arr.field
    assert dumps(back) == dumps(arr)


def test_fermat_file_over_zeta3():
    obj = json.loads(dumps(generators.fermat(3)))
    assert obj["field"] == {"kind": "cyclotomic", "order": 3}
    assert len(obj["lines"]) == 9
    assert from_json(obj).summary.t == {3: 12}


def test_records_load():
    klein = from_json({"label": "klein", "s": 21, "t": {"3": 28, "4": 21}})
    assert isinstance(klein, TVectorRecord)
    assert klein.identity_holds()
    wiman = from_json({"label": "wiman", "s": 45, "t": {"3": 120, "4": 45, "5": 36}})
    assert wiman.n == 201 and wiman.m == 5
    assert TVectorRecord("dk", 20, {2: 4, 3: 28, 4: 17}).identity_holds()


def test_record_round_trip():
    rec = TVectorRecord("x", 9, {2: 6, 3: 4, 4: 3}, is_real=True, supersolvable=True)
    assert from_json(to_json(rec)) == rec


def test_identity_violations_need_the_flag():
    bad = {"label": "klein", "s": 21, "t": {"3": 28, "4": 20}}
    with pytest.raises(SchemaError, match="allow-unchecked"):
        from_json(bad)
    rec = from_json(bad, allow_unchecked=True)
    assert not rec.identity_holds()


@pytest.mark.parametrize(
    "obj",
    [
        [],
        {"label": "x", "s": 3},
        {"label": "x", "s": 3, "t": {"2": 3}, "color": "red"},
        {"label": "x", "s": "3", "t": {"2": 3}},
        {"label": "x", "s": 3, "t": {"two": 3}},
        {"field": {"kind": "rational"}, "lines": [["1", "0", "0"], ["1", "0", "0"]]},
        {"field": {"kind": "rational"}, "lines": [["1", "0"], ["0", "1", "0"]]},
        {"field": {"kind": "rational"}, "lines": [["0", "0", "0"], ["0", "1", "0"]]},
        {"field": {"kind": "prime", "p": 4}, "lines": [[1, 0, 0], [0, 1, 0]]},
        {"field": {"kind": "rational"}, "lines": [["1/0", "0", "1"], ["0", "1", "0"]]},
    ],
)
def test_schema_errors(obj):
    with pytest.raises(SchemaError):
        from_json(obj)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope", encoding="utf-8")
    with pytest.raises(SchemaError):
        load(path)
