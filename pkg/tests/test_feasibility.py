from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from linea import generators
from linea.feasibility import (
    ALL_CONSTRAINTS,
    Certificate,
    FeasibilityProblem,
    ScanSpec,
    feasible_set,
    scan,
    scan_spec_from_json,
    scan_to_json,
    solve,
    thread_count,
)
from linea.generators import FamilySpec, generate
from linea.structure import classify


# --- an independent oracle: vertex enumeration -----------------------------

def _solve_square(rows, rhs):
    n = len(rows)
    M = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex_feasible(problem):
    """A nonempty polyhedron inside the orthant has a vertex; look for one."""
    ks = problem.variables
    eq, ineq = [], []
    for c in problem.constraints():
        row = [dict(c.coeffs).get(k, 0) for k in ks]
        (eq if c.sense == "==" else ineq).append((row, c.rhs))
    for i in range(len(ks)):
        ineq.append(([-1 if j == i else 0 for j in range(len(ks))], 0))
    need = len(ks) - len(eq)
    for active in combinations(ineq, need):
        rows = [r for r, _ in eq] + [r for r, _ in active]
        x = _solve_square(rows, [b for _, b in eq] + [b for _, b in active])
        if x is None:
            continue
        if all(sum(a * v for a, v in zip(r, x)) == b for r, b in eq) and all(
            sum(a * v for a, v in zip(r, x)) <= b for r, b in ineq
        ):
            return True
    return False


# --- examples --------------------------------------------------------------

def test_m4_infeasible_everywhere():
    results = scan(4, {3, 4}, True, (4, 200), threads=1)
    assert feasible_set(results) == []
    assert all(o.verify() for _, o in results)


def test_m3_infeasible_everywhere():
    results = scan(3, {3}, True, (3, 200), threads=1)
    assert feasible_set(results) == []


def test_m5_s9_infeasible_with_certificate():
    out = solve(FeasibilityProblem(5, 9, {3, 4, 5}, True))
    assert out.status == "infeasible"
    assert out.certificate.verify(out.problem)
    coeffs, rhs = out.certificate.combine(out.problem)
    assert all(v >= 0 for v in coeffs.values()) and rhs < 0


def test_m5_scan_inside_range():
    results = scan(5, None, True, (6, 60), threads=1)
    assert set(feasible_set(results)) <= set(range(10, 14))


def test_m5_with_double_points_becomes_feasible():
    out = solve(FeasibilityProblem(5, 20))
    assert out.feasible and out.problem.check_witness(out.witness)


# --- soundness -------------------------------------------------------------

@given(st.integers(3, 9), st.integers(3, 80), st.booleans())
def test_outcome_always_verifies(m, s, t2_zero):
    problem = FeasibilityProblem(m, s, force_t2_zero=t2_zero)
    out = solve(problem)
    assert out.verify()
    if out.feasible:
        assert all(v >= 0 for v in out.witness.values())
    else:
        assert out.witness is None


@settings(max_examples=40)
@given(
    st.integers(3, 6),
    st.integers(3, 40),
    st.booleans(),
    st.sets(st.sampled_from(sorted(ALL_CONSTRAINTS))),
)
def test_agrees_with_vertex_oracle(m, s, t2_zero, apply):
    problem = FeasibilityProblem(m, s, force_t2_zero=t2_zero, apply=apply)
    assert solve(problem).feasible == vertex_feasible(problem)


@given(st.integers(3, 7), st.integers(3, 60), st.booleans(), st.sampled_from(sorted(ALL_CONSTRAINTS)))
def test_monotone_gate(m, s, t2_zero, extra):
    fewer = ALL_CONSTRAINTS - {extra}
    small = solve(FeasibilityProblem(m, s, force_t2_zero=t2_zero, apply=fewer))
    big = solve(FeasibilityProblem(m, s, force_t2_zero=t2_zero, apply=ALL_CONSTRAINTS))
    if not small.feasible:
        assert not big.feasible


def test_tampered_certificate_rejected():
    out = solve(FeasibilityProblem(4, 10, {3, 4}, True))
    assert not out.feasible
    bad = dict(out.certificate.multipliers, top=Fraction(-1))
    assert not Certificate(bad).verify(out.problem)
    assert not Certificate({}).verify(out.problem)
    assert not Certificate({"nope": 1}).verify(out.problem)


def test_witness_check_rejects_negative_and_foreign():
    p = FeasibilityProblem(5, 20)
    w = solve(p).witness
    assert p.check_witness(w)
    assert not p.check_witness({**w, 9: 1})
    assert not p.check_witness({k: -v - 1 for k, v in w.items()})


# --- the relaxation contains reality ----------------------------------------

REAL_SUPERSOLVABLE = [
    FamilySpec("triangle_case1"),
    FamilySpec("fermat_plus_axes", n=2, eps=3),
    FamilySpec("fermat_plus_axes", n=3, eps=3),
    FamilySpec("fermat_plus_axes", n=4, eps=2),
    FamilySpec("grid", a=3, diagonals=0),
    FamilySpec("grid", a=5, diagonals=2),
    FamilySpec("grid", a=6, diagonals=1),
    FamilySpec("polygon_plus_infinity", n=8),
    FamilySpec("cone", base=FamilySpec("triangle_case1"), seed=1),
]


@pytest.mark.parametrize("spec", REAL_SUPERSOLVABLE, ids=lambda s: s.label)
def test_true_t_vector_is_witness(spec):
    arr = generate(spec)
    cls = classify(arr)
    assert cls.supersolvable and not cls.trivial
    t = arr.summary.t
    m = max(t)
    problem = FeasibilityProblem(m, arr.s, frozenset(t), force_t2_zero=2 not in t)
    assert problem.check_witness(t)
    assert solve(problem).feasible


def test_fermat_vector_outside_supersolvable_relaxation():
    # F_3 is not supersolvable: its t-vector breaks the supersolvable bound
    t = generators.fermat(3).summary.t
    problem = FeasibilityProblem(3, 9, {3}, True)
    assert not problem.check_witness(t)


# --- parsing and errors ----------------------------------------------------

def test_scan_spec_round_trip():
    spec = scan_spec_from_json({"m": 5, "allowed": [3, 4, 5], "t2_zero": True, "s": [6, 20]})
    assert spec == ScanSpec(5, 6, 20, frozenset({3, 4, 5}), True)
    assert scan_spec_from_json(spec.to_json()) == spec
    out = scan_to_json(spec, spec.run(threads=1))
    assert out["feasible_s"] == [] and len(out["outcomes"]) == 15


def test_scan_spec_single_s():
    spec = scan_spec_from_json({"m": 4, "s": 9})
    assert (spec.s_lo, spec.s_hi) == (9, 9)


@pytest.mark.parametrize("obj", [
    [], {"m": 5}, {"m": "5", "s": 9}, {"m": 5, "s": [9, 6]}, {"m": 5, "s": [1, 2, 3]},
    {"m": 5, "s": 9, "allowed": [3, 4]}, {"m": 5, "s": 9, "allowed": [1, 5]},
    {"m": 2, "s": 9}, {"m": 5, "s": 9, "apply": ["melchior"]}, {"m": 5, "s": 9, "x": 1},
    {"m": 5, "s": 9, "t2_zero": "yes"}, {"m": True, "s": 9},
])
def test_scan_spec_errors(obj):
    with pytest.raises(ValueError):
        scan_spec_from_json(obj)


def test_scan_needs_range():
    with pytest.raises(ValueError):
        scan(5, s_range=None)
    with pytest.raises(ValueError):
        scan(5, s_range=(10, 9))


def test_parallel_scan_matches_serial():
    serial = scan(8, None, True, (9, 120), threads=1)
    parallel = scan(8, None, True, (9, 120), threads=2)
    assert [(s, o.status) for s, o in serial] == [(s, o.status) for s, o in parallel]


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("LINEA_THREADS", "1")
    assert thread_count() == 1
    assert thread_count(3) == 3
    monkeypatch.setenv("LINEA_THREADS", "junk")
    assert thread_count() >= 1


def test_outcome_json():
    out = solve(FeasibilityProblem(5, 20))
    js = out.to_json()
    assert js["status"] == "feasible" and "witness" in js
    assert "witness" not in out.to_json(detail=False)
