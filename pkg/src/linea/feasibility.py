"""Exact rational LP feasibility for hypothesized t-vectors.

Variables are t_k >= 0 for the allowed multiplicities k. Constraints:

    identity     sum_k C(k,2) t_k = C(s,2)
    hirzebruch   t_2 + 3/4 t_3 - sum_{k>4} (k-4) t_k >= s
    at           t_2 >= 2 sum_k t_k - m(s-m) - 2
    top          t_m >= 1

The solver is a two-phase (phase 1 only) simplex on an integer tableau with
fraction-free pivoting and Bland's rule. Infeasibility comes with a Farkas
certificate: nonnegative multipliers on the inequalities (any sign on the
equality) whose combination has nonnegative coefficients and a negative
right-hand side.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd, lcm
from typing import Optional

__all__ = [
    "ALL_CONSTRAINTS",
    "Constraint",
    "FeasibilityProblem",
    "FeasibilityOutcome",
    "Certificate",
    "solve",
    "scan",
    "feasible_set",
    "thread_count",
    "ScanSpec",
    "scan_spec_from_json",
    "scan_to_json",
]

ALL_CONSTRAINTS = frozenset({"identity", "hirzebruch", "at"})


@dataclass(frozen=True)
class Constraint:
    """sum_k coeffs[k] * t_k (sense) rhs, with sense '==' or '<='."""

    name: str
    coeffs: tuple  # of (k, int)
    sense: str
    rhs: int

    def _lhs(self, num: dict) -> int:
        coeff = dict(self.coeffs)
        return sum(coeff.get(k, 0) * v for k, v in num.items())

    def evaluate(self, t: dict) -> Fraction:
        num, den = _common(t)
        return Fraction(self._lhs(num), den)

    def satisfied_by(self, t: dict) -> bool:
        return self._holds(*_common(t))

    def _holds(self, num: dict, den: int) -> bool:
        lhs = self._lhs(num)
        rhs = self.rhs * den
        return lhs == rhs if self.sense == "==" else lhs <= rhs


def _common(values: dict) -> tuple[dict, int]:
    """Integer numerators over one common positive denominator."""
    values = {k: Fraction(v) for k, v in values.items()}
    den = 1
    for v in values.values():
        den = lcm(den, v.denominator)
    return {k: v.numerator * (den // v.denominator) for k, v in values.items()}, den


@dataclass(frozen=True)
class FeasibilityProblem:
    m: int
    s: int
    allowed_k: frozenset = None
    force_t2_zero: bool = False
    apply: frozenset = ALL_CONSTRAINTS

    def __post_init__(self):
        if self.m < 3:
            raise ValueError(f"m must be >= 3, got {self.m}")
        allowed = self.allowed_k
        if allowed is None:
            allowed = range(3 if self.force_t2_zero else 2, self.m + 1)
        allowed = frozenset(allowed)
        if self.m not in allowed:
            raise ValueError("m must be an allowed multiplicity")
        if any(k < 2 or k > self.m for k in allowed):
            raise ValueError("allowed multiplicities must lie in 2..m")
        object.__setattr__(self, "allowed_k", allowed)
        object.__setattr__(self, "apply", frozenset(self.apply))
        unknown = self.apply - ALL_CONSTRAINTS
        if unknown:
            raise ValueError(f"unknown constraints {sorted(unknown)}")
        ks = sorted(allowed)
        if self.force_t2_zero:
            ks = [k for k in ks if k != 2]
        object.__setattr__(self, "_variables", tuple(ks))
        object.__setattr__(self, "_constraints", tuple(self._build_constraints()))

    @property
    def variables(self) -> list:
        return list(self._variables)

    def constraints(self) -> list:
        return list(self._constraints)

    def _build_constraints(self) -> list:
        ks = self._variables
        s, m = self.s, self.m
        out = []
        if "identity" in self.apply:
            out.append(Constraint("identity", tuple((k, comb(k, 2)) for k in ks), "==", comb(s, 2)))
        if "hirzebruch" in self.apply:
            # 4 * (s + sum_{k>4}(k-4) t_k - t_2 - 3/4 t_3) <= 0
            coeffs = []
            for k in ks:
                c = -4 if k == 2 else -3 if k == 3 else 4 * (k - 4)
                if c:
                    coeffs.append((k, c))
            out.append(Constraint("hirzebruch", tuple(coeffs), "<=", -4 * s))
        if "at" in self.apply:
            coeffs = tuple((k, 1 if k == 2 else 2) for k in ks)
            out.append(Constraint("at", coeffs, "<=", m * (s - m) + 2))
        out.append(Constraint("top", ((m, -1),), "<=", -1))
        return out

    def check_witness(self, t: dict) -> bool:
        if any(v < 0 for v in t.values()):
            return False
        if any(k not in self._variables and v for k, v in t.items()):
            return False
        num, den = _common(t)
        return all(c._holds(num, den) for c in self._constraints)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "s": self.s,
            "allowed": sorted(self.allowed_k),
            "t2_zero": self.force_t2_zero,
            "apply": sorted(self.apply),
        }


@dataclass
class Certificate:
    """Multipliers per constraint name; verify() re-derives the contradiction."""

    multipliers: dict

    def combine(self, problem: FeasibilityProblem) -> tuple[dict, Fraction]:
        coeffs: dict = {k: Fraction(0) for k in problem.variables}
        rhs = Fraction(0)
        for c in problem.constraints():
            y = Fraction(self.multipliers.get(c.name, 0))
            for k, a in c.coeffs:
                coeffs[k] += y * a
            rhs += y * c.rhs
        return coeffs, rhs

    def verify(self, problem: FeasibilityProblem) -> bool:
        names = {c.name: c for c in problem.constraints()}
        for name, y in self.multipliers.items():
            if name not in names:
                return False
            if names[name].sense == "<=" and y < 0:
                return False
        y, _ = _common(self.multipliers)
        coeffs = dict.fromkeys(problem.variables, 0)
        rhs = 0
        for c in names.values():
            w = y.get(c.name, 0)
            if w:
                for k, a in c.coeffs:
                    coeffs[k] += w * a
                rhs += w * c.rhs
        return all(v >= 0 for v in coeffs.values()) and rhs < 0


@dataclass
class FeasibilityOutcome:
    problem: FeasibilityProblem
    status: str  # "feasible" | "infeasible"
    witness: Optional[dict] = None
    certificate: Optional[Certificate] = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def verify(self) -> bool:
        if self.feasible:
            return self.witness is not None and self.problem.check_witness(self.witness)
        return self.certificate is not None and self.certificate.verify(self.problem)

    def to_json(self, detail: bool = True) -> dict:
        from .scalar import format_fraction

        out = {"s": self.problem.s, "status": self.status}
        if detail and self.witness is not None:
            out["witness"] = {str(k): format_fraction(v) for k, v in sorted(self.witness.items())}
        if detail and self.certificate is not None:
            out["certificate"] = {
                k: format_fraction(v) for k, v in sorted(self.certificate.multipliers.items())
            }
        return out


# -- simplex --------------------------------------------------------------------

def _phase_one(T: list, basis: list, artificial: set):
    """Drive the artificial columns out of the basis of the tableau T.

    T holds one row per constraint (coefficients then right-hand side,
    right-hand side >= 0); ``basis[i]`` is a unit column of row i.
    Artificial columns cost 1, everything else 0. Entering and leaving
    choices follow Bland's rule on column index. The tableau stays integral
    with fraction-free pivoting: every entry is a true value times the
    common denominator D. Returns (basis, T, D, pivots) with the objective
    row appended to T.
    """
    r = len(T)
    ncol = len(T[0]) - 1
    obj = [0] * (ncol + 1)
    for i in range(r):
        if basis[i] in artificial:
            obj = [o - x for o, x in zip(obj, T[i])]
    for j in artificial:
        obj[j] = 0
    T = T + [obj]
    D = 1
    pivots = 0
    while True:
        obj = T[r]
        enter = next((j for j in range(ncol) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(r):
            a = T[i][enter]
            if a > 0:
                b = T[i][ncol]
                # minimum ratio b/a; ties go to the smallest basic column
                if best is None or b * best[1] < best[0] * a or (
                    b * best[1] == best[0] * a and basis[i] < basis[leave]
                ):
                    leave, best = i, (b, a)
        if leave is None:
            raise ArithmeticError("phase-one objective unbounded")
        p = T[leave][enter]
        prow = T[leave]
        for i in range(r + 1):
            if i == leave:
                continue
            row = T[i]
            f = row[enter]
            if f:
                T[i] = [(x * p - f * y) // D for x, y in zip(row, prow)]
            elif p != D:
                T[i] = [(x * p) // D for x in row]
        D = p
        basis[leave] = enter
        pivots += 1
    return basis, T, D, pivots


def _solve_linear(M: list, b: list) -> list:
    """Solve M y = b exactly (M square, nonsingular)."""
    n = len(M)
    A = [[Fraction(x) for x in M[i]] + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c])
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [A[i][n] for i in range(n)]


def _primitive(values: dict) -> dict:
    """Scale a rational vector to the primitive integer vector with the same direction."""
    den = 1
    for v in values.values():
        den = lcm(den, Fraction(v).denominator)
    ints = {k: int(Fraction(v) * den) for k, v in values.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    g = g or 1
    return {k: Fraction(v // g) for k, v in ints.items()}


def solve(problem: FeasibilityProblem) -> FeasibilityOutcome:
    """Decide feasibility exactly; the returned witness or certificate is verified.

    Columns are ordered: variables by descending multiplicity, then one
    slack per inequality, then artificials for rows whose slack cannot
    start in the basis.
    """
    ks = sorted(problem.variables, reverse=True)
    cons = problem.constraints()
    nv = len(ks)
    col = {k: j for j, k in enumerate(ks)}
    slack_of = {}
    for i, c in enumerate(cons):
        if c.sense == "<=":
            slack_of[i] = nv + len(slack_of)
    n_struct = nv + len(slack_of)
    needs_art = [i for i, c in enumerate(cons) if not (c.sense == "<=" and c.rhs >= 0)]
    art_of = {i: n_struct + a for a, i in enumerate(needs_art)}
    ncol = n_struct + len(art_of)
    T, signs, basis = [], [], []
    for i, c in enumerate(cons):
        row = [0] * (ncol + 1)
        for k, a in c.coeffs:
            row[col[k]] += a
        if i in slack_of:
            row[slack_of[i]] = 1
        row[ncol] = c.rhs
        sign = -1 if c.rhs < 0 else 1
        row = [sign * x for x in row]
        if i in art_of:
            row[art_of[i]] = 1
            basis.append(art_of[i])
        else:
            basis.append(slack_of[i])
        T.append(row)
        signs.append(sign)
    original = [list(row[:ncol]) for row in T]
    basis, T, D, pivots = _phase_one(T, basis, set(art_of.values()))
    if T[-1][ncol] == 0:
        # sparse: multiplicities left out have t_k = 0
        witness = {}
        for i, j in enumerate(basis):
            if j < nv and T[i][ncol]:
                witness[ks[j]] = Fraction(T[i][ncol], D)
        outcome = FeasibilityOutcome(problem, "feasible", witness=witness, pivots=pivots)
    else:
        # Phase-one duals: B^T y = c_B with cost 1 on artificial columns.
        BT = [[original[i][j] for i in range(len(cons))] for j in basis]
        cB = [1 if j >= n_struct else 0 for j in basis]
        y = _solve_linear(BT, cB)
        mult = {c.name: -y[i] * signs[i] for i, c in enumerate(cons)}
        cert = Certificate(_primitive(mult))
        outcome = FeasibilityOutcome(problem, "infeasible", certificate=cert, pivots=pivots)
    if not outcome.verify():
        raise ArithmeticError(f"solver produced an unverifiable result for {problem}")
    return outcome


# -- scans ----------------------------------------------------------------------

def thread_count(requested: Optional[int] = None) -> int:
    if requested:
        return max(1, requested)
    cap = os.environ.get("LINEA_THREADS")
    cores = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(cores, int(cap)))
        except ValueError:
            pass
    return cores


def _solve_many(problems: list) -> list:
    return [solve(p) for p in problems]


def scan(
    m: int,
    allowed_k=None,
    force_t2_zero: bool = False,
    s_range=None,
    apply=ALL_CONSTRAINTS,
    threads: Optional[int] = None,
) -> list:
    """Solve one problem per s in s_range (inclusive (lo, hi) pair or iterable)."""
    if s_range is None:
        raise ValueError("s_range is required")
    if isinstance(s_range, tuple) and len(s_range) == 2:
        s_values = list(range(s_range[0], s_range[1] + 1))
    else:
        s_values = list(s_range)
    if not s_values:
        raise ValueError("empty s range")
    problems = [FeasibilityProblem(m, s, allowed_k, force_t2_zero, apply) for s in s_values]
    workers = min(thread_count(threads), len(problems))
    if workers <= 1 or len(problems) < 64:
        outcomes = _solve_many(problems)
    else:
        chunk = -(-len(problems) // (workers * 4))
        batches = [problems[i:i + chunk] for i in range(0, len(problems), chunk)]
        with ProcessPoolExecutor(workers) as pool:
            outcomes = [o for batch in pool.map(_solve_many, batches) for o in batch]
    return [(o.problem.s, o) for o in outcomes]


def feasible_set(results: list) -> list:
    return [s for s, o in results if o.feasible]


@dataclass(frozen=True)
class ScanSpec:
    m: int
    s_lo: int
    s_hi: int
    allowed_k: Optional[frozenset] = None
    force_t2_zero: bool = False
    apply: frozenset = ALL_CONSTRAINTS

    def run(self, threads: Optional[int] = None) -> list:
        return scan(
            self.m, self.allowed_k, self.force_t2_zero, (self.s_lo, self.s_hi),
            self.apply, threads,
        )

    def to_json(self) -> dict:
        out = {
            "m": self.m,
            "s": [self.s_lo, self.s_hi],
            "t2_zero": self.force_t2_zero,
            "apply": sorted(self.apply),
        }
        if self.allowed_k is not None:
            out["allowed"] = sorted(self.allowed_k)
        return out


def scan_spec_from_json(obj) -> ScanSpec:
    """Parse ``{"m": 5, "allowed": [3,4,5], "t2_zero": true, "s": [6, 60]}``."""
    if not isinstance(obj, dict):
        raise ValueError("problem spec must be an object")
    extra = set(obj) - {"m", "allowed", "t2_zero", "s", "apply"}
    if extra:
        raise ValueError(f"unexpected keys {sorted(extra)}")
    m = obj.get("m")
    s = obj.get("s")
    if not isinstance(m, int) or isinstance(m, bool):
        raise ValueError("'m' must be an integer")
    if isinstance(s, int) and not isinstance(s, bool):
        s = [s, s]
    if not (isinstance(s, list) and len(s) == 2 and all(isinstance(x, int) for x in s)):
        raise ValueError("'s' must be an integer or a [lo, hi] pair")
    if s[0] > s[1]:
        raise ValueError("empty s range")
    allowed = obj.get("allowed")
    if allowed is not None:
        if not isinstance(allowed, list) or not all(isinstance(k, int) for k in allowed):
            raise ValueError("'allowed' must be a list of integers")
        allowed = frozenset(allowed)
    t2_zero = obj.get("t2_zero", False)
    if not isinstance(t2_zero, bool):
        raise ValueError("'t2_zero' must be a boolean")
    apply = frozenset(obj.get("apply", sorted(ALL_CONSTRAINTS)))
    spec = ScanSpec(m, s[0], s[1], allowed, t2_zero, apply)
    # surface parameter errors before any solving starts
    FeasibilityProblem(m, s[0], allowed, t2_zero, apply)
    return spec


def scan_to_json(spec: ScanSpec, results: list, detail: bool = False) -> dict:
    return {
        "problem": spec.to_json(),
        "feasible_s": feasible_set(results),
        "outcomes": [o.to_json(detail) for _, o in results],
    }
