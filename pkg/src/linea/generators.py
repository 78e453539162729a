"""Named arrangement families with exact coordinates, and their closed-form profiles.

Grid convention: ``grid(a, d)`` has ``a`` lines in each direction (x = 1..a,
y = 1..a), the line at infinity z = 0, and ``d`` diagonals. The two points at
infinity then have multiplicity a + 1. Translation to other parameterizations:

    lines per direction a  |  modular multiplicity a + 1  |  s = 2a + 1 + d
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional

from .arrangement import Arrangement, TVectorRecord, build
from .projective import incident, join, line, point
from .scalar import FieldDescriptor, is_prime, primitive_root

__all__ = [
    "FamilySpec",
    "Profile",
    "NoGeneralApexError",
    "generate",
    "expected_profile",
    "pencil",
    "near_pencil",
    "triangle_case1",
    "fermat",
    "fermat_plus_axes",
    "grid",
    "finite_plane",
    "polygon_plus_infinity",
    "cone",
]

QQ = FieldDescriptor.rational()


class NoGeneralApexError(RuntimeError):
    """The cone construction ran out of apex candidates."""


@dataclass(frozen=True)
class FamilySpec:
    """A family name plus its parameters, e.g. ``FamilySpec("grid", a=3, diagonals=2)``."""

    name: str
    params: tuple = ()

    def __init__(self, name: str, **params):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", tuple(sorted(params.items())))

    def __getitem__(self, key):
        return dict(self.params)[key]

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    @property
    def label(self) -> str:
        args = ",".join(
            f"{k}={v.label if isinstance(v, FamilySpec) else v}"
            for k, v in self.params
            if not isinstance(v, Arrangement)
        )
        return f"{self.name}({args})"


def _check(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


def pencil(s: int) -> Arrangement:
    _check(isinstance(s, int) and s >= 2, f"pencil needs s >= 2, got {s}")
    lines = [line(QQ, 1, -i, 0) for i in range(s - 1)] + [line(QQ, 0, 1, 0)]
    return build(QQ, lines)


def near_pencil(s: int) -> Arrangement:
    _check(isinstance(s, int) and s >= 3, f"near pencil needs s >= 3, got {s}")
    return build(QQ, list(pencil(s - 1).lines) + [line(QQ, 0, 0, 1)])


def triangle_case1() -> Arrangement:
    """Five lines xyz(x-y)(x-z): two modular points of multiplicity 3."""
    return build(QQ, [line(QQ, *c) for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 0), (1, 0, -1))])


def _roots(n: int):
    """Field and the n-th roots of unity 1, e, ..., e^(n-1); Q for n <= 2."""
    if n <= 2:
        return QQ, [QQ.one(), -QQ.one()][:n]
    e = primitive_root(n)
    return e.field, [e ** k for k in range(n)]


def _fermat_lines(n: int):
    field, roots = _roots(n)
    lines = []
    for w in roots:
        lines.append(line(field, 1, -w, 0))
    for w in roots:
        lines.append(line(field, 1, 0, -w))
    for w in roots:
        lines.append(line(field, 0, 1, -w))
    return field, lines


def fermat(n: int) -> Arrangement:
    """Linear factors of (x^n - y^n)(x^n - z^n)(y^n - z^n)."""
    _check(isinstance(n, int) and n >= 1, f"fermat needs n >= 1, got {n}")
    field, lines = _fermat_lines(n)
    return build(field, lines)


def fermat_plus_axes(n: int, eps: int = 3) -> Arrangement:
    """Fermat lines plus x, y (eps=2) or x, y, z (eps=3)."""
    _check(isinstance(n, int) and n >= 1, f"fermat_plus_axes needs n >= 1, got {n}")
    _check(eps in (2, 3), f"eps must be 2 or 3, got {eps}")
    field, lines = _fermat_lines(n)
    axes = [line(field, 1, 0, 0), line(field, 0, 1, 0), line(field, 0, 0, 1)][:eps]
    return build(field, axes + lines)


def grid(a: int, diagonals: int = 0) -> Arrangement:
    _check(isinstance(a, int) and a >= 2, f"grid needs a >= 2, got {a}")
    _check(diagonals in (0, 1, 2), f"diagonals must be 0, 1 or 2, got {diagonals}")
    _check(diagonals != 2 or a % 2 == 1, "both diagonals need an odd number of lines per direction")
    lines = [line(QQ, 1, 0, -i) for i in range(1, a + 1)]
    lines += [line(QQ, 0, 1, -i) for i in range(1, a + 1)]
    lines.append(line(QQ, 0, 0, 1))
    if diagonals >= 1:
        lines.append(line(QQ, 1, -1, 0))  # y = x
    if diagonals == 2:
        lines.append(line(QQ, 1, 1, -(a + 1)))  # x + y = a + 1
    return build(QQ, lines)


def finite_plane(p: int) -> Arrangement:
    """All p^2 + p + 1 lines of the projective plane over GF(p)."""
    _check(isinstance(p, int) and is_prime(p) and p <= 11, f"finite_plane needs a prime p <= 11, got {p}")
    F = FieldDescriptor.prime(p)
    lines = [line(F, 1, b, c) for b in range(p) for c in range(p)]
    lines += [line(F, 0, 1, c) for c in range(p)]
    lines.append(line(F, 0, 0, 1))
    return build(F, lines)


def polygon_plus_infinity(n: int) -> Arrangement:
    """Sides and symmetry axes of a regular n-gon (n even) plus the line at infinity.

    Vertices are (cos 2 pi k/n, sin 2 pi k/n) computed exactly in Q(zeta_L),
    L = lcm(4, n).
    """
    _check(isinstance(n, int) and n >= 4 and n % 2 == 0, f"polygon needs even n >= 4, got {n}")
    L = lcm(4, n)
    zeta = primitive_root(L)
    field = zeta.field
    w = zeta ** (L // n)
    i = zeta ** (L // 4)
    half = Fraction(1, 2)
    affine = []
    for k in range(n):
        c = (w ** k + w ** (-k)) * half
        s = (w ** k - w ** (-k)) * half / i
        affine.append((c, s))
    verts = [point(field, c, s, 1) for c, s in affine]
    center = point(field, 0, 0, 1)
    sides = [join(verts[k], verts[(k + 1) % n]) for k in range(n)]
    axes = [join(center, verts[k]) for k in range(n // 2)]
    for k in range(n // 2):
        (ax, ay), (bx, by) = affine[k], affine[k + 1]
        mid = point(field, (ax + bx) * half, (ay + by) * half, 1)
        axes.append(join(center, mid))
    return build(field, sides + axes + [line(field, 0, 0, 1)])


def _apex_candidates(seed: int):
    rng = random.Random(seed)
    while True:
        yield (
            Fraction(rng.randint(-60, 60), rng.randint(1, 12)),
            Fraction(rng.randint(-60, 60), rng.randint(1, 12)),
        )


def cone(base: Arrangement, seed: int = 0, max_tries: int = 200, allow_trivial_base: bool = False):
    """Add to ``base`` every line from a general apex to a base crossing.

    The apex is drawn from a seeded pseudo-random sequence of rational
    points and redrawn until it lies on no base line and no line through it
    holds two base crossings. Returns ``(arrangement, apex)``.
    """
    from .structure import classify

    if not allow_trivial_base:
        _check(not classify(base).trivial, "cone base must not be a pencil or near pencil")
    field = base.field
    crossings = [c.point for c in base.summary.crossings]
    candidates = _apex_candidates(seed)
    for _ in range(max_tries):
        x, y = next(candidates)
        try:
            apex = point(field, x, y, 1)
        except ZeroDivisionError:
            continue
        if any(incident(apex, L) for L in base.lines):
            continue
        spokes = [join(apex, c) for c in crossings]
        if len(set(spokes)) != len(spokes):
            continue
        return build(field, list(base.lines) + spokes), apex
    raise NoGeneralApexError(f"no general apex within {max_tries} draws (seed {seed})")


def generate(spec: FamilySpec) -> Arrangement:
    name = spec.name
    if name == "pencil":
        return pencil(spec["s"])
    if name == "near_pencil":
        return near_pencil(spec["s"])
    if name == "triangle_case1":
        return triangle_case1()
    if name == "fermat":
        return fermat(spec["n"])
    if name == "fermat_plus_axes":
        return fermat_plus_axes(spec["n"], spec.get("eps", 3))
    if name == "grid":
        return grid(spec["a"], spec.get("diagonals", 0))
    if name == "finite_plane":
        return finite_plane(spec["p"])
    if name == "polygon_plus_infinity":
        return polygon_plus_infinity(spec["n"])
    if name == "cone":
        base = spec["base"]
        if isinstance(base, FamilySpec):
            base = generate(base)
        arr, _ = cone(
            base, spec.get("seed", 0),
            allow_trivial_base=spec.get("allow_trivial_base", False),
        )
        return arr
    raise ValueError(f"unknown family {name!r}")


@dataclass
class Profile:
    """Predicted t-vector and modular data for a family instance."""

    record: TVectorRecord
    modular_count: int
    modular_multiplicities: tuple
    stated_t: Optional[dict] = None  # t-vector as printed, when it differs from record.t
    notes: list = field(default_factory=list)


def _add(t: dict, k: int, v: int):
    if v:
        t[k] = t.get(k, 0) + v


def expected_profile(spec: FamilySpec) -> Profile:
    name = spec.name
    t: dict[int, int] = {}
    notes: list[str] = []
    stated = None
    if name == "pencil":
        s = spec["s"]
        _add(t, s, 1)
        mods = (s,)
    elif name == "near_pencil":
        s = spec["s"]
        if s == 3:
            _add(t, 2, 3)
            mods = (2, 2, 2)
        else:
            _add(t, 2, s - 1)
            _add(t, s - 1, 1)
            mods = (s - 1,) + (2,) * (s - 1)
    elif name == "triangle_case1":
        s = 5
        t = {2: 4, 3: 2}
        mods = (3, 3)
    elif name == "fermat":
        n = spec["n"]
        s = 3 * n
        if n == 1:
            t, mods = {3: 1}, (3,)
        else:
            _add(t, 3, n * n)
            _add(t, n, 3)
            # n = 2 is the six lines through four general points
            mods = (3, 3, 3, 3) if n == 2 else ()
    elif name == "fermat_plus_axes":
        n, eps = spec["n"], spec.get("eps", 3)
        s = 3 * n + eps
        _add(t, 3, n * n)
        if eps == 3:
            _add(t, n + 2, 3)
            _add(t, 2, 3 * n)
            mods = (3, 3, 3, 3) if n == 1 else (n + 2,) * 3
        else:
            _add(t, n + 2, 1)
            _add(t, n + 1, 2)
            _add(t, 2, 2 * n)
            mods = (3, 3) if n == 1 else (n + 2,)
    elif name == "grid":
        a, d = spec["a"], spec.get("diagonals", 0)
        s = 2 * a + 1 + d
        m = a + 1
        _add(t, m, 2)
        if d == 0:
            _add(t, 2, a * a)
            mods = (m, m)
        elif d == 1:
            _add(t, 2, a * a - a + 1)
            _add(t, 3, a)
            mods = (3, 3, 3, 3) if a == 2 else (m, m)
        elif a == 3:
            t = {2: 6, 3: 4, 4: 3}
            mods = (4, 4, 4)
        else:
            _add(t, 2, a * a - 2 * a + 3)
            _add(t, 3, 2 * a - 2)
            _add(t, 4, 1)
            mods = (m, m)
            stated = dict(t)
            stated[2] = (m - 1) ** 2 - (2 * m - 1) + 2
            notes.append(
                f"printed closed form gives t_2 = (m-1)^2 - (2m-1) + 2 = {stated[2]}; "
                f"the pair count identity forces t_2 = {t[2]} (the two diagonal "
                "points at infinity are double points)"
            )
    elif name == "finite_plane":
        p = spec["p"]
        s = p * p + p + 1
        _add(t, p + 1, s)
        mods = (p + 1,) * s
    else:
        raise ValueError(f"family {name!r} has no closed-form profile")
    record = TVectorRecord(spec.label, s, t)
    return Profile(record, len(mods), tuple(sorted(mods)), stated, notes)
