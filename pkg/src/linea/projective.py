"""Points and lines of the projective plane over an exact field."""

from __future__ import annotations

from .scalar import FieldDescriptor, FieldElement, FieldMismatchError, conjugate

__all__ = [
    "ProjPoint",
    "ProjLine",
    "point",
    "line",
    "cross",
    "canonicalize",
    "meet",
    "join",
    "incident",
    "is_real_line",
]


def cross(u, v) -> tuple:
    """Exact cross product of two coordinate triples."""
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def canonicalize(coords) -> tuple:
    """Scale a nonzero triple so its first nonzero entry is 1."""
    for c in coords:
        if c:
            if c == 1:
                return tuple(coords)
            inv = c.inverse()
            return tuple(x * inv for x in coords)
    raise ValueError("the zero triple is not a projective element")


class _Homogeneous:
    __slots__ = ("coords", "_hash")

    def __init__(self, coords):
        coords = tuple(coords)
        if len(coords) != 3:
            raise ValueError("expected a triple")
        field = coords[0].field
        if any(c.field != field for c in coords):
            raise FieldMismatchError("coordinates from different fields")
        self.coords = canonicalize(coords)
        self._hash = None

    @property
    def field(self) -> FieldDescriptor:
        return self.coords[0].field

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.coords))
        return self._hash

    def sort_key(self) -> tuple:
        return tuple(c.sort_key() for c in self.coords)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coords]

    def __repr__(self):
        inner = ", ".join(repr(c)[len("FieldElement("):-1] for c in self.coords)
        return f"{type(self).__name__}({inner})"


class ProjPoint(_Homogeneous):
    """A point (x : y : z), stored with its first nonzero coordinate equal to 1."""

    __slots__ = ()


class ProjLine(_Homogeneous):
    """The line c0*x + c1*y + c2*z = 0, canonicalized like ProjPoint."""

    __slots__ = ()

    @classmethod
    def from_json(cls, field: FieldDescriptor, obj) -> ProjLine:
        if not isinstance(obj, list) or len(obj) != 3:
            raise ValueError(f"line must be a list of three coefficients, got {obj!r}")
        coeffs = [FieldElement.from_json(field, c) for c in obj]
        if not any(coeffs):
            raise ValueError("line coefficients are all zero")
        return cls(coeffs)


def _triple(field: FieldDescriptor, values) -> tuple:
    return tuple(field.element(v) for v in values)


def point(field: FieldDescriptor, x, y, z) -> ProjPoint:
    return ProjPoint(_triple(field, (x, y, z)))


def line(field: FieldDescriptor, a, b, c) -> ProjLine:
    return ProjLine(_triple(field, (a, b, c)))


def meet(a: ProjLine, b: ProjLine) -> ProjPoint:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    if a == b:
        raise ValueError("meet of identical lines is undefined")
    return ProjPoint(cross(a.coords, b.coords))


def join(p: ProjPoint, q: ProjPoint) -> ProjLine:
    if p.field != q.field:
        raise FieldMismatchError(f"{p.field} vs {q.field}")
    if p == q:
        raise ValueError("join of identical points is undefined")
    return ProjLine(cross(p.coords, q.coords))


def incident(p: ProjPoint, L: ProjLine) -> bool:
    if p.field != L.field:
        raise FieldMismatchError(f"{p.field} vs {L.field}")
    u, v = p.coords, L.coords
    return not (u[0] * v[0] + u[1] * v[1] + u[2] * v[2])


def is_real_line(L: ProjLine) -> bool:
    """True iff the coefficients are proportional to their complex conjugates."""
    if L.field.characteristic:
        raise ValueError("realness is undefined in positive characteristic")
    conj = tuple(conjugate(c) for c in L.coords)
    return not any(cross(L.coords, conj))
