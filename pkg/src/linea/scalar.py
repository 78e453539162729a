"""Exact scalar arithmetic over Q, cyclotomic fields Q(zeta_n) and prime fields GF(p).

Cyclotomic elements live in the power basis 1, zeta, ..., zeta^(phi(n)-1) of
Q[x]/(Phi_n(x)), so an element is zero exactly when every coordinate is zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

__all__ = [
    "FieldDescriptor",
    "FieldElement",
    "FieldMismatchError",
    "cyclotomic_polynomial",
    "euler_phi",
    "is_prime",
    "primitive_root",
    "conjugate",
    "parse_fraction",
    "format_fraction",
]

PRIME_LIMIT = 2**31


class FieldMismatchError(ValueError):
    """Operands belong to different fields."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def euler_phi(n: int) -> int:
    result, k, m = n, 2, n
    while k * k <= m:
        if m % k == 0:
            while m % k == 0:
                m //= k
            result -= result // k
        k += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # den is monic; coefficients low -> high
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@dataclass(frozen=True)
class FieldDescriptor:
    """Which field a scalar lives in.

    Use the ``rational``, ``cyclotomic`` and ``prime`` constructors rather
    than building instances by hand.
    """

    kind: str
    order: int = 0

    def __post_init__(self):
        if self.kind == "rational":
            if self.order != 0:
                raise ValueError("rational field takes no order")
        elif self.kind == "cyclotomic":
            if self.order < 3:
                raise ValueError(f"cyclotomic order must be >= 3, got {self.order}")
        elif self.kind == "prime":
            if not is_prime(self.order) or self.order >= PRIME_LIMIT:
                raise ValueError(f"{self.order} is not a prime below 2^31")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> FieldDescriptor:
        return cls("rational")

    @classmethod
    def cyclotomic(cls, n: int) -> FieldDescriptor:
        return cls("cyclotomic", n)

    @classmethod
    def prime(cls, p: int) -> FieldDescriptor:
        return cls("prime", p)

    @property
    def characteristic(self) -> int:
        return self.order if self.kind == "prime" else 0

    @property
    def degree(self) -> int:
        """Dimension over the prime field (phi(n) for cyclotomic fields)."""
        return euler_phi(self.order) if self.kind == "cyclotomic" else 1

    @property
    def modulus(self) -> tuple[int, ...]:
        return cyclotomic_polynomial(self.order)

    def zero(self) -> FieldElement:
        return self.element(0)

    def one(self) -> FieldElement:
        return self.element(1)

    def element(self, value) -> FieldElement:
        """Coerce an int, Fraction or FieldElement of this field."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatchError(f"{value.field} vs {self}")
            return value
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError(f"cannot coerce {type(value).__name__} into {self}")
        if self.kind == "rational":
            return FieldElement(self, Fraction(value))
        if self.kind == "cyclotomic":
            return FieldElement(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))
        value = Fraction(value)
        p = self.order
        if value.denominator % p == 0:
            raise ZeroDivisionError(f"denominator divisible by {p}")
        return FieldElement(self, value.numerator * pow(value.denominator, -1, p) % p)

    def to_json(self) -> dict:
        if self.kind == "rational":
            return {"kind": "rational"}
        if self.kind == "cyclotomic":
            return {"kind": "cyclotomic", "order": self.order}
        return {"kind": "prime", "p": self.order}

    @classmethod
    def from_json(cls, obj) -> FieldDescriptor:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError(f"malformed field descriptor: {obj!r}")
        kind = obj["kind"]
        if kind == "rational":
            return cls.rational()
        if kind == "cyclotomic":
            n = obj.get("order")
            if not isinstance(n, int) or isinstance(n, bool):
                raise ValueError("cyclotomic field needs integer 'order'")
            return cls.cyclotomic(n)
        if kind == "prime":
            p = obj.get("p")
            if not isinstance(p, int) or isinstance(p, bool):
                raise ValueError("prime field needs integer 'p'")
            return cls.prime(p)
        raise ValueError(f"unknown field kind {kind!r}")

    def __str__(self):
        if self.kind == "rational":
            return "QQ"
        if self.kind == "cyclotomic":
            return f"QQ(zeta_{self.order})"
        return f"GF({self.order})"


_FRACTION_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_fraction(text) -> Fraction:
    """Parse the serialized form ``"p/q"`` (q > 0, reduced) or ``"p"``."""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"malformed fraction: {text!r}")
    match = _FRACTION_RE.match(text)
    if not match:
        raise ValueError(f"malformed fraction: {text!r}")
    num = int(match.group(1))
    if match.group(2) is None:
        return Fraction(num)
    den = int(match.group(2))
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    value = Fraction(num, den)
    if value.denominator != den:
        raise ValueError(f"fraction not in lowest terms: {text!r}")
    return value


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


Operand = Union["FieldElement", int, Fraction]


class FieldElement:
    """Immutable exact scalar.

    The payload is a Fraction (rational), a tuple of phi(n) Fractions
    (cyclotomic) or an int residue in [0, p) (prime).
    """

    __slots__ = ("field", "value", "_hash")

    def __init__(self, field: FieldDescriptor, value):
        self.field = field
        self.value = value
        self._hash = None

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> FieldElement | None:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.element(other)
        return None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        kind = self.field.kind
        if kind == "rational":
            return FieldElement(self.field, self.value + other.value)
        if kind == "cyclotomic":
            return FieldElement(self.field, tuple(a + b for a, b in zip(self.value, other.value)))
        return FieldElement(self.field, (self.value + other.value) % self.field.order)

    __radd__ = __add__

    def __neg__(self):
        kind = self.field.kind
        if kind == "rational":
            return FieldElement(self.field, -self.value)
        if kind == "cyclotomic":
            return FieldElement(self.field, tuple(-a for a in self.value))
        return FieldElement(self.field, -self.value % self.field.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        kind = self.field.kind
        if kind == "rational":
            return FieldElement(self.field, self.value * other.value)
        if kind == "prime":
            return FieldElement(self.field, self.value * other.value % self.field.order)
        return FieldElement(self.field, _cyclo_mul(self.value, other.value, self.field.modulus))

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        kind = self.field.kind
        if kind == "rational":
            return FieldElement(self.field, 1 / self.value)
        if kind == "prime":
            return FieldElement(self.field, pow(self.value, -1, self.field.order))
        return FieldElement(self.field, _cyclo_inverse(self.value, self.field.modulus))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> FieldElement:
        return conjugate(self)

    # -- comparison -------------------------------------------------------
    def __bool__(self):
        if self.field.kind == "cyclotomic":
            return any(self.value)
        return bool(self.value)

    def is_zero(self) -> bool:
        return not self

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            try:
                return self.value == self.field.element(other).value
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.value))
        return self._hash

    def sort_key(self) -> tuple:
        """Total order used only for deterministic output, not field order."""
        if self.field.kind == "cyclotomic":
            return self.value
        return (self.value,)

    # -- serialization ----------------------------------------------------
    def to_json(self):
        kind = self.field.kind
        if kind == "rational":
            return format_fraction(self.value)
        if kind == "cyclotomic":
            return [format_fraction(c) for c in self.value]
        return self.value

    @classmethod
    def from_json(cls, field: FieldDescriptor, obj) -> FieldElement:
        kind = field.kind
        if kind == "rational":
            return FieldElement(field, parse_fraction(obj))
        if kind == "cyclotomic":
            if not isinstance(obj, list) or len(obj) != field.degree:
                raise ValueError(
                    f"{field} element needs a list of {field.degree} fractions, got {obj!r}"
                )
            return FieldElement(field, tuple(parse_fraction(c) for c in obj))
        if not isinstance(obj, int) or isinstance(obj, bool) or not 0 <= obj < field.order:
            raise ValueError(f"{field} element must be an integer in [0, {field.order}), got {obj!r}")
        return FieldElement(field, obj)

    def __repr__(self):
        kind = self.field.kind
        if kind == "rational":
            return f"FieldElement({format_fraction(self.value)})"
        if kind == "prime":
            return f"FieldElement({self.value} mod {self.field.order})"
        terms = []
        for i, c in enumerate(self.value):
            if c:
                mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
                coef = format_fraction(c)
                terms.append(coef if not mono else (mono if c == 1 else f"{coef}*{mono}"))
        return f"FieldElement({' + '.join(terms) or '0'} in {self.field})"


def _cyclo_mul(a, b, modulus) -> tuple:
    d = len(a)
    prod = [Fraction(0)] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for i in range(2 * d - 2, d - 1, -1):
        c = prod[i]
        if c:
            base = i - d
            for j in range(d):
                if modulus[j]:
                    prod[base + j] -= c * modulus[j]
    return tuple(prod[:d])


def _cyclo_inverse(a, modulus) -> tuple:
    # Solve (multiplication-by-a matrix) * v = e_0 by Gauss-Jordan elimination.
    d = len(a)
    cols = []
    basis = [Fraction(0)] * d
    for k in range(d):
        e = list(basis)
        e[k] = Fraction(1)
        cols.append(_cyclo_mul(a, tuple(e), modulus))
    rows = [[cols[k][i] for k in range(d)] + [Fraction(1 if i == 0 else 0)] for i in range(d)]
    for c in range(d):
        piv = next(r for r in range(c, d) if rows[r][c])
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [v * inv for v in rows[c]]
        for r in range(d):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[c])]
    return tuple(rows[i][d] for i in range(d))


@lru_cache(maxsize=None)
def _zeta_powers(n: int) -> tuple:
    """Payloads of zeta^j for j = 0..n-1 in the power basis of Q(zeta_n)."""
    field = FieldDescriptor.cyclotomic(n)
    zeta = primitive_root(n)
    out, cur = [], field.one()
    for _ in range(n):
        out.append(cur.value)
        cur = cur * zeta
    return tuple(out)


def primitive_root(n: int) -> FieldElement:
    """The generator zeta_n of Q(zeta_n)."""
    if n < 3:
        raise ValueError(f"primitive_root needs n >= 3, got {n}")
    field = FieldDescriptor.cyclotomic(n)
    payload = [Fraction(0)] * field.degree
    payload[1] = Fraction(1)
    return FieldElement(field, tuple(payload))


def conjugate(a: FieldElement) -> FieldElement:
    """Complex conjugation: identity on Q, zeta -> zeta^(n-1) on Q(zeta_n)."""
    field = a.field
    if field.kind == "prime":
        raise ValueError("conjugation is undefined in positive characteristic")
    if field.kind == "rational":
        return a
    n = field.order
    powers = _zeta_powers(n)
    out = [Fraction(0)] * field.degree
    for k, c in enumerate(a.value):
        if c:
            for j, w in enumerate(powers[(-k) % n]):
                if w:
                    out[j] += c * w
    return FieldElement(field, tuple(out))
