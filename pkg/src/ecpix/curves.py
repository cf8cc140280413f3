"""Group law for non-supersingular elliptic curves over GF(2^m).

Curves have the form

    y^2 + x*y = x^3 + a*x^2 + b        (b != 0)

and their rational points, together with the point at infinity, form an
abelian group.  The slope formulas are the standard affine ones for
binary curves:

    distinct points:  lam = (y1+y2)/(x1+x2)
                      x3  = lam^2 + lam + x1 + x2 + a
                      y3  = lam*(x1+x3) + x3 + y1
    doubling (x!=0):  lam = x + y/x
                      x3  = lam^2 + lam + a
                      y3  = x^2 + (lam+1)*x3
    negation:         -(x, y) = (x, x+y)

A point with x = 0 is 2-torsion, so doubling it yields infinity.

Everything is an immutable value; operations are pure and thread-safe.
Affine coordinates are used throughout for direct testability.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapabilityError, ParameterError
from .gf2m import BinaryField, FieldElement

#: Largest field degree for which exhaustive point enumeration is allowed.
ENUMERATION_LIMIT = 12


@dataclass(frozen=True)
class Point:
    """Affine curve point, or the point at infinity (both coords None)."""

    x: FieldElement | None
    y: FieldElement | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.is_infinity:
            return "Point(infinity)"
        return f"Point(0x{self.x.to_hex()}, 0x{self.y.to_hex()})"


#: The group identity.
INFINITY = Point(None, None)


@dataclass(frozen=True)
class CurveParams:
    """Domain parameters: the field plus the curve coefficients a and b."""

    field: BinaryField
    a: FieldElement
    b: FieldElement

    def __post_init__(self) -> None:
        if self.a.field != self.field or self.b.field != self.field:
            raise ParameterError("curve coefficients must live in the curve's field")
        if self.b.is_zero:
            raise ParameterError("b = 0 gives a supersingular curve; b must be nonzero")

    def contains(self, x: FieldElement, y: FieldElement) -> bool:
        """True iff (x, y) satisfies the curve equation."""
        if x.field != self.field or y.field != self.field:
            raise ParameterError("coordinates from the wrong field")
        lhs = y.square() + x * y
        rhs = x.square() * x + self.a * x.square() + self.b
        return lhs == rhs

    def point(self, x: int | FieldElement, y: int | FieldElement) -> Point:
        """Construct a validated affine point; off-curve input is rejected."""
        if isinstance(x, int):
            x = self.field.element(x)
        if isinstance(y, int):
            y = self.field.element(y)
        if not self.contains(x, y):
            raise ParameterError(f"({int(x):#x}, {int(y):#x}) is not on the curve")
        return Point(x, y)

    def negate(self, p: Point) -> Point:
        if p.is_infinity:
            return INFINITY
        return Point(p.x, p.x + p.y)

    def add(self, p: Point, q: Point) -> Point:
        if p.is_infinity:
            return q
        if q.is_infinity:
            return p
        if p.x == q.x:
            if p.y != q.y:
                return INFINITY  # q == -p
            return self.double(p)
        lam = (p.y + q.y) / (p.x + q.x)
        x3 = lam.square() + lam + p.x + q.x + self.a
        y3 = lam * (p.x + x3) + x3 + p.y
        return Point(x3, y3)

    def double(self, p: Point) -> Point:
        if p.is_infinity or p.x.is_zero:
            return INFINITY  # x = 0 is 2-torsion
        lam = p.x + p.y / p.x
        x3 = lam.square() + lam + self.a
        y3 = p.x.square() + (lam + self.field.one) * x3
        return Point(x3, y3)

    def scalar_mul(self, k: int, p: Point) -> Point:
        """[k]P by left-to-right double-and-add, k >= 0."""
        if k < 0:
            raise ParameterError("scalar must be non-negative")
        if k == 0 or p.is_infinity:
            return INFINITY
        r = p
        for i in range(k.bit_length() - 2, -1, -1):
            r = self.double(r)
            if (k >> i) & 1:
                r = self.add(r, p)
        return r

    def enumerate_points(self) -> list[Point]:
        """All points on the curve (infinity first), by exhaustive substitution.

        Only tractable for toy fields; refuses m > ENUMERATION_LIMIT.
        """
        if self.field.m > ENUMERATION_LIMIT:
            raise CapabilityError(
                f"point enumeration needs m <= {ENUMERATION_LIMIT}, got m={self.field.m}"
            )
        pts = [INFINITY]
        for xv in range(self.field.order):
            x = self.field.element(xv)
            for yv in range(self.field.order):
                y = self.field.element(yv)
                if self.contains(x, y):
                    pts.append(Point(x, y))
        return pts


@dataclass(frozen=True)
class NamedCurve:
    """Registry entry: parameters plus a base point and (if known) its order."""

    name: str
    curve: CurveParams
    generator: Point
    order: int | None


def _make_named(name: str, m: int, poly: int, a: int, b: int, gx: int, gy: int,
                order: int | None) -> NamedCurve:
    field = BinaryField(m, poly)
    curve = CurveParams(field, field.element(a), field.element(b))
    return NamedCurve(name, curve, curve.point(gx, gy), order)


def _registry() -> dict[str, NamedCurve]:
    reg = {}

    # Tiny curve for tests and demos: full group is enumerable (order 16).
    reg["toy4"] = _make_named(
        "toy4", m=4, poly=0b10011, a=1, b=1, gx=0x8, gy=0x2, order=16,
    )

    # Koblitz curve over GF(2^163), FIPS 186-4 / SEC 2 "sect163k1".
    reg["sect163k1"] = _make_named(
        "sect163k1",
        m=163,
        poly=(1 << 163) | (1 << 7) | (1 << 6) | (1 << 3) | 1,
        a=1,
        b=1,
        gx=0x2FE13C0537BBC11ACAA07D793DE4E6D5E5C94EEE8,
        gy=0x289070FB05D38FF58321F2E800536D538CCDAA3D9,
        order=0x4000000000000000000020108A2E0CC0D99F8A5EF,
    )

    # Koblitz curve over GF(2^233), "sect233k1".
    reg["sect233k1"] = _make_named(
        "sect233k1",
        m=233,
        poly=(1 << 233) | (1 << 74) | 1,
        a=0,
        b=1,
        gx=0x17232BA853A7E731AF129F22FF4149563A419C26BF50A4C9D6EEFAD6126,
        gy=0x1DB537DECE819B7F70F555A67C427A8CD9BF18AEB9B56E0C11056FAE6A3,
        order=0x8000000000000000000000000000069D5BB915BCD46EFB1AD5F173ABDF,
    )

    return reg


CURVE_REGISTRY = _registry()

#: Curve used by `keygen` when none is named.
DEFAULT_CURVE_NAME = "sect163k1"


def get_curve(name: str) -> NamedCurve:
    try:
        return CURVE_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(CURVE_REGISTRY))
        raise ParameterError(f"unknown curve {name!r} (known: {known})") from None
