"""Arithmetic in binary finite fields GF(2^m).

Field elements are polynomials over GF(2) packed into Python ints: bit i
holds the coefficient of x^i, so every reduced value is < 2^m.  Addition
is XOR.  Multiplication is textbook shift-and-XOR with reduction against
an irreducible polynomial of degree m.  Inversion uses the binary
extended Euclidean algorithm; exponentiation is provided separately so
tests can cross-check inversion via a^(2^m - 2).

Irreducibility of the reduction polynomial is verified exhaustively for
m <= 20 (trial division).  Larger polynomials, typically taken from
public curve standards, are trusted as supplied.

All types are immutable values and all operations are pure functions, so
everything here is safe to share freely between threads.

Nothing in this module is constant-time; this is a research artifact,
not production cryptography.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError, ParameterError

#: Largest supported field degree (matches the biggest standardized
#: binary curves; nothing here depends on the value beyond validation).
MAX_DEGREE = 571

#: Degree up to which user-supplied reduction polynomials are checked
#: for irreducibility.  Above this the check is skipped for cost.
IRREDUCIBILITY_CHECK_LIMIT = 20


def _poly_mod(a: int, g: int) -> int:
    """Remainder of polynomial a modulo g over GF(2)."""
    dg = g.bit_length()
    while a.bit_length() >= dg:
        a ^= g << (a.bit_length() - dg)
    return a


def is_irreducible(poly: int) -> bool:
    """Exhaustively test a GF(2) polynomial for irreducibility.

    Trial division by every polynomial of degree 1..deg/2.  Only meant
    for small degrees (see IRREDUCIBILITY_CHECK_LIMIT).
    """
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in range(1 << d):
            g = (1 << d) | low
            if _poly_mod(poly, g) == 0:
                return False
    return True


@dataclass(frozen=True)
class BinaryField:
    """Parameters of GF(2^m): the degree and the reduction polynomial.

    ``poly`` includes the leading bit m, e.g. x^4 + x + 1 is 0b10011.
    """

    m: int
    poly: int

    def __post_init__(self) -> None:
        if not 2 <= self.m <= MAX_DEGREE:
            raise ParameterError(f"field degree m={self.m} outside [2, {MAX_DEGREE}]")
        if self.poly.bit_length() != self.m + 1:
            raise ParameterError("reduction polynomial must have degree exactly m")
        if self.poly & 1 == 0:
            raise ParameterError("reduction polynomial must have a nonzero constant term")
        if self.m <= IRREDUCIBILITY_CHECK_LIMIT and not is_irreducible(self.poly):
            raise ParameterError(f"reduction polynomial {self.poly:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def hex_width(self) -> int:
        """Fixed width, in hex digits, of a serialized element."""
        return (self.m + 3) // 4

    def element(self, value: int) -> FieldElement:
        return FieldElement(self, value)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def parse_hex(self, text: str) -> FieldElement:
        """Parse a big-endian hex string into an element.

        Leading zeros are fine; values >= 2^m are rejected.
        """
        try:
            value = int(text, 16)
        except ValueError:
            raise FormatError(f"not a hex string: {text!r}") from None
        if value < 0 or value >= self.order:
            raise FormatError(f"hex value {text!r} does not fit in {self.m} bits")
        return FieldElement(self, value)

    # int-level kernels; FieldElement wraps these with field checks
    def _mul(self, a: int, b: int) -> int:
        top = 1 << self.m
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= self.poly
        return r

    def _inv(self, a: int) -> int:
        # Binary extended Euclid: maintains g1*a = u, g2*a = v (mod poly).
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        u, v = a, self.poly
        g1, g2 = 1, 0
        while u != 1 and v != 1:
            while u & 1 == 0:
                u >>= 1
                g1 = g1 >> 1 if g1 & 1 == 0 else (g1 ^ self.poly) >> 1
            while v & 1 == 0:
                v >>= 1
                g2 = g2 >> 1 if g2 & 1 == 0 else (g2 ^ self.poly) >> 1
            if u.bit_length() > v.bit_length():
                u ^= v
                g1 ^= g2
            else:
                v ^= u
                g2 ^= g1
        return g1 if u == 1 else g2


@dataclass(frozen=True)
class FieldElement:
    """A reduced polynomial in GF(2^m), tied to its field parameters."""

    field: BinaryField
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.order:
            raise ParameterError(
                f"value {self.value:#x} out of range for GF(2^{self.field.m})"
            )

    def _peer(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise ParameterError("field elements belong to different fields")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._peer(other)
        return FieldElement(self.field, self.value ^ other.value)

    # characteristic 2: subtraction is addition
    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._peer(other)
        return FieldElement(self.field, self.field._mul(self.value, other.value))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._peer(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> FieldElement:
        if n < 0:
            raise ParameterError("negative exponents not supported; use inverse()")
        r = self.field.one
        base = self
        while n:
            if n & 1:
                r = r * base
            base = base.square()
            n >>= 1
        return r

    def square(self) -> FieldElement:
        return FieldElement(self.field, self.field._mul(self.value, self.value))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field._inv(self.value))

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def to_hex(self) -> str:
        """Big-endian hex, zero-padded to the field's fixed width."""
        return format(self.value, f"0{self.field.hex_width}x")

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElement(0x{self.to_hex()}, m={self.field.m})"
