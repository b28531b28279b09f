"""Exact coefficient arithmetic.

Two coefficient domains are supported: arbitrary-precision rationals
(``fractions.Fraction``, always stored in lowest terms with positive
denominator) and prime fields Z_p with elements reduced to [0, p).
A :class:`Field` object knows how to construct, parse and format scalars;
the scalars themselves carry ordinary operator arithmetic so polynomial
code never needs to consult the field for add/mul.
"""

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ArithmeticError):
    """Raised for invalid field configuration or non-invertible division."""


@dataclass(frozen=True)
class ModInt:
    """An element of Z_p, canonical representative in [0, p)."""

    value: int
    modulus: int

    def _check(self, other) -> None:
        if not isinstance(other, ModInt):
            raise FieldError(f"cannot mix ModInt with {type(other).__name__}")
        if self.modulus != other.modulus:
            raise FieldError(f"mixed moduli {self.modulus} and {other.modulus}")

    def __add__(self, other):
        if isinstance(other, int):
            return ModInt((self.value + other) % self.modulus, self.modulus)
        self._check(other)
        return ModInt((self.value + other.value) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return ModInt((self.value - other) % self.modulus, self.modulus)
        self._check(other)
        return ModInt((self.value - other.value) % self.modulus, self.modulus)

    def __rsub__(self, other):
        if isinstance(other, int):
            return ModInt((other - self.value) % self.modulus, self.modulus)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return ModInt((self.value * other) % self.modulus, self.modulus)
        self._check(other)
        return ModInt((self.value * other.value) % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt((-self.value) % self.modulus, self.modulus)

    def inverse(self) -> "ModInt":
        if self.value == 0:
            raise FieldError(f"0 is not invertible mod {self.modulus}")
        return ModInt(pow(self.value, self.modulus - 2, self.modulus), self.modulus)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = ModInt(other % self.modulus, self.modulus)
        self._check(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """Scalar constructor/parser for one coefficient domain."""

    name: str

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def parse(self, text: str):
        """Parse ``p/q`` or integer literals into a scalar."""
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Field) and self.name == getattr(other, "name", None)

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Field({self.name})"


class RationalField(Field):
    name = "Q"

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def parse(self, text: str) -> Fraction:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"bad rational literal {text!r}") from exc

    def format(self, x) -> str:
        return str(x)

    def inv(self, x):
        if x == 0:
            raise FieldError("0 is not invertible")
        return Fraction(1) / x


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.name = f"Z_{p}"

    def from_int(self, n: int) -> ModInt:
        return ModInt(n % self.p, self.p)

    def parse(self, text: str) -> ModInt:
        if "/" in text:
            num, _, den = text.partition("/")
            return self.from_int(int(num)) / self.from_int(int(den))
        try:
            return self.from_int(int(text))
        except ValueError as exc:
            raise FieldError(f"bad scalar literal {text!r}") from exc

    def format(self, x: ModInt) -> str:
        return str(x.value)

    def inv(self, x: ModInt) -> ModInt:
        return x.inverse()


QQ = RationalField()


def field_from_spec(spec: str) -> Field:
    """Build a field from a CLI-style spec: ``q`` or ``p=<prime>``."""
    if spec in ("q", "Q", "rational", "rationals"):
        return QQ
    if spec.startswith("p="):
        return PrimeField(int(spec[2:]))
    raise FieldError(f"unknown field spec {spec!r}")
