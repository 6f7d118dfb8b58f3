"""Exact scalars.

Every construction in the package is carried out over the rationals with
:class:`fractions.Fraction`.  A prime field can be selected for the rank and
kernel computations; entries are then reduced modulo ``p`` right before
elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

MAX_PRIME = 2**31 - 1


class FieldError(ValueError):
    pass


class CharDivision(FieldError):
    """A division by an integer that vanishes in the configured field."""


@dataclass(frozen=True)
class Field:
    """Scalar field used for linear algebra.

    ``characteristic == 0`` means the rationals.
    """

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p == 0:
            return
        if p < 2 or p > MAX_PRIME or not _is_prime(p):
            raise FieldError(f"fp:{p} is not a supported prime (2 <= p <= {MAX_PRIME})")

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    def reduce(self, q: Fraction) -> int:
        """Image of a rational in F_p."""
        p = self.characteristic
        den = q.denominator % p
        if den == 0:
            raise CharDivision(f"denominator of {q} vanishes mod {p}")
        return (q.numerator % p) * pow(den, p - 2, p) % p

    def check_invertible(self, n: int) -> None:
        """Raise if the integer ``n`` is zero in the field."""
        if self.characteristic and n % self.characteristic == 0:
            raise CharDivision(f"{n} is zero in characteristic {self.characteristic}")

    def spec(self) -> str:
        return "rational" if self.is_rational else f"fp:{self.characteristic}"

    @classmethod
    def parse(cls, text: str) -> "Field":
        text = text.strip()
        if text in ("rational", "Q", "QQ"):
            return cls(0)
        if text.startswith("fp:"):
            try:
                p = int(text[3:])
            except ValueError as exc:
                raise FieldError(f"bad prime in field spec {text!r}") from exc
            return cls(p)
        raise FieldError(f"unknown field spec {text!r}; expected rational or fp:<prime>")


QQ = Field(0)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"cannot parse scalar {x!r}") from exc
    raise TypeError(f"inexact or unsupported scalar {x!r} of type {type(x).__name__}")


def format_scalar(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (always with a denominator)."""
    return f"{q.numerator}/{q.denominator}"


def parse_scalar(text: str) -> Fraction:
    return to_fraction(text)
