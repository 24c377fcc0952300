"""
Exact rational helpers: parsing, formatting and extended values (+inf / -inf)
"""
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Optional, Union

from .errors import ScenarioError

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")

RationalLike = Union[int, str, Fraction]


def parse_rational(value: RationalLike, location: Optional[str] = None) -> Fraction:
    """Parse "p/q" strings and integers; decimals are rejected"""
    if isinstance(value, bool):
        raise ScenarioError(f"expected a rational, got {value!r}", location)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ScenarioError(f"expected a rational, got {value!r}", location)
    match = _RATIONAL_RE.match(value)
    if not match:
        raise ScenarioError(f"'{value}' is not of the form p/q or an integer", location)
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ScenarioError(f"'{value}' has a zero denominator", location)
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 6) -> str:
    return f"{float(value):.{digits}f}"


def fractions_of(values: Iterable[RationalLike]) -> tuple:
    return tuple(parse_rational(v) for v in values)


class Kind(str, Enum):
    NEG_INF = "-inf"
    FINITE = "finite"
    POS_INF = "+inf"


_RANK = {Kind.NEG_INF: 0, Kind.FINITE: 1, Kind.POS_INF: 2}


@total_ordering
@dataclass(frozen=True)
class ExtendedRational:
    """A rational number or one of the two infinities"""

    kind: Kind
    value: Fraction = Fraction(0)

    @classmethod
    def finite(cls, value: RationalLike) -> "ExtendedRational":
        return cls(Kind.FINITE, parse_rational(value))

    @property
    def is_finite(self) -> bool:
        return self.kind == Kind.FINITE

    def __lt__(self, other: "ExtendedRational") -> bool:
        other = as_extended(other)
        if self.kind != other.kind:
            return _RANK[self.kind] < _RANK[other.kind]
        if self.kind == Kind.FINITE:
            return self.value < other.value
        return False

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExtendedRational.finite(other)
        if not isinstance(other, ExtendedRational):
            return NotImplemented
        if self.kind != other.kind:
            return False
        return self.kind != Kind.FINITE or self.value == other.value

    def __hash__(self) -> int:
        return hash((self.kind, self.value if self.kind == Kind.FINITE else 0))

    def __neg__(self) -> "ExtendedRational":
        if self.kind == Kind.POS_INF:
            return NEG_INF
        if self.kind == Kind.NEG_INF:
            return POS_INF
        return ExtendedRational.finite(-self.value)

    def __add__(self, other: "ExtendedRational") -> "ExtendedRational":
        other = as_extended(other)
        if self.is_finite and other.is_finite:
            return ExtendedRational.finite(self.value + other.value)
        kinds = {self.kind, other.kind}
        if kinds == {Kind.POS_INF, Kind.NEG_INF}:
            raise ArithmeticError("+inf + -inf is undefined")
        return POS_INF if Kind.POS_INF in kinds else NEG_INF

    def __sub__(self, other: "ExtendedRational") -> "ExtendedRational":
        return self + (-as_extended(other))

    def __str__(self) -> str:
        if self.kind == Kind.FINITE:
            return format_rational(self.value)
        return self.kind.value

    def to_fraction(self) -> Fraction:
        if not self.is_finite:
            raise ArithmeticError(f"{self} has no finite value")
        return self.value


POS_INF = ExtendedRational(Kind.POS_INF)
NEG_INF = ExtendedRational(Kind.NEG_INF)


def as_extended(value: Union[ExtendedRational, RationalLike]) -> ExtendedRational:
    if isinstance(value, ExtendedRational):
        return value
    return ExtendedRational.finite(value)


def extended_max(values: Iterable[Union[ExtendedRational, RationalLike]]) -> ExtendedRational:
    """Maximum of an iterable; the empty maximum is -inf"""
    best = NEG_INF
    for value in values:
        value = as_extended(value)
        if value > best:
            best = value
    return best


def format_extended(value: Union[ExtendedRational, Fraction]) -> str:
    if isinstance(value, ExtendedRational):
        return str(value)
    return format_rational(value)
