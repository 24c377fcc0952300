from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from robust_localization.errors import ScenarioError
from robust_localization.rationals import (
    NEG_INF,
    POS_INF,
    ExtendedRational,
    extended_max,
    format_extended,
    format_rational,
    parse_rational,
)


@pytest.mark.parametrize("text,expected", [
    ("3/4", Fraction(3, 4)),
    ("-1/2", Fraction(-1, 2)),
    (" 6 / 4 ", Fraction(3, 2)),
    ("7", Fraction(7)),
    (5, Fraction(5)),
])
def test_parse_rational_accepts_integers_and_fractions(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("bad", ["0.5", "1/0", "abc", "", True, 1.5])
def test_parse_rational_rejects_everything_else(bad):
    with pytest.raises(ScenarioError):
        parse_rational(bad)


def test_parse_error_carries_location():
    with pytest.raises(ScenarioError) as info:
        parse_rational("1/0", "variables.x[2]")
    assert str(info.value).startswith("variables.x[2]:")
    assert info.value.location == "variables.x[2]"


def test_format_rational_drops_unit_denominator():
    assert format_rational(Fraction(6, 3)) == "2"
    assert format_rational(Fraction(-2, 6)) == "-1/3"


def test_extended_order_and_arithmetic():
    one = ExtendedRational.finite(1)
    assert NEG_INF < one < POS_INF
    assert NEG_INF + NEG_INF == NEG_INF
    assert POS_INF + one == POS_INF
    assert -POS_INF == NEG_INF
    assert one - ExtendedRational.finite("1/2") == Fraction(1, 2)
    with pytest.raises(ArithmeticError):
        POS_INF + NEG_INF
    with pytest.raises(ArithmeticError):
        NEG_INF.to_fraction()


def test_extended_max_of_nothing_is_minus_infinity():
    assert extended_max([]) == NEG_INF
    assert extended_max([Fraction(1, 3), NEG_INF, 0]) == Fraction(1, 3)
    assert format_extended(extended_max([POS_INF, 2])) == "+inf"


@given(st.fractions(), st.fractions())
def test_extended_order_agrees_with_fractions(a, b):
    assert (ExtendedRational.finite(a) < ExtendedRational.finite(b)) == (a < b)
    assert (ExtendedRational.finite(a) + ExtendedRational.finite(b)).to_fraction() == a + b


@given(st.fractions())
def test_format_then_parse_is_identity(value):
    assert parse_rational(format_rational(value)) == value
