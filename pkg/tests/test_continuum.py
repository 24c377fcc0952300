from fractions import Fraction

import pytest

from robust_localization.continuum import (
    IntervalMixtureMeasure,
    PiecewiseRationalFunction,
    bubble_table,
    example1_report,
    example1_value,
    example2_closed_form,
    example2_report,
    example2_witness,
    example_y,
    expect,
    p_n,
    q_half,
    rho_truncated,
)
from robust_localization.rationals import NEG_INF, POS_INF

F = Fraction


@pytest.mark.parametrize("n", [1, 2, 3, 7, 50])
def test_expectation_of_y_under_p_n(n):
    assert expect(p_n(n), example_y()) == F(-2, n * (n + 1))


def test_truncated_supremum_of_y():
    assert rho_truncated(example_y(), 4) == F(-1, 10)
    assert expect(q_half(), example_y()) == F(1, 2)


def test_bubble_table_for_zero_input():
    rows = bubble_table(PiecewiseRationalFunction.constant(0), [1, "5/2"], [1, 4, 10])
    assert [(row.m, row.n_max) for row in rows][:3] == [(1, 1), (1, 4), (1, 10)]
    assert all(row.value == example1_value(row.m, row.n_max) for row in rows)
    assert rows[-1].value == F(-1, 4)


def test_example1_primal_localization_is_relevant_while_dual_is_minus_infinity():
    report = example1_report([1, 2], [1, 5])
    assert [(row.m, row.n_max, row.g) for row in report.rows] == [
        (1, 1, F(-1)), (1, 5, F(-1, 5)), (2, 1, F(-2)), (2, 5, F(-2, 5)),
    ]
    assert all(row.truncated_dual == NEG_INF for row in report.rows)
    assert report.primal_at_zero == 0
    assert report.dual_at_zero == NEG_INF
    assert report.relevant
    assert report.gap == POS_INF
    assert [rho_truncated(example_y(), n) for n in (1, 5)] == [F(-1), F(-1, 15)]


def test_example2_matches_closed_form():
    report = example2_report([0, 1, 3], [1, 2, 10])
    assert report.kappa_dual == F(-1, 2)
    assert report.limiting_gap == F(1, 2)
    assert all(row.kappa == row.closed_form for row in report.rows)
    first = report.rows[0]
    assert (first.m, first.n_max, first.kappa, first.gap) == (0, 1, 0, F(1, 2))
    assert example2_closed_form(1, 1) == F(-1, 2)


def test_example2_gap_tends_to_one_half():
    gap = example2_closed_form(10, 1000) + F(1, 2)
    assert F(48, 100) < gap < F(1, 2)


def test_witness_separates_q_from_the_truncated_measures():
    check = example2_witness(3, 10)
    assert check.q_expectation == 0
    assert check.max_expectation <= 0
    assert check.outside_a_m
    assert check.holds
    assert not example2_witness(1, 1).outside_a_m


def test_piecewise_arithmetic():
    f = PiecewiseRationalFunction.on_interval(0, "1/2", (0, 2))
    g = PiecewiseRationalFunction.indicator("1/4", 1)
    assert f("1/4") == F(1, 2)
    assert f("3/4") == 0
    assert (f * g).integrate(F(0), F(1)) == F(1, 4) - F(1, 16)
    assert (f + g - g) == f
    assert f.scale(3)("1/8") == F(3, 4)


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewiseRationalFunction((F(0), F(1, 2)), ((1,),))
    with pytest.raises(ValueError):
        PiecewiseRationalFunction.polynomial([0, 0, 0, 0, 1])
    with pytest.raises(ValueError):
        IntervalMixtureMeasure(((F(1, 2), (F(0), F(1))),))


def test_interval_mixture_mass():
    assert p_n(3).mass(F(1, 2), F(1)) == F(1, 3)
    assert p_n(1).mass(F(0), F(1, 2)) == 0
