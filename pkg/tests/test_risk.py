import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robust_localization import sampling
from robust_localization.core_model import ProbabilityMeasure, RobustModel, Rv
from robust_localization.errors import NotInModelError
from robust_localization.rationals import NEG_INF, POS_INF
from robust_localization.risk import (
    MaxAffineRiskMeasure,
    acceptance_sup,
    bubble_gap,
    combine_max,
    conjugate,
    dual_value,
    is_relevant,
    localize_dual_D,
    mix,
    q_rel_set,
    risk_table,
    truncated_limit_value,
)

F = Fraction
P1 = ProbabilityMeasure.of_masses(["1/2", "1/2", 0])
P2 = ProbabilityMeasure.of_masses([0, "1/2", "1/2"])
TOP = ProbabilityMeasure.of_masses([0, 0, 1])


@pytest.fixture
def model():
    return RobustModel(3, (P1, P2))


@pytest.fixture
def rho():
    return MaxAffineRiskMeasure.of([(P1, 0), (P2, "1/4")])


def test_worst_case_expectation():
    rho = MaxAffineRiskMeasure.coherent([
        ProbabilityMeasure.of_masses([1, 0]),
        ProbabilityMeasure.of_masses(["1/2", "1/2"]),
    ])
    assert rho.is_coherent
    assert rho.evaluate(Rv((1, 0))) == 1
    assert conjugate(rho, ProbabilityMeasure.of_masses(["3/4", "1/4"])) == 0
    assert conjugate(rho, ProbabilityMeasure.of_masses([0, 1])) == POS_INF


def test_conjugate_of_penalized_constraints(rho):
    assert conjugate(rho, P2) == F(1, 4)
    assert conjugate(rho, ProbabilityMeasure.mixture([P1, P2])) == F(1, 8)
    assert conjugate(rho, TOP) == POS_INF


def test_dual_value_matches_evaluation(rho):
    x = Rv((1, -1, 2))
    assert rho.evaluate(x) == F(1, 4)
    assert dual_value(rho, x) == F(1, 4)


def test_localizations_agree_on_relevant_measure(model, rho):
    x = model.rv([1, -1, 2])
    q = model.qview(P1)
    assert is_relevant(rho, q)
    assert localize_dual_D(rho, q, x) == 0
    assert bubble_gap(rho, model, q, x) == 0
    assert truncated_limit_value(rho, q, x, 10) == 0


def test_irrelevant_measure_has_no_gap(model, rho):
    q = model.qview(TOP)
    assert not is_relevant(rho, q)
    assert localize_dual_D(rho, q, model.rv([1, -1, 2])) == NEG_INF
    assert bubble_gap(rho, model, q, model.rv([1, -1, 2])) == 0
    assert q_rel_set(rho, [model.qview(P1), q, model.qview(P2)]) == [model.qview(P1), model.qview(P2)]


def test_risk_table_rows(model, rho):
    rows = risk_table(rho, model, [model.qview(P2), model.qview(TOP)], model.rv([1, -1, 2]))
    assert [row.relevant for row in rows] == [True, False]
    assert rows[0].primal == F(1, 4)
    assert rows[0].dual == F(1, 4)
    assert all(row.gap == 0 for row in rows)


def test_combinations(rho):
    x = Rv((1, -1, 2))
    assert combine_max(rho, MaxAffineRiskMeasure.expectation(TOP)).evaluate(x) == 2
    halfway = mix(MaxAffineRiskMeasure.expectation(P1), MaxAffineRiskMeasure.expectation(P2), "1/2")
    assert halfway.evaluate(x) == F(1, 4)
    with pytest.raises(ValueError):
        mix(rho, rho, 2)


def test_constraint_measures_must_live_in_the_model(rho):
    with pytest.raises(NotInModelError):
        rho.check_model(RobustModel(3, (P1,)))


def test_acceptance_sup_bounds_the_penalty(rho):
    samples = [Rv((0, 0, 0)), Rv((-1, 1, "-3/2")), Rv((5, 5, 5))]
    assert acceptance_sup(rho, P2, samples) == F(0)
    assert acceptance_sup(rho, P2, [Rv((5, 5, 5))]) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_finite_spaces_have_no_localization_gap(seed):
    rng = random.Random(seed)
    model = sampling.robust_model(rng, rng.randint(2, 4), rng.randint(1, 3))
    rho = sampling.risk_measure(rng, model, rng.randint(1, 3))
    x = sampling.rv(rng, model)
    candidates = [model.qview(sampling.measure_in_model(rng, model)) for _ in range(3)]
    assert dual_value(rho, x) == rho.evaluate(x)
    assert all(row.gap == 0 for row in risk_table(rho, model, candidates, x))
