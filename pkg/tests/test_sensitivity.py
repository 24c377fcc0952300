from fractions import Fraction

import pytest

from robust_localization.core_model import ProbabilityMeasure, RobustModel
from robust_localization.errors import NotAnAggregatorError, SearchBudgetExceeded
from robust_localization.risk import MaxAffineRiskMeasure
from robust_localization.sensitivity import (
    AggregatorKind,
    FiniteRvSet,
    RvFamily,
    candidate_grid,
    classify_aggregator,
    dirac_family_example,
    is_coherent,
    is_Q_stable,
    is_reduction_set,
    jQ_member,
    localization_identity_check,
    localize_primal_E,
    sup_localized,
)

P1 = ProbabilityMeasure.of_masses(["1/2", "1/2", 0])
P2 = ProbabilityMeasure.of_masses([0, "1/2", "1/2"])
TOP = ProbabilityMeasure.of_masses([0, 0, 1])


@pytest.fixture
def model():
    return RobustModel(3, (ProbabilityMeasure.uniform(3),))


def test_disjoint_supports_patch_into_a_non_trivial_aggregator(model):
    family = RvFamily.from_pairs(model, [(P1, model.rv([1, 2, 9])), (TOP, model.rv([5, 5, 3]))])
    result = is_coherent(model, family)
    assert result.coherent
    assert result.aggregator.values == (1, 2, 3)
    assert classify_aggregator(model, family, result.aggregator).kind == AggregatorKind.NON_TRIVIAL


def test_overlapping_supports_report_the_conflict(model):
    family = RvFamily.from_pairs(model, [(P1, model.rv([1, 2, 0])), (P2, model.rv([0, 3, 4]))])
    result = is_coherent(model, family)
    assert not result.coherent
    assert (result.conflict.first, result.conflict.second, result.conflict.outcome) == (0, 1, 1)


def test_projected_family_is_aggregated_by_its_source(model):
    x = model.rv([3, 7, 9])
    family = RvFamily.projecting(model, x, [P1, P2])
    result = is_coherent(model, family)
    assert result.aggregator == x
    classified = classify_aggregator(model, family, x)
    assert classified.kind == AggregatorKind.TRIVIAL
    assert classified.index == 0


def test_non_aggregator_is_rejected(model):
    family = RvFamily.projecting(model, model.rv([3, 7, 9]), [P1])
    with pytest.raises(NotAnAggregatorError):
        classify_aggregator(model, family, model.rv([3, 8, 9]))


def test_dirac_family_aggregator_escapes_the_set():
    example = dirac_family_example(3)
    result = is_coherent(example.model, example.family)
    assert result.aggregator == example.aggregator
    assert example.aggregator not in example.c
    report = is_Q_stable(example.model, example.c, example.qset)
    assert not report.stable
    assert report.witness not in example.c


def test_dirac_family_set_is_not_a_reduction_set():
    example = dirac_family_example(3)
    universe = list(example.c) + [example.aggregator]
    ok, witness = is_reduction_set(example.model, example.c, example.qset, universe)
    assert not ok
    assert witness == example.aggregator
    assert all(jQ_member(example.model, example.aggregator, example.c, q) for q in example.qset)


def test_candidate_grid_is_stable(model):
    c = FiniteRvSet.of(model, [model.rv([0, 1, 0]), model.rv([1, 0, 1])])
    grid = candidate_grid(model, c)
    assert len(grid) == 8
    qset = [model.qview(P1), model.qview(TOP)]
    assert is_Q_stable(model, grid, qset).stable


def test_stability_search_respects_budget():
    example = dirac_family_example(3)
    with pytest.raises(SearchBudgetExceeded):
        is_Q_stable(example.model, example.c, example.qset, budget=10)


def test_primal_localization_keeps_constraints_inside_the_support():
    model = RobustModel(3, (P1, P2))
    f = MaxAffineRiskMeasure.coherent([P1, P2])
    x = model.rv([2, 4, 10])
    assert localize_primal_E(model, f, model.qview(P1), x) == 3
    assert f.evaluate(x) == 7
    assert sup_localized(model, f, [model.qview(P1), model.qview(P2)], x) == 7


def test_localization_identity_needs_every_relevant_measure():
    model = RobustModel(3, (P1, P2))
    f = MaxAffineRiskMeasure.coherent([P1, P2])
    samples = [model.rv([2, 4, 10]), model.rv([5, 0, 0])]
    assert localization_identity_check(model, f, [model.qview(P1), model.qview(P2)], samples).holds
    partial = localization_identity_check(model, f, [model.qview(P1)], samples)
    assert not partial.holds
    assert [row.x for row in partial.violations] == [samples[0]]
    assert partial.rows[1].localized_sup == Fraction(5, 2)
