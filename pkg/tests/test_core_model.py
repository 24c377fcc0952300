from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robust_localization.core_model import (
    OutcomeSet,
    ProbabilityMeasure,
    RobustModel,
    Rv,
    SignedMeasure,
    dominates,
    find_dominating_measure,
    is_polar,
    prior_supports,
    project_jQ,
    qs_equal,
    qs_leq,
    total_variation,
    total_variation_bruteforce,
    upper_probability,
)
from robust_localization.errors import NotInModelError

F = Fraction


def two_diracs() -> RobustModel:
    return RobustModel(2, (ProbabilityMeasure.dirac(2, 0), ProbabilityMeasure.dirac(2, 1)))


def test_upper_probability_of_singleton_under_two_diracs():
    model = two_diracs()
    assert upper_probability(model, OutcomeSet.from_indices([0], 2)) == 1
    assert upper_probability(model, OutcomeSet.empty(2)) == 0


def test_outcome_outside_every_support_is_polar():
    model = RobustModel(3, (ProbabilityMeasure.of_masses(["1/2", "1/2", 0]),))
    w3 = OutcomeSet.from_indices([2], 3)
    assert is_polar(model, w3)
    assert not is_polar(model, OutcomeSet.from_indices([1], 3))
    assert model.polar == w3


def test_canonical_rv_is_zero_on_polar_outcomes():
    model = RobustModel(3, (ProbabilityMeasure.of_masses(["1/2", "1/2", 0]),))
    x = model.rv([3, 7, 9])
    assert x.values == (3, 7, 0)
    assert qs_equal(model, Rv((3, 7, 100)), x)
    assert qs_leq(model, Rv((3, 6, 100)), x)
    assert not qs_leq(model, Rv((4, 6, 0)), x)


def test_projection_onto_support():
    model = RobustModel(3, (ProbabilityMeasure.uniform(3),))
    q = model.qview(ProbabilityMeasure.of_masses(["1/2", 0, "1/2"]))
    restricted = project_jQ(model, model.rv([3, 7, 9]), q)
    assert restricted.values == (3, 9)
    assert restricted.as_dict() == {0: 3, 2: 9}


def test_qview_rejects_measures_charging_polar_outcomes():
    model = RobustModel(3, (ProbabilityMeasure.of_masses(["1/2", "1/2", 0]),))
    with pytest.raises(NotInModelError):
        model.qview(ProbabilityMeasure.uniform(3))


def test_mixture_of_measures():
    mixed = ProbabilityMeasure.mixture([
        ProbabilityMeasure.of_masses([1, 0]),
        ProbabilityMeasure.of_masses(["1/2", "1/2"]),
    ])
    assert mixed.masses == (F(3, 4), F(1, 4))


def test_invalid_probability_measures():
    with pytest.raises(ValueError):
        ProbabilityMeasure.of_masses(["1/2", "1/3"])
    with pytest.raises(ValueError):
        ProbabilityMeasure.of_masses(["3/2", "-1/2"])


def test_dominates_by_support_inclusion():
    uniform = [ProbabilityMeasure.uniform(3)]
    partial = [ProbabilityMeasure.of_masses(["1/2", "1/2", 0])]
    assert dominates(partial, uniform)
    assert not dominates(uniform, partial)
    assert dominates(partial, partial)


def test_dominating_measure_is_the_uniform_mixture():
    model = two_diracs()
    mixture = find_dominating_measure(model)
    assert mixture.masses == (F(1, 2), F(1, 2))
    assert dominates(list(model.priors), [mixture])


def test_convex_prior_supports_include_unions():
    priors = (ProbabilityMeasure.dirac(3, 0), ProbabilityMeasure.dirac(3, 1))
    assert len(prior_supports(RobustModel(3, priors))) == 2
    convex = prior_supports(RobustModel(3, priors, convex=True))
    assert OutcomeSet.from_indices([0, 1], 3) in convex
    assert len(convex) == 3


def test_subsets_enumerates_power_set():
    a = OutcomeSet.from_indices([0, 2, 3], 5)
    subsets = list(a.subsets())
    assert len(subsets) == 8
    assert subsets[0] == OutcomeSet.empty(5)
    assert all(s.issubset(a) for s in subsets)


def test_total_variation_examples():
    mu = SignedMeasure((F(1, 2), F(-1, 3), F(1, 6)))
    full = OutcomeSet.full(3)
    assert total_variation(mu, full) == 1
    assert total_variation_bruteforce(mu, full) == 1
    assert total_variation(mu, OutcomeSet.from_indices([1], 3)) == F(1, 3)


masses = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=12), min_size=1, max_size=6)


@settings(max_examples=60)
@given(masses, st.data())
def test_total_variation_matches_bruteforce(values, data):
    mu = SignedMeasure(tuple(values))
    mask = data.draw(st.integers(min_value=0, max_value=(1 << len(values)) - 1))
    outcomes = OutcomeSet(mask, len(values))
    assert total_variation(mu, outcomes) == total_variation_bruteforce(mu, outcomes)
