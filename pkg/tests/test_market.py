import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robust_localization import sampling
from robust_localization.core_model import ProbabilityMeasure, RobustModel
from robust_localization.errors import ArbitrageError, VertexLimitExceeded
from robust_localization.market import (
    MarketModel,
    MartingaleSetSelector,
    PiConjugate,
    SelectorKind,
    Strategy,
    arbitrage_free_interval,
    atomic_selector_truncation,
    check_NA_geometric,
    check_NA_under,
    conjugate_pi_classification,
    extend_market,
    ftap_check,
    martingale_polytope_vertices,
    martingale_set_element,
    pricing_support,
    subhedge,
    superhedge,
    superhedge_dual,
    superhedge_dual_Q,
    superhedge_Q,
)
from robust_localization.rationals import NEG_INF

F = Fraction
HALF = ProbabilityMeasure.of_masses(["1/2", "1/2"])
UP = ProbabilityMeasure.dirac(2, 0)
DOWN = ProbabilityMeasure.dirac(2, 1)


@pytest.fixture
def binomial():
    return RobustModel(2, (HALF,)), MarketModel((1,), ((2, "1/2"),))


@pytest.fixture
def trinomial():
    return RobustModel(3, (ProbabilityMeasure.uniform(3),)), MarketModel((1,), ((2, 1, "1/2"),))


def test_binomial_call_price(binomial):
    model, market = binomial
    call = model.rv([1, 0])
    assert check_NA_geometric(model, market).holds
    result = superhedge(model, market, call)
    assert result.price == F(1, 3)
    assert result.strategy.h == (F(2, 3),)
    assert result.pricing_measure.masses == (F(1, 3), F(2, 3))
    assert superhedge_dual(model, market, call, MartingaleSetSelector(SelectorKind.M)) == F(1, 3)
    assert subhedge(model, market, call) == F(1, 3)


def test_binomial_vertices(binomial):
    model, market = binomial
    vertices = martingale_polytope_vertices(model, market)
    assert [v.masses for v in vertices] == [(F(1, 3), F(2, 3))]
    assert pricing_support(model, market) == model.full()


def test_riskless_gain_is_an_arbitrage():
    model = RobustModel(2, (HALF,))
    report = check_NA_geometric(model, MarketModel((1,), ((2, 1),)))
    assert not report.holds
    assert report.strategy.h == (1,)
    assert report.outcome == 0


def test_superhedging_refuses_a_weak_arbitrage_market():
    # the hedging program alone stays bounded here (price 0 with H = 1)
    model = RobustModel(2, (HALF,))
    market = MarketModel((1,), ((2, 1),))
    with pytest.raises(ArbitrageError) as info:
        superhedge(model, market, model.rv([1, 0]))
    assert info.value.strategy.h == (1,)
    with pytest.raises(ArbitrageError):
        arbitrage_free_interval(model, market, model.rv([1, 0]))


def test_strict_arbitrage_empties_the_martingale_set():
    model = RobustModel(2, (HALF,))
    market = MarketModel((1,), ((2, "3/2"),))
    assert martingale_polytope_vertices(model, market) == []
    with pytest.raises(ArbitrageError):
        superhedge_dual(model, market, model.rv([1, 0]), MartingaleSetSelector(SelectorKind.M))
    report = ftap_check(model, market)
    assert not report.na.holds
    assert not report.all_dominated
    assert report.consistent


def test_trinomial_price_interval(trinomial):
    model, market = trinomial
    call = model.rv([1, 0, 0])
    assert arbitrage_free_interval(model, market, call) == (F(0), F(1, 3))
    vertices = martingale_polytope_vertices(model, market)
    assert [v.masses for v in vertices] == [(0, 1, 0), (F(1, 3), 0, F(2, 3))]


def test_claim_priced_inside_the_interval_keeps_no_arbitrage(trinomial):
    model, market = trinomial
    call = model.rv([1, 0, 0])
    assert check_NA_geometric(model, extend_market(market, call, "1/6")).holds
    assert not check_NA_geometric(model, extend_market(market, call, "1/2")).holds


def test_flat_market_has_dirac_vertices():
    model = RobustModel(3, (ProbabilityMeasure.uniform(3),))
    vertices = martingale_polytope_vertices(model, MarketModel((1,), ((1, 1, 1),)))
    assert [v.masses for v in vertices] == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_vertex_limit(binomial):
    model, market = binomial
    with pytest.raises(VertexLimitExceeded):
        martingale_polytope_vertices(model, market, limit=1)


def test_pricing_under_a_single_up_state(binomial):
    model, market = binomial
    q = model.qview(UP)
    assert superhedge_Q(model, market, q, model.rv([1, 0])) == NEG_INF
    assert superhedge_dual_Q(model, market, q, model.rv([1, 0])) == NEG_INF
    assert not check_NA_under(model, market, q).holds


def test_dirac_priors_need_a_convex_selector():
    market = MarketModel((1,), ((2, "1/2"),))
    model = RobustModel(2, (UP, DOWN))
    report = ftap_check(model, market, MartingaleSetSelector(SelectorKind.M_DOMINATED))
    assert report.na.holds
    assert not report.all_dominated
    assert not report.hypotheses_met
    assert report.defects == ()

    convex = RobustModel(2, (UP, DOWN), convex=True)
    report = ftap_check(convex, market, MartingaleSetSelector(SelectorKind.M_DOMINATED))
    assert report.hypotheses_met
    assert report.consistent
    assert [q.masses for q in report.dominating] == [(F(1, 3), F(2, 3))] * 2


def test_martingale_set_members(binomial):
    model, market = binomial
    na_equiv = MartingaleSetSelector(SelectorKind.NA_EQUIV)
    assert martingale_set_element(model, market, na_equiv, HALF) == HALF
    member = martingale_set_element(model, market, MartingaleSetSelector.equivalent_to(HALF))
    assert member.masses == (F(1, 3), F(2, 3))
    assert str(MartingaleSetSelector.equivalent_to(HALF)) == "M_equivalent_to((1/2, 1/2))"
    with pytest.raises(ValueError):
        MartingaleSetSelector(SelectorKind.M_EQUIVALENT_TO)


def test_conjugate_of_the_pricing_functional(binomial):
    model, market = binomial
    assert conjugate_pi_classification(model, market, ProbabilityMeasure.of_masses(["1/3", "2/3"])) == PiConjugate.ZERO
    assert conjugate_pi_classification(model, market, HALF) == PiConjugate.INFINITE


def test_strategy_gains(binomial):
    model, market = binomial
    assert Strategy((2,)).gains(market) == (2, -1)
    assert Strategy((2,)).payoff(model, market).values == (2, -1)


def test_atomic_truncation_mass_shrinks():
    rows = atomic_selector_truncation([1, 2, 4])
    assert [row.min_mass for row in rows] == [F(1, 2), F(1, 3), F(1, 5)]
    assert all(row.dominated for row in rows)


def test_market_validation():
    with pytest.raises(ValueError):
        MarketModel((1,), ((2, 1), (1, 1)))
    with pytest.raises(ValueError):
        MarketModel((1,), ((2, -1),))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_prices_satisfy_duality_without_arbitrage(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    model = sampling.robust_model(rng, n, rng.randint(1, 2), full=True)
    market = sampling.na_market(rng, n, rng.randint(1, 2))
    x = sampling.rv(rng, model)
    assert check_NA_geometric(model, market).holds
    result = superhedge(model, market, x)
    assert result.pricing_measure.expectation(x) == result.price
    assert superhedge_dual(model, market, x, MartingaleSetSelector(SelectorKind.M)) == result.price
    assert subhedge(model, market, x) <= result.price
    assert ftap_check(model, market).consistent


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_rising_asset_is_always_an_arbitrage(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    model = sampling.robust_model(rng, n, rng.randint(1, 3))
    market = sampling.arbitrage_market(rng, n, rng.randint(1, 3))
    report = check_NA_geometric(model, market)
    assert not report.holds
    assert any(g > 0 for g in report.strategy.gains(market))
