"""
One-period robust markets
No-arbitrage checks, martingale measure sets, super/subhedging prices with
their duals, the fundamental theorem check and martingale polytope vertices.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .config import get_settings, ordered_map
from .core_model import (
    OutcomeSet,
    ProbabilityMeasure,
    QView,
    RobustModel,
    Rv,
    find_dominating_measure,
    prior_supports,
    support_of,
)
from .errors import ArbitrageError, InvalidProblemError, UnboundedPriceError, VertexLimitExceeded
from .exact_linalg import independent_rows, rref, solve_square
from .lp_solver import LinearProgram, LpStatus, Relation, Sense, solve
from .rationals import NEG_INF, POS_INF, ExtendedRational, RationalLike, as_extended, parse_rational

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class MarketModel:
    s0: Tuple[Fraction, ...]
    s1: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        s0 = tuple(parse_rational(v) for v in self.s0)
        s1 = tuple(tuple(parse_rational(v) for v in row) for row in self.s1)
        if not s0:
            raise ValueError("a market needs at least one asset")
        if len(s1) != len(s0):
            raise ValueError(f"{len(s0)} initial prices but {len(s1)} terminal price rows")
        widths = {len(row) for row in s1}
        if len(widths) != 1 or 0 in widths:
            raise ValueError("terminal price rows must have the same positive length")
        if any(v < 0 for v in s0) or any(v < 0 for row in s1 for v in row):
            raise ValueError("prices must be non-negative")
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "s1", s1)

    @property
    def d(self) -> int:
        return len(self.s0)

    @property
    def n(self) -> int:
        return len(self.s1[0])

    @property
    def delta(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(tuple(v - p for v in row) for p, row in zip(self.s0, self.s1))

    def delta_at(self, outcome: int) -> Tuple[Fraction, ...]:
        return tuple(row[outcome] - p for p, row in zip(self.s0, self.s1))

    def submarket(self, indices: Sequence[int]) -> "MarketModel":
        return MarketModel(tuple(self.s0[i] for i in indices), tuple(self.s1[i] for i in indices))

    def with_asset(self, s0: RationalLike, s1: Sequence[RationalLike]) -> "MarketModel":
        return MarketModel(self.s0 + (parse_rational(s0),), self.s1 + (tuple(s1),))


@dataclass(frozen=True)
class Strategy:
    h: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(parse_rational(v) for v in self.h))

    def gains(self, market: MarketModel) -> Tuple[Fraction, ...]:
        return tuple(
            sum((h * dv for h, dv in zip(self.h, market.delta_at(w))), ZERO) for w in range(market.n)
        )

    def payoff(self, model: RobustModel, market: MarketModel) -> Rv:
        """[H dS]_c as a random variable"""
        return model.rv(self.gains(market))


class SelectorKind(str, Enum):
    M = "M"
    NA_EQUIV = "NA"
    M_DOMINATED = "M_dominated"
    M_EQUIVALENT = "M_equivalent"
    M_EQUIVALENT_TO = "M_equivalent_to"


@dataclass(frozen=True)
class MartingaleSetSelector:
    kind: SelectorKind
    reference: Optional[ProbabilityMeasure] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SelectorKind(self.kind))
        if (self.kind == SelectorKind.M_EQUIVALENT_TO) != (self.reference is not None):
            raise ValueError("a reference measure is required exactly for M_equivalent_to")

    @classmethod
    def equivalent_to(cls, reference: ProbabilityMeasure) -> "MartingaleSetSelector":
        return cls(SelectorKind.M_EQUIVALENT_TO, reference)

    def __str__(self) -> str:
        if self.reference is not None:
            return f"{self.kind.value}({self.reference})"
        return self.kind.value


class PiConjugate(str, Enum):
    ZERO = "zero"
    INFINITE = "infinite"


@dataclass(frozen=True)
class NAReport:
    holds: bool
    strategy: Optional[Strategy] = None
    outcome: Optional[int] = None


@dataclass(frozen=True)
class SuperhedgeResult:
    price: Fraction
    strategy: Strategy
    pricing_measure: ProbabilityMeasure


@dataclass(frozen=True)
class FtapReport:
    selector: MartingaleSetSelector
    na: NAReport
    dominating: Tuple[Optional[ProbabilityMeasure], ...]
    hypotheses_met: bool
    defects: Tuple[str, ...] = ()

    @property
    def all_dominated(self) -> bool:
        return all(q is not None for q in self.dominating)

    @property
    def consistent(self) -> bool:
        return self.na.holds == self.all_dominated


# -- no arbitrage ---------------------------------------------------------


def _na_over(market: MarketModel, outcomes: OutcomeSet) -> NAReport:
    d = market.d
    gains_rows = [(market.delta_at(w), Relation.GE, ZERO) for w in outcomes]
    for w in outcomes:
        lp = LinearProgram.build(
            market.delta_at(w), Sense.MAX, gains_rows, lower=[-1] * d, upper=[1] * d
        )
        outcome = solve(lp)
        if outcome.objective_value > 0:
            strategy = Strategy(outcome.primal)
            logger.info(f"arbitrage {strategy.h} gains at w{w + 1}")
            return NAReport(False, strategy, w)
    return NAReport(True)


def check_NA_geometric(model: RobustModel, market: MarketModel) -> NAReport:
    _check_dimensions(model, market)
    return _na_over(market, model.support_T)


def check_NA_under(model: RobustModel, market: MarketModel, q: QView) -> NAReport:
    """NA(Q,S): the same test with T replaced by supp(Q)"""
    _check_dimensions(model, market)
    return _na_over(market, q.support)


def _check_dimensions(model: RobustModel, market: MarketModel):
    if market.n != model.n_outcomes:
        raise ValueError(f"market has {market.n} outcomes, model has {model.n_outcomes}")


# -- martingale measures --------------------------------------------------


def _martingale_constraints(market: MarketModel, pattern: Sequence[int], width: int):
    rows = [([ONE] * len(pattern) + [ZERO] * (width - len(pattern)), Relation.EQ, ONE)]
    for row in market.delta:
        coeffs = [row[w] for w in pattern] + [ZERO] * (width - len(pattern))
        rows.append((coeffs, Relation.EQ, ZERO))
    return rows


def _measure_on(pattern: Sequence[int], masses: Sequence[Fraction], n: int) -> ProbabilityMeasure:
    full = [ZERO] * n
    for w, m in zip(pattern, masses):
        full[w] = m
    return ProbabilityMeasure(tuple(full))


def _max_min_mass(
    market: MarketModel, pattern: OutcomeSet, charged: OutcomeSet
) -> Tuple[Fraction, Optional[ProbabilityMeasure]]:
    """Maximize t with q >= t on `charged` over martingale measures living on `pattern`"""
    outcomes = list(pattern)
    k = len(outcomes)
    constraints = _martingale_constraints(market, outcomes, k + 1)
    for pos, w in enumerate(outcomes):
        if w in charged:
            coeffs = [ZERO] * (k + 1)
            coeffs[pos] = ONE
            coeffs[k] = -ONE
            constraints.append((coeffs, Relation.GE, ZERO))
    objective = [ZERO] * k + [ONE]
    lp = LinearProgram.build(objective, Sense.MAX, constraints, lower=[0] * k + [None], upper=[None] * k + [1])
    outcome = solve(lp)
    if outcome.status != LpStatus.OPTIMAL:
        return ZERO, None
    t = outcome.objective_value
    return t, _measure_on(outcomes, outcome.primal[:k], market.n)


def _feasible_member(market: MarketModel, pattern: OutcomeSet, strict: bool) -> Optional[ProbabilityMeasure]:
    if not pattern:
        return None
    t, q = _max_min_mass(market, pattern, pattern if strict else OutcomeSet.empty(pattern.size))
    if q is None or (strict and t <= 0):
        return None
    return q


def _martingale_extreme(
    market: MarketModel, pattern: OutcomeSet, x: Rv, sense: Sense
) -> Optional[Fraction]:
    outcomes = list(pattern)
    if not outcomes:
        return None
    k = len(outcomes)
    lp = LinearProgram.build(
        [x[w] for w in outcomes], sense, _martingale_constraints(market, outcomes, k), lower=[0] * k
    )
    outcome = solve(lp)
    return outcome.objective_value if outcome.is_optimal else None


def selector_patterns(
    model: RobustModel, selector: MartingaleSetSelector
) -> List[Tuple[OutcomeSet, bool]]:
    """Support patterns of the selector's set with a flag for exact (equivalent) support"""
    kind = selector.kind
    if kind in (SelectorKind.M, SelectorKind.NA_EQUIV):
        return [(model.support_T, False)]
    if kind == SelectorKind.M_EQUIVALENT_TO:
        if not model.contains_measure(selector.reference):
            return []
        return [(support_of(selector.reference), True)]
    strict = kind == SelectorKind.M_EQUIVALENT
    return [(pattern, strict) for pattern in prior_supports(model)]


def martingale_set_element(
    model: RobustModel,
    market: MarketModel,
    selector: MartingaleSetSelector,
    base: Optional[ProbabilityMeasure] = None,
) -> Optional[ProbabilityMeasure]:
    _check_dimensions(model, market)
    if base is not None and not model.contains_measure(base):
        return None
    if selector.kind == SelectorKind.NA_EQUIV:
        if base is None:
            return _feasible_member(market, model.support_T, strict=False)
        # base is in the set iff it is equivalent to some martingale measure
        if _feasible_member(market, support_of(base), strict=True) is not None:
            return base
        return None
    if base is not None and selector.kind in (SelectorKind.M_DOMINATED, SelectorKind.M_EQUIVALENT):
        patterns = [(support_of(base), selector.kind == SelectorKind.M_EQUIVALENT)]
    else:
        patterns = selector_patterns(model, selector)
    for pattern, strict in patterns:
        member = _feasible_member(market, pattern, strict)
        if member is not None:
            return member
    return None


def conjugate_pi_classification(model: RobustModel, market: MarketModel, r: ProbabilityMeasure) -> PiConjugate:
    if not model.contains_measure(r):
        return PiConjugate.INFINITE
    for row in market.delta:
        if sum((m * v for m, v in zip(r.masses, row)), ZERO) != 0:
            return PiConjugate.INFINITE
    return PiConjugate.ZERO


def martingale_polytope_vertices(
    model: RobustModel, market: MarketModel, limit: Optional[int] = None
) -> List[ProbabilityMeasure]:
    """Vertices of the martingale measures supported in T, by basis enumeration"""
    _check_dimensions(model, market)
    limit = limit if limit is not None else get_settings().vertex_limit
    if model.n_outcomes > limit:
        raise VertexLimitExceeded(model.n_outcomes, limit)
    reduced, _ = reduce_redundant_assets(model, market)
    outcomes = list(model.support_T)
    k = len(outcomes)
    augmented = [[ONE] * k + [ONE]]
    for row in reduced.delta:
        augmented.append([row[w] for w in outcomes] + [ZERO])
    echelon, pivots = rref(augmented, k + 1)
    if k in pivots:
        return []
    r = len(pivots)
    system = echelon[:r]
    vertices: List[ProbabilityMeasure] = []
    for columns in itertools.combinations(range(k), r):
        solution = solve_square([[row[c] for c in columns] for row in system], [row[k] for row in system])
        if solution is None or any(v < 0 for v in solution):
            continue
        vertex = _measure_on([outcomes[c] for c in columns], solution, model.n_outcomes)
        if vertex not in vertices:
            vertices.append(vertex)
    vertices.sort(key=lambda q: q.masses)
    return vertices


def reduce_redundant_assets(model: RobustModel, market: MarketModel) -> Tuple[MarketModel, List[int]]:
    """Drop assets whose increments on T are linear combinations of earlier ones"""
    outcomes = list(model.support_T)
    rows = [[row[w] for w in outcomes] for row in market.delta]
    keep = independent_rows(rows, len(outcomes))
    if not keep:
        keep = [0]
    if len(keep) < market.d:
        logger.debug(f"dropping redundant assets, keeping {keep}")
    return market.submarket(keep), keep


def is_submarket(small: MarketModel, big: MarketModel) -> bool:
    assets = set(zip(big.s0, big.s1))
    return small.n == big.n and all(asset in assets for asset in zip(small.s0, small.s1))


def pricing_support(model: RobustModel, market: MarketModel) -> OutcomeSet:
    """Outcomes charged by some martingale measure supported in T"""
    charged = []
    for w in model.support_T:
        t, _ = _max_min_mass(market, model.support_T, OutcomeSet.from_indices([w], model.n_outcomes))
        if t > 0:
            charged.append(w)
    return OutcomeSet.from_indices(charged, model.n_outcomes)


# -- hedging ---------------------------------------------------------------


def _hedging_program(market: MarketModel, outcomes: OutcomeSet, x: Rv, sense: Sense) -> LinearProgram:
    relation = Relation.GE if sense == Sense.MIN else Relation.LE
    constraints = [((ONE,) + market.delta_at(w), relation, x[w]) for w in outcomes]
    return LinearProgram.build([ONE] + [ZERO] * market.d, sense, constraints)


def superhedge(model: RobustModel, market: MarketModel, x: Rv) -> SuperhedgeResult:
    """Least capital r with r + H dS >= X on T, an optimal H and a pricing martingale measure"""
    na = check_NA_geometric(model, market)
    if not na.holds:
        raise ArbitrageError(f"NA fails: strategy {na.strategy.h} is an arbitrage", na.strategy)
    outcome = solve(_hedging_program(market, model.support_T, model.canonical(x), Sense.MIN))
    if outcome.status == LpStatus.UNBOUNDED:
        raise UnboundedPriceError("superhedging price is -inf", outcome.ray)
    price = outcome.primal[0]
    strategy = Strategy(outcome.primal[1:])
    measure = _measure_on(list(model.support_T), outcome.dual, model.n_outcomes)
    logger.debug(f"superhedging price {price} with strategy {strategy.h}")
    return SuperhedgeResult(price, strategy, measure)


def superhedge_Q(model: RobustModel, market: MarketModel, q: QView, x: Rv) -> ExtendedRational:
    _check_dimensions(model, market)
    outcome = solve(_hedging_program(market, q.support, model.canonical(x), Sense.MIN))
    if outcome.status == LpStatus.UNBOUNDED:
        return NEG_INF
    return as_extended(outcome.objective_value)


def superhedge_dual_Q(model: RobustModel, market: MarketModel, q: QView, x: Rv) -> ExtendedRational:
    """sup of E_q[X] over martingale measures carried by supp(Q), -inf when there is none"""
    _check_dimensions(model, market)
    value = _martingale_extreme(market, q.support, model.canonical(x), Sense.MAX)
    return NEG_INF if value is None else as_extended(value)


def subhedge(model: RobustModel, market: MarketModel, x: Rv) -> ExtendedRational:
    _check_dimensions(model, market)
    outcome = solve(_hedging_program(market, model.support_T, model.canonical(x), Sense.MAX))
    if outcome.status == LpStatus.UNBOUNDED:
        return POS_INF
    return as_extended(outcome.objective_value)


def superhedge_dual(
    model: RobustModel, market: MarketModel, x: Rv, selector: MartingaleSetSelector
) -> Fraction:
    """sup of E_q[X] over the selector's martingale set, one LP per support pattern"""
    _check_dimensions(model, market)
    x = model.canonical(x)
    best: Optional[Fraction] = None
    for pattern, strict in selector_patterns(model, selector):
        if strict and _feasible_member(market, pattern, strict=True) is None:
            continue
        value = _martingale_extreme(market, pattern, x, Sense.MAX)
        if value is not None and (best is None or value > best):
            best = value
    if best is None:
        na = check_NA_geometric(model, market)
        if not na.holds:
            raise ArbitrageError("martingale system is infeasible: the market admits arbitrage", na.strategy)
        raise InvalidProblemError(f"the set selected by {selector} is empty for this prior set")
    return best


def martingale_infimum(model: RobustModel, market: MarketModel, x: Rv) -> Optional[Fraction]:
    """min of E_q[X] over martingale measures supported in T"""
    return _martingale_extreme(market, model.support_T, model.canonical(x), Sense.MIN)


def consistent_mixture(model: RobustModel, market: MarketModel) -> ProbabilityMeasure:
    na = check_NA_geometric(model, market)
    if not na.holds:
        raise ArbitrageError(f"NA fails: strategy {na.strategy.h} is an arbitrage", na.strategy)
    mixture = find_dominating_measure(model)
    single = check_NA_under(model, market, model.qview(mixture))
    if not single.holds:
        raise ArbitrageError("NA fails under the mixture", single.strategy)
    return mixture


def _dominating_member(
    market: MarketModel, patterns: Sequence[Tuple[OutcomeSet, bool]], prior: ProbabilityMeasure
) -> Optional[ProbabilityMeasure]:
    target = support_of(prior)
    for pattern, strict in patterns:
        if not target.issubset(pattern):
            continue
        t, q = _max_min_mass(market, pattern, pattern if strict else target)
        if q is not None and t > 0:
            return q
    return None


def ftap_check(
    model: RobustModel,
    market: MarketModel,
    selector: Optional[MartingaleSetSelector] = None,
    workers: Optional[int] = None,
) -> FtapReport:
    """NA holds iff every prior is dominated by a member of the selector's set"""
    selector = selector or MartingaleSetSelector(SelectorKind.M)
    workers = workers if workers is not None else get_settings().workers
    na = check_NA_geometric(model, market)
    patterns = selector_patterns(model, selector)

    def dominate(prior: ProbabilityMeasure) -> Optional[ProbabilityMeasure]:
        return _dominating_member(market, patterns, prior)

    dominating = tuple(ordered_map(dominate, model.priors, workers))

    if selector.kind in (SelectorKind.M, SelectorKind.NA_EQUIV):
        hypotheses = True
    elif selector.kind == SelectorKind.M_EQUIVALENT_TO:
        hypotheses = model.contains_measure(selector.reference) and support_of(selector.reference) == model.support_T
    else:
        hypotheses = model.convex or len(set(model.priors)) == 1
    report = FtapReport(selector, na, dominating, hypotheses)
    if not report.consistent:
        message = (
            f"selector {selector}: NA is {'true' if na.holds else 'false'} but "
            f"{'not ' if not report.all_dominated else ''}every prior is dominated"
        )
        if hypotheses:
            logger.error(f"FTAP defect: {message}")
            report = FtapReport(selector, na, dominating, hypotheses, (message,))
        else:
            logger.warning(f"FTAP hypotheses not met: {message}")
    return report


# -- extensions -----------------------------------------------------------


def extend_market(market: MarketModel, x: Rv, price: RationalLike) -> MarketModel:
    """Add the claim X as an asset traded at `price`, shifted to keep prices non-negative"""
    price = parse_rational(price)
    shift = max(ZERO, -price, -min(x.values))
    return market.with_asset(price + shift, [v + shift for v in x.values])


def arbitrage_free_interval(
    model: RobustModel, market: MarketModel, x: Rv
) -> Tuple[ExtendedRational, ExtendedRational]:
    """(subhedging price, superhedging price) of X"""
    upper = superhedge(model, market, x).price
    return subhedge(model, market, x), as_extended(upper)


@dataclass(frozen=True)
class AtomicTruncationRow:
    grid: int
    min_mass: Fraction
    dominated: bool


def atomic_selector_truncation(grid_sizes: Sequence[int]) -> List[AtomicTruncationRow]:
    """Grid {0, 1/n, ..., 1} with every Dirac prior plus the uniform prior and S1(w) = w, S0 = 1/2

    Reports the best minimal mass of a martingale measure dominating the
    uniform prior. It stays positive at every truncation and shrinks like
    1/(n+1), which is where domination is lost in the diffuse limit.
    """
    rows = []
    for n in grid_sizes:
        size = n + 1
        points = [Fraction(k, n) for k in range(size)]
        priors = [ProbabilityMeasure.dirac(size, k) for k in range(size)]
        uniform = ProbabilityMeasure.uniform(size)
        model = RobustModel(size, tuple(priors + [uniform]))
        market = MarketModel((Fraction(1, 2),), (tuple(points),))
        t, q = _max_min_mass(market, model.support_T, support_of(uniform))
        rows.append(AtomicTruncationRow(n, t, q is not None and t > 0))
    return rows
