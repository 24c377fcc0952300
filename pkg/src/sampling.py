"""
Seeded random instances for the self-test and the property suites
Numerators and denominators stay small; vertex enumeration is capped by the
number of square systems it would solve.
"""
import math
import random
from fractions import Fraction
from typing import List, Optional, Sequence

from .continuum import PiecewiseRationalFunction
from .core_model import ProbabilityMeasure, RobustModel, Rv
from .lp_solver import LinearProgram, Relation, Sense
from .market import MarketModel
from .risk import MaxAffineRiskMeasure

ZERO = Fraction(0)
VERTEX_COMPARE_LIMIT = 1000


def rational(rng: random.Random, bound: int = 5, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, max_den))


def probability(rng: random.Random, n: int, support: Optional[Sequence[int]] = None) -> ProbabilityMeasure:
    """Random measure charging every outcome of `support` (default: a random non-empty subset)"""
    if support is None:
        support = [i for i in range(n) if rng.random() < 0.6] or [rng.randrange(n)]
    weights = [0] * n
    for i in support:
        weights[i] = rng.randint(1, 4)
    total = sum(weights)
    return ProbabilityMeasure(tuple(Fraction(w, total) for w in weights))


def robust_model(rng: random.Random, n: int, priors: int, convex: bool = False, full: bool = False) -> RobustModel:
    measures = [probability(rng, n) for _ in range(priors)]
    if full:
        measures.append(probability(rng, n, range(n)))
    return RobustModel(n, tuple(measures), convex)


def rv(rng: random.Random, model: RobustModel, bound: int = 5) -> Rv:
    return model.rv([rational(rng, bound) for _ in range(model.n_outcomes)])


def measure_in_model(rng: random.Random, model: RobustModel) -> ProbabilityMeasure:
    support = list(model.support_T)
    chosen = [w for w in support if rng.random() < 0.6] or [rng.choice(support)]
    return probability(rng, model.n_outcomes, chosen)


def risk_measure(rng: random.Random, model: RobustModel, constraints: int) -> MaxAffineRiskMeasure:
    """Max-affine risk measure whose constraint measures live in the model"""
    return MaxAffineRiskMeasure(tuple(
        (measure_in_model(rng, model), Fraction(rng.randint(0, 4), rng.randint(1, 3)))
        for _ in range(constraints)
    ))


def na_market(rng: random.Random, n: int, d: int) -> MarketModel:
    """Prices built around a strictly positive martingale measure, so NA holds on any T"""
    q = probability(rng, n, range(n))
    s0, s1 = [], []
    for _ in range(d):
        base = Fraction(rng.randint(8, 12))
        moves = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
        drift = sum((m * v for m, v in zip(q.masses, moves)), Fraction(0))
        s0.append(base)
        s1.append(tuple(base + v - drift for v in moves))
    return MarketModel(tuple(s0), tuple(s1))


def arbitrage_market(rng: random.Random, n: int, d: int) -> MarketModel:
    """First asset rises in every state; the others are arbitrary"""
    s0 = [Fraction(rng.randint(1, 5))]
    s1 = [tuple(s0[0] + rng.randint(1, 3) for _ in range(n))]
    for _ in range(d - 1):
        s0.append(Fraction(rng.randint(1, 5)))
        s1.append(tuple(Fraction(rng.randint(0, 8)) for _ in range(n)))
    return MarketModel(tuple(s0), tuple(s1))


def linear_program(
    rng: random.Random, n_vars: int, n_rows: int, bounded: bool = False, bound: int = 10, max_den: int = 10
) -> LinearProgram:
    """Random program with rational data, numerators and denominators up to the given bounds"""
    constraints = []
    for _ in range(n_rows):
        coeffs = [rational(rng, bound, max_den) for _ in range(n_vars)]
        constraints.append((coeffs, rng.choice(list(Relation)), rational(rng, bound, max_den)))
    lower: List[Optional[Fraction]] = []
    upper: List[Optional[Fraction]] = []
    for _ in range(n_vars):
        if bounded:
            lo = rational(rng, bound, max_den)
            lower.append(lo)
            upper.append(lo + Fraction(rng.randint(1, bound), rng.randint(1, max_den)))
        else:
            lo = rng.choice([ZERO, ZERO, rational(rng, bound, max_den), None])
            width = Fraction(rng.randint(1, bound), rng.randint(1, max_den))
            lower.append(lo)
            upper.append(rng.choice([None, None, (lo if lo is not None else ZERO) + width]))
    objective = [rational(rng, bound, max_den) for _ in range(n_vars)]
    return LinearProgram.build(objective, rng.choice(list(Sense)), constraints, lower, upper)


def vertex_comparable(lp: LinearProgram, limit: int = VERTEX_COMPARE_LIMIT) -> bool:
    """Whether brute-force vertex enumeration stays within `limit` square solves"""
    return math.comb(len(lp.canonical_rows()), lp.n_vars) <= limit


# Beale's and Chvatal's examples; both cycle under the largest-coefficient rule
CYCLING_PROGRAMS = (
    LinearProgram.build(
        [Fraction(-3, 4), 150, Fraction(-1, 50), 6],
        Sense.MIN,
        [
            ([Fraction(1, 4), -60, Fraction(-1, 25), 9], Relation.LE, 0),
            ([Fraction(1, 2), -90, Fraction(-1, 50), 3], Relation.LE, 0),
            ([0, 0, 1, 0], Relation.LE, 1),
        ],
        lower=[0, 0, 0, 0],
    ),
    LinearProgram.build(
        [-10, 57, 9, 24],
        Sense.MIN,
        [
            ([Fraction(1, 2), Fraction(-11, 2), Fraction(-5, 2), 9], Relation.LE, 0),
            ([Fraction(1, 2), Fraction(-3, 2), Fraction(-1, 2), 1], Relation.LE, 0),
            ([1, 0, 0, 0], Relation.LE, 1),
        ],
        lower=[0, 0, 0, 0],
    ),
)


def step_function(
    rng: random.Random, pieces: int = 4, bound: int = 4, nonnegative: bool = False
) -> PiecewiseRationalFunction:
    """Random step function on (0, 1) with `pieces` equal cells"""
    f = PiecewiseRationalFunction.constant(0)
    for k in range(pieces):
        height = rational(rng, bound)
        cell = PiecewiseRationalFunction.indicator(Fraction(k, pieces), Fraction(k + 1, pieces))
        f = f + cell.scale(abs(height) if nonnegative else height)
    return f
