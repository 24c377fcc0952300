"""
Max-affine risk measures rho(X) = max_i (E_{R_i}[X] - alpha_i)
Conjugates, dual localization, relevance, the relevant-measure filter and
localization bubbles.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .core_model import ProbabilityMeasure, QView, RobustModel, Rv
from .errors import NotInModelError
from .lp_solver import LinearProgram, LpStatus, Relation, Sense, solve
from .rationals import NEG_INF, POS_INF, ExtendedRational, RationalLike, as_extended, parse_rational
from .sensitivity import localize_primal_E

logger = logging.getLogger(__name__)

Constraint = Tuple[ProbabilityMeasure, Fraction]


@dataclass(frozen=True)
class MaxAffineRiskMeasure:
    constraints: Tuple[Constraint, ...]

    def __post_init__(self):
        constraints = tuple((r, parse_rational(alpha)) for r, alpha in self.constraints)
        if not constraints:
            raise ValueError("a risk measure needs at least one constraint")
        n = constraints[0][0].n
        if any(r.n != n for r, _ in constraints):
            raise ValueError("constraint measures live on different sample spaces")
        object.__setattr__(self, "constraints", constraints)

    @classmethod
    def of(cls, pairs: Iterable[Tuple[ProbabilityMeasure, RationalLike]]) -> "MaxAffineRiskMeasure":
        return cls(tuple(pairs))

    @classmethod
    def coherent(cls, measures: Iterable[ProbabilityMeasure]) -> "MaxAffineRiskMeasure":
        return cls(tuple((r, Fraction(0)) for r in measures))

    @classmethod
    def worst_case(cls, model: RobustModel) -> "MaxAffineRiskMeasure":
        return cls.coherent(model.priors)

    @classmethod
    def expectation(cls, q: ProbabilityMeasure) -> "MaxAffineRiskMeasure":
        return cls(((q, Fraction(0)),))

    @property
    def n(self) -> int:
        return self.constraints[0][0].n

    @property
    def is_coherent(self) -> bool:
        return all(alpha == 0 for _, alpha in self.constraints)

    def measures(self) -> List[ProbabilityMeasure]:
        return [r for r, _ in self.constraints]

    def evaluate(self, x: Rv) -> Fraction:
        return max(r.expectation(x) - alpha for r, alpha in self.constraints)

    def check_model(self, model: RobustModel):
        for r, _ in self.constraints:
            if not model.contains_measure(r):
                raise NotInModelError(f"constraint measure {r} is not in P_c of the model")


def evaluate(rho: MaxAffineRiskMeasure, x: Rv) -> Fraction:
    return rho.evaluate(x)


def combine_max(first: MaxAffineRiskMeasure, second: MaxAffineRiskMeasure) -> MaxAffineRiskMeasure:
    """Pointwise maximum: concatenate the constraint lists"""
    return MaxAffineRiskMeasure(first.constraints + second.constraints)


def mix(first: MaxAffineRiskMeasure, second: MaxAffineRiskMeasure, t: RationalLike) -> MaxAffineRiskMeasure:
    """t * first + (1 - t) * second, one constraint per pair"""
    t = parse_rational(t)
    if not 0 <= t <= 1:
        raise ValueError(f"mixture weight {t} outside [0, 1]")
    pairs = []
    for r1, a1 in first.constraints:
        for r2, a2 in second.constraints:
            measure = ProbabilityMeasure.mixture([r1, r2], [t, 1 - t])
            pairs.append((measure, t * a1 + (1 - t) * a2))
    return MaxAffineRiskMeasure(tuple(pairs))


def _simplex_program(
    rho: MaxAffineRiskMeasure,
    objective: Sequence[Fraction],
    sense: Sense,
    extra: Sequence[Tuple[Sequence[Fraction], Relation, Fraction]] = (),
) -> LinearProgram:
    k = len(rho.constraints)
    constraints = [([Fraction(1)] * k, Relation.EQ, Fraction(1))]
    constraints.extend(extra)
    return LinearProgram.build(objective, sense, constraints, lower=[0] * k)


def conjugate(rho: MaxAffineRiskMeasure, r: ProbabilityMeasure) -> ExtendedRational:
    """Penalty of R: min sum(lambda_i alpha_i) over weights representing R, +inf off the hull"""
    extra = [
        ([c.masses[i] for c, _ in rho.constraints], Relation.EQ, r.masses[i]) for i in range(rho.n)
    ]
    outcome = solve(_simplex_program(rho, [a for _, a in rho.constraints], Sense.MIN, extra))
    if outcome.status == LpStatus.INFEASIBLE:
        return POS_INF
    return as_extended(outcome.objective_value)


def dual_value(rho: MaxAffineRiskMeasure, x: Rv) -> Fraction:
    """sup over mixtures R of E_R[X] - penalty(R), solved as an LP"""
    objective = [r.expectation(x) - a for r, a in rho.constraints]
    return solve(_simplex_program(rho, objective, Sense.MAX)).objective_value


def localize_dual_D(rho: MaxAffineRiskMeasure, q: QView, x: Rv) -> ExtendedRational:
    outside = q.support.complement()
    objective = [r.expectation(x) - a for r, a in rho.constraints]
    no_mass_outside = ([r.of(outside) for r, _ in rho.constraints], Relation.EQ, Fraction(0))
    outcome = solve(_simplex_program(rho, objective, Sense.MAX, [no_mass_outside]))
    if outcome.status == LpStatus.INFEASIBLE:
        return NEG_INF
    return as_extended(outcome.objective_value)


def is_relevant(rho: MaxAffineRiskMeasure, q: QView) -> bool:
    """rho^Q_E(0) is finite iff some constraint puts no mass off supp(Q)"""
    outside = q.support.complement()
    return any(r.of(outside) == 0 for r, _ in rho.constraints)


def truncated_limit_value(rho: MaxAffineRiskMeasure, q: QView, x: Rv, m: RationalLike) -> Fraction:
    """rho(X 1_S - m 1_{S^c}) with S = supp(Q); decreases to rho^Q_E(X) as m grows"""
    m = parse_rational(m)
    shifted = Rv(tuple(x[i] if i in q.support else -m for i in range(x.n)))
    return rho.evaluate(shifted)


def q_rel_set(rho: MaxAffineRiskMeasure, candidates: Iterable[QView]) -> List[QView]:
    kept = [q for q in candidates if is_relevant(rho, q)]
    logger.debug(f"{len(kept)} relevant measures kept")
    return kept


def bubble_gap(rho: MaxAffineRiskMeasure, model: RobustModel, q: QView, x: Rv) -> ExtendedRational:
    """rho^Q_E(X) - rho^Q_D(X); two -inf values count as no gap"""
    primal = localize_primal_E(model, rho, q, x)
    dual = localize_dual_D(rho, q, x)
    if primal == NEG_INF and dual == NEG_INF:
        return as_extended(0)
    return primal - dual


@dataclass(frozen=True)
class RiskTableRow:
    q: QView
    relevant: bool
    primal: ExtendedRational
    dual: ExtendedRational
    gap: ExtendedRational


def risk_table(
    rho: MaxAffineRiskMeasure, model: RobustModel, candidates: Iterable[QView], x: Rv
) -> List[RiskTableRow]:
    rows = []
    for q in candidates:
        rows.append(RiskTableRow(
            q=q,
            relevant=is_relevant(rho, q),
            primal=localize_primal_E(model, rho, q, x),
            dual=localize_dual_D(rho, q, x),
            gap=bubble_gap(rho, model, q, x),
        ))
    return rows


def acceptance_sup(rho: MaxAffineRiskMeasure, r: ProbabilityMeasure, xs: Iterable[Rv]) -> Optional[Fraction]:
    """Largest E_R[X] over the acceptable samples (rho(X) <= 0), a lower bound for the penalty"""
    best: Optional[Fraction] = None
    for x in xs:
        if rho.evaluate(x) <= 0:
            value = r.expectation(x)
            if best is None or value > best:
                best = value
    return best
