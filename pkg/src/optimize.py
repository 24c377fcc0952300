"""
Robust optimization by localization
Solve one problem per measure, aggregate the optimizers by patching and
check the aggregate against sampled feasible points.
"""
import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .config import get_settings, ordered_map
from .core_model import QView, RobustModel, Rv, qs_leq
from .errors import IncoherentFamilyError, InvalidProblemError
from .lp_solver import LinearProgram, Relation, Sense, solve
from .risk import MaxAffineRiskMeasure
from .sensitivity import FiniteRvSet, RvFamily, is_coherent

logger = logging.getLogger(__name__)

ZERO = Fraction(0)

# denominators for sampled interval points
SAMPLE_GRID = 64


class LocalObjective(ABC):
    """Objective seen through one measure: depends only on values on supp(Q)"""

    @abstractmethod
    def value(self, q: QView, x: Rv) -> Fraction:
        """Objective value of X under Q"""
        pass

    @abstractmethod
    def minimize_interval(self, model: RobustModel, q: QView, lower: Rv, upper: Rv) -> Rv:
        """A minimizer over [lower, upper]; off supp(Q) it returns lower"""
        pass

    def minimize_finite(self, model: RobustModel, q: QView, members: FiniteRvSet) -> Rv:
        best: Optional[Rv] = None
        best_value: Optional[Fraction] = None
        for x in members:
            value = self.value(q, x)
            if best_value is None or value < best_value:
                best, best_value = x, value
        if best is None:
            raise InvalidProblemError("empty feasible set")
        return best


class QuadraticTarget(LocalObjective):
    """E_Q[(Y - X)^2] for a target Y"""

    def __init__(self, target: Rv):
        self.target = target

    def value(self, q: QView, x: Rv) -> Fraction:
        masses = q.measure.masses
        return sum((masses[i] * (self.target[i] - x[i]) ** 2 for i in q.support), ZERO)

    def minimize_interval(self, model: RobustModel, q: QView, lower: Rv, upper: Rv) -> Rv:
        values = list(lower.values)
        for i in q.support:
            values[i] = min(max(self.target[i], lower[i]), upper[i])
        return model.rv(values)


class MaxAffineObjective(LocalObjective):
    """Localized max-affine objective: constraints living inside supp(Q) only"""

    def __init__(self, rho: MaxAffineRiskMeasure):
        self.rho = rho

    def _surviving(self, q: QView):
        outside = q.support.complement()
        survivors = [(r, a) for r, a in self.rho.constraints if r.of(outside) == 0]
        if not survivors:
            raise InvalidProblemError(f"objective is identically -inf under {q}")
        return survivors

    def value(self, q: QView, x: Rv) -> Fraction:
        return max(r.expectation(x) - a for r, a in self._surviving(q))

    def minimize_interval(self, model: RobustModel, q: QView, lower: Rv, upper: Rv) -> Rv:
        outcomes = list(q.support)
        k = len(outcomes)
        constraints = []
        for r, alpha in self._surviving(q):
            coeffs = [-r.masses[w] for w in outcomes] + [Fraction(1)]
            constraints.append((coeffs, Relation.GE, -alpha))
        lp = LinearProgram.build(
            [ZERO] * k + [Fraction(1)],
            Sense.MIN,
            constraints,
            lower=[lower[w] for w in outcomes] + [None],
            upper=[upper[w] for w in outcomes] + [None],
        )
        outcome = solve(lp)
        values = list(lower.values)
        for pos, w in enumerate(outcomes):
            values[w] = outcome.primal[pos]
        return model.rv(values)


@dataclass(frozen=True)
class LocalizedProblem:
    objectives: Tuple[Tuple[QView, LocalObjective], ...]
    lower: Optional[Rv] = None
    upper: Optional[Rv] = None
    feasible_set: Optional[FiniteRvSet] = None

    def __post_init__(self):
        interval = self.lower is not None and self.upper is not None
        if interval == (self.feasible_set is not None):
            raise InvalidProblemError("give either an order interval or a finite feasible set")
        if not self.objectives:
            raise InvalidProblemError("no objectives")

    @classmethod
    def interval(
        cls, model: RobustModel, objectives: Sequence[Tuple[QView, LocalObjective]], lower: Rv, upper: Rv
    ) -> "LocalizedProblem":
        lower, upper = model.canonical(lower), model.canonical(upper)
        if not qs_leq(model, lower, upper):
            raise InvalidProblemError(f"lower bound {lower} is not below upper bound {upper}")
        return cls(tuple(objectives), lower=lower, upper=upper)

    def objective(self, x: Rv) -> Fraction:
        """Global objective: the largest per-measure value"""
        return max(f.value(q, x) for q, f in self.objectives)

    def is_feasible(self, model: RobustModel, x: Rv) -> bool:
        if self.feasible_set is not None:
            return model.canonical(x) in self.feasible_set
        return qs_leq(model, self.lower, x) and qs_leq(model, x, self.upper)


@dataclass(frozen=True)
class OptimizationReport:
    optimizer: Rv
    objective_value: Fraction
    local_optima: Tuple[Fraction, ...]
    local_values: Tuple[Fraction, ...]
    samples_checked: int
    violations: Tuple[Rv, ...] = ()

    @property
    def verified(self) -> bool:
        return not self.violations and self.local_optima == self.local_values


def _sample_interval(model: RobustModel, lower: Rv, upper: Rv, rng: random.Random) -> Rv:
    values = []
    for i in range(model.n_outcomes):
        width = upper[i] - lower[i]
        values.append(lower[i] + width * Fraction(rng.randint(0, SAMPLE_GRID), SAMPLE_GRID))
    return model.rv(values)


def _perturbations(model: RobustModel, problem: LocalizedProblem, x: Rv) -> List[Rv]:
    out = []
    for i in model.support_T:
        step = (problem.upper[i] - problem.lower[i]) / 16
        for delta in (step, -step):
            values = list(x.values)
            values[i] = min(max(values[i] + delta, problem.lower[i]), problem.upper[i])
            out.append(model.rv(values))
    return out


def solve_localized(
    model: RobustModel,
    problem: LocalizedProblem,
    qset: Optional[Sequence[QView]] = None,
    samples: int = 1000,
    seed: Optional[int] = 0,
    workers: Optional[int] = None,
) -> Tuple[Rv, OptimizationReport]:
    entries = list(problem.objectives)
    if qset is not None:
        wanted = [q.measure for q in qset]
        entries = [(q, f) for q, f in entries if q.measure in wanted]
        if not entries:
            raise InvalidProblemError("none of the requested measures has an objective")
    workers = workers if workers is not None else get_settings().workers

    def local_solve(entry: Tuple[QView, LocalObjective]) -> Rv:
        q, f = entry
        if problem.feasible_set is not None:
            return f.minimize_finite(model, q, problem.feasible_set)
        return f.minimize_interval(model, q, problem.lower, problem.upper)

    local = ordered_map(local_solve, entries, workers)

    family = RvFamily(tuple((q, x) for (q, _), x in zip(entries, local)))
    result = is_coherent(model, family)
    if not result.coherent:
        c = result.conflict
        raise IncoherentFamilyError(
            f"local optimizers {c.first} and {c.second} disagree at w{c.outcome + 1}", c
        )
    optimizer = result.aggregator
    if not problem.is_feasible(model, optimizer):
        raise InvalidProblemError(f"aggregated optimizer {optimizer} is not feasible")

    local_optima = tuple(f.value(q, x) for (q, f), x in zip(entries, local))
    local_values = tuple(f.value(q, optimizer) for q, f in entries)
    best = problem.objective(optimizer)

    if problem.feasible_set is not None:
        candidates = list(problem.feasible_set)
    else:
        rng = random.Random(seed)
        candidates = [_sample_interval(model, problem.lower, problem.upper, rng) for _ in range(samples)]
        candidates.extend(_perturbations(model, problem, optimizer))
    violations = tuple(x for x in candidates if problem.objective(x) < best)
    if violations:
        logger.warning(f"{len(violations)} sampled points beat the aggregated optimizer")
    report = OptimizationReport(optimizer, best, local_optima, local_values, len(candidates), violations)
    return optimizer, report


def bliss_problem(model: RobustModel, lower: Rv, upper: Rv, targets: RvFamily) -> LocalizedProblem:
    coherence = is_coherent(model, targets)
    if not coherence.coherent:
        c = coherence.conflict
        raise IncoherentFamilyError(f"targets {c.first} and {c.second} disagree at w{c.outcome + 1}", c)
    objectives = [(q, QuadraticTarget(y)) for q, y in targets.entries]
    return LocalizedProblem.interval(model, objectives, lower, upper)


def bliss_point(model: RobustModel, lower: Rv, upper: Rv, targets: RvFamily) -> Rv:
    """Clamp each target into [A, B] on its prior's support and patch the results"""
    optimizer, _ = solve_localized(model, bliss_problem(model, lower, upper, targets), samples=0)
    return optimizer
