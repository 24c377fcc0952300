"""
Sensitivity, reduction sets, coherent families and aggregators, and the
primal localization f^Q_E of max-affine functions
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

from .config import get_settings
from .core_model import (
    OutcomeSet,
    ProbabilityMeasure,
    QView,
    RobustModel,
    Rv,
)
from .errors import NotAnAggregatorError, NotInModelError, SearchBudgetExceeded
from .rationals import ExtendedRational, as_extended, extended_max

if TYPE_CHECKING:
    from .risk import MaxAffineRiskMeasure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RvFamily:
    """Random variables indexed by measures, in declaration order"""

    entries: Tuple[Tuple[QView, Rv], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def from_pairs(cls, model: RobustModel, pairs: Iterable[Tuple[ProbabilityMeasure, Rv]]) -> "RvFamily":
        return cls(tuple((model.qview(q), model.canonical(x)) for q, x in pairs))

    @classmethod
    def projecting(cls, model: RobustModel, x: Rv, measures: Iterable[ProbabilityMeasure]) -> "RvFamily":
        return cls.from_pairs(model, ((q, x) for q in measures))

    def __len__(self) -> int:
        return len(self.entries)

    def views(self) -> List[QView]:
        return [q for q, _ in self.entries]


@dataclass(frozen=True)
class FiniteRvSet:
    members: Tuple[Rv, ...]

    @classmethod
    def of(cls, model: RobustModel, members: Iterable[Rv]) -> "FiniteRvSet":
        seen: List[Rv] = []
        for x in members:
            x = model.canonical(x)
            if x not in seen:
                seen.append(x)
        return cls(tuple(seen))

    def __contains__(self, x: Rv) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def intersection(self, other: "FiniteRvSet") -> "FiniteRvSet":
        return FiniteRvSet(tuple(x for x in self.members if x in other.members))


@dataclass(frozen=True)
class CoherenceConflict:
    first: int
    second: int
    outcome: int


@dataclass(frozen=True)
class CoherenceResult:
    aggregator: Optional[Rv]
    conflict: Optional[CoherenceConflict] = None

    @property
    def coherent(self) -> bool:
        return self.aggregator is not None


class AggregatorKind(str, Enum):
    TRIVIAL = "trivial"
    NON_TRIVIAL = "non-trivial"


@dataclass(frozen=True)
class AggregatorClass:
    kind: AggregatorKind
    index: Optional[int] = None


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    witness: Optional[Rv] = None
    selection: Optional[Tuple[Rv, ...]] = None
    selections_checked: int = 0


@dataclass(frozen=True)
class LocalizationRow:
    x: Rv
    value: ExtendedRational
    localized_sup: ExtendedRational

    @property
    def holds(self) -> bool:
        return self.value == self.localized_sup


@dataclass(frozen=True)
class LocalizationReport:
    rows: Tuple[LocalizationRow, ...]

    @property
    def violations(self) -> List[LocalizationRow]:
        return [row for row in self.rows if not row.holds]

    @property
    def holds(self) -> bool:
        return not self.violations


def _require_in_model(model: RobustModel, q: QView):
    if not q.support.issubset(model.support_T):
        raise NotInModelError(f"{q.measure} charges polar outcomes")


def jQ_member(model: RobustModel, x: Rv, c: FiniteRvSet, q: QView) -> bool:
    _require_in_model(model, q)
    return any(all(y[i] == x[i] for i in q.support) for y in c)


def is_coherent(model: RobustModel, family: RvFamily) -> CoherenceResult:
    """Patch values outcome by outcome; outcomes no support covers take the first entry's value"""
    if not family.entries:
        raise ValueError("coherence of an empty family")
    n = model.n_outcomes
    values: List[Optional[Fraction]] = [None] * n
    owner: List[Optional[int]] = [None] * n
    for index, (q, x) in enumerate(family.entries):
        _require_in_model(model, q)
        for i in q.support:
            if values[i] is None:
                values[i], owner[i] = x[i], index
            elif values[i] != x[i]:
                conflict = CoherenceConflict(owner[i], index, i)
                logger.debug(f"family incoherent: entries {owner[i]} and {index} disagree at w{i + 1}")
                return CoherenceResult(None, conflict)
    first = family.entries[0][1]
    patched = [first[i] if v is None else v for i, v in enumerate(values)]
    return CoherenceResult(model.rv(patched))


def is_aggregator(model: RobustModel, family: RvFamily, x: Rv) -> bool:
    return all(all(x[i] == y[i] for i in q.support) for q, y in family.entries)


def classify_aggregator(model: RobustModel, family: RvFamily, x: Rv) -> AggregatorClass:
    x = model.canonical(x)
    if not is_aggregator(model, family, x):
        raise NotAnAggregatorError(f"{x} does not aggregate the family")
    for index, (_, y) in enumerate(family.entries):
        if model.canonical(y) == x:
            return AggregatorClass(AggregatorKind.TRIVIAL, index)
    return AggregatorClass(AggregatorKind.NON_TRIVIAL)


def candidate_grid(model: RobustModel, c: FiniteRvSet) -> FiniteRvSet:
    """All patchworks of member values over T"""
    choices = []
    for i in range(model.n_outcomes):
        if i in model.support_T:
            column = sorted({x[i] for x in c})
        else:
            column = [Fraction(0)]
        choices.append(column)
    return FiniteRvSet(tuple(Rv(tuple(values)) for values in itertools.product(*choices)))


def _aggregators_in_grid(model: RobustModel, c: FiniteRvSet, qset: Sequence[QView], selection: Sequence[Rv]):
    forced: Dict[int, Fraction] = {}
    for q, y in zip(qset, selection):
        for i in q.support:
            forced[i] = y[i]
    choices = []
    for i in range(model.n_outcomes):
        if i in forced:
            choices.append([forced[i]])
        elif i in model.support_T:
            choices.append(sorted({x[i] for x in c}))
        else:
            choices.append([Fraction(0)])
    for values in itertools.product(*choices):
        yield Rv(tuple(values))


def is_Q_stable(
    model: RobustModel,
    c: FiniteRvSet,
    qset: Sequence[QView],
    budget: Optional[int] = None,
) -> StabilityReport:
    """Exhaustive check that every coherent selection from C aggregates inside C

    The search visits |C|^|Qset| selections; above the budget it refuses.
    """
    budget = budget if budget is not None else get_settings().search_budget
    if not c.members:
        return StabilityReport(True)
    for q in qset:
        _require_in_model(model, q)
    needed = len(c) ** len(qset)
    if needed > budget:
        raise SearchBudgetExceeded(needed, budget)
    checked = 0
    for selection in itertools.product(c.members, repeat=len(qset)):
        checked += 1
        family = RvFamily(tuple(zip(qset, selection)))
        if qset and not is_coherent(model, family).coherent:
            continue
        for aggregator in _aggregators_in_grid(model, c, qset, selection):
            if aggregator not in c:
                logger.info(f"not stable: aggregator {aggregator} of a coherent selection lies outside C")
                return StabilityReport(False, aggregator, tuple(selection), checked)
    return StabilityReport(True, selections_checked=checked)


def is_reduction_set(
    model: RobustModel, c: FiniteRvSet, qset: Sequence[QView], universe: Iterable[Rv]
) -> Tuple[bool, Optional[Rv]]:
    """X in C iff j_Q(X) in j_Q(C) for all Q, checked over a finite universe"""
    for x in universe:
        x = model.canonical(x)
        projected = all(jQ_member(model, x, c, q) for q in qset)
        if projected != (x in c):
            return False, x
    return True, None


def localize_primal_E(model: RobustModel, f: "MaxAffineRiskMeasure", q: QView, x: Rv) -> ExtendedRational:
    """inf f(Y) over Y agreeing with X on supp(Q)

    Constraints charging the complement of supp(Q) are driven to -inf.
    """
    _require_in_model(model, q)
    outside = q.support.complement()
    return extended_max(
        r.expectation(x) - alpha for r, alpha in f.constraints if r.of(outside) == 0
    )


def sup_localized(
    model: RobustModel, f: "MaxAffineRiskMeasure", qset: Sequence[QView], x: Rv
) -> ExtendedRational:
    return extended_max(localize_primal_E(model, f, q, x) for q in qset)


def localization_identity_check(
    model: RobustModel, f: "MaxAffineRiskMeasure", qset: Sequence[QView], sample_xs: Iterable[Rv]
) -> LocalizationReport:
    if not qset:
        raise ValueError("localization check needs at least one measure")
    rows = []
    for x in sample_xs:
        x = model.canonical(x)
        rows.append(LocalizationRow(x, as_extended(f.evaluate(x)), sup_localized(model, f, qset, x)))
    report = LocalizationReport(tuple(rows))
    if not report.holds:
        logger.info(f"localization identity fails on {len(report.violations)} of {len(rows)} samples")
    return report


@dataclass(frozen=True)
class DiracFamilyExample:
    model: RobustModel
    qset: Tuple[QView, ...]
    c: FiniteRvSet
    family: RvFamily
    aggregator: Rv


def dirac_family_example(n: int) -> DiracFamilyExample:
    """All Dirac priors on n outcomes with C = {1_{B^Q}} and B^Q the atom of Q

    The family (1_{B^Q})_Q is coherent and its aggregator 1 is not in C.
    """
    if n < 2:
        raise ValueError("the construction needs at least two outcomes")
    diracs = tuple(ProbabilityMeasure.dirac(n, i) for i in range(n))
    model = RobustModel(n, diracs)
    qset = tuple(model.qview(d) for d in diracs)
    indicators = [model.indicator(OutcomeSet.from_indices([i], n)) for i in range(n)]
    c = FiniteRvSet.of(model, indicators)
    family = RvFamily(tuple(zip(qset, indicators)))
    return DiracFamilyExample(model, qset, c, family, model.constant(1))
