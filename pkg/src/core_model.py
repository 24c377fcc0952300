"""
Finite robust probability models
Outcome sets, measures, the upper probability of a prior set, polar events,
the quasi-sure order and the projections j_Q.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import NotInModelError
from .rationals import RationalLike, format_rational, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OutcomeSet:
    """Subset of {0, ..., size-1} stored as a bitmask"""

    mask: int
    size: int

    def __post_init__(self):
        if self.size < 0 or self.mask < 0 or self.mask >> self.size:
            raise ValueError(f"mask {self.mask:b} does not fit {self.size} outcomes")

    @classmethod
    def from_indices(cls, indices: Iterable[int], size: int) -> "OutcomeSet":
        mask = 0
        for i in indices:
            if not 0 <= i < size:
                raise ValueError(f"outcome {i} out of range for {size} outcomes")
            mask |= 1 << i
        return cls(mask, size)

    @classmethod
    def full(cls, size: int) -> "OutcomeSet":
        return cls((1 << size) - 1, size)

    @classmethod
    def empty(cls, size: int) -> "OutcomeSet":
        return cls(0, size)

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.size and bool(self.mask >> index & 1)

    def __iter__(self) -> Iterator[int]:
        for i in range(self.size):
            if self.mask >> i & 1:
                yield i

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def _check(self, other: "OutcomeSet"):
        if other.size != self.size:
            raise ValueError("outcome sets live on different sample spaces")

    def complement(self) -> "OutcomeSet":
        return OutcomeSet(((1 << self.size) - 1) & ~self.mask, self.size)

    def union(self, other: "OutcomeSet") -> "OutcomeSet":
        self._check(other)
        return OutcomeSet(self.mask | other.mask, self.size)

    def intersection(self, other: "OutcomeSet") -> "OutcomeSet":
        self._check(other)
        return OutcomeSet(self.mask & other.mask, self.size)

    def difference(self, other: "OutcomeSet") -> "OutcomeSet":
        self._check(other)
        return OutcomeSet(self.mask & ~other.mask, self.size)

    def issubset(self, other: "OutcomeSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def subsets(self) -> Iterator["OutcomeSet"]:
        """All subsets, the empty set first"""
        sub = 0
        while True:
            yield OutcomeSet(sub, self.size)
            if sub == self.mask:
                return
            sub = (sub - self.mask) & self.mask

    def __str__(self) -> str:
        return "{" + ",".join(f"w{i + 1}" for i in self) + "}"


@dataclass(frozen=True)
class SignedMeasure:
    """Exact signed mass vector indexed by outcome"""

    masses: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(parse_rational(m) for m in self.masses))

    @property
    def n(self) -> int:
        return len(self.masses)

    def of(self, outcomes: OutcomeSet) -> Fraction:
        return sum((self.masses[i] for i in outcomes), Fraction(0))

    def support(self) -> OutcomeSet:
        return OutcomeSet.from_indices((i for i, m in enumerate(self.masses) if m != 0), self.n)

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(m) for m in self.masses) + ")"


@dataclass(frozen=True)
class ProbabilityMeasure(SignedMeasure):
    def __post_init__(self):
        super().__post_init__()
        if not self.masses:
            raise ValueError("a probability measure needs at least one outcome")
        if any(m < 0 for m in self.masses):
            raise ValueError(f"negative mass in {self}")
        if sum(self.masses) != 1:
            raise ValueError(f"masses of {self} sum to {format_rational(sum(self.masses))}, not 1")

    @classmethod
    def of_masses(cls, masses: Sequence[RationalLike]) -> "ProbabilityMeasure":
        return cls(tuple(parse_rational(m) for m in masses))

    @classmethod
    def dirac(cls, n: int, index: int) -> "ProbabilityMeasure":
        return cls(tuple(Fraction(1) if i == index else Fraction(0) for i in range(n)))

    @classmethod
    def uniform(cls, n: int, on: Optional[OutcomeSet] = None) -> "ProbabilityMeasure":
        on = on if on is not None else OutcomeSet.full(n)
        if not on:
            raise ValueError("uniform measure on the empty set")
        weight = Fraction(1, len(on))
        return cls(tuple(weight if i in on else Fraction(0) for i in range(n)))

    @classmethod
    def mixture(
        cls, measures: Sequence["ProbabilityMeasure"], weights: Optional[Sequence[Fraction]] = None
    ) -> "ProbabilityMeasure":
        if not measures:
            raise ValueError("mixture of no measures")
        if weights is None:
            weights = [Fraction(1, len(measures))] * len(measures)
        n = measures[0].n
        masses = [Fraction(0)] * n
        for w, mu in zip(weights, measures):
            for i, m in enumerate(mu.masses):
                masses[i] += w * m
        return cls(tuple(masses))

    def expectation(self, values: "Rv") -> Fraction:
        return sum((m * v for m, v in zip(self.masses, values.values) if m), Fraction(0))


@dataclass(frozen=True)
class Rv:
    """Random variable as exact values per outcome (canonical through RobustModel.rv)"""

    values: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(parse_rational(v) for v in self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    def __getitem__(self, index: int) -> Fraction:
        return self.values[index]

    def _zip(self, other: "Rv"):
        if other.n != self.n:
            raise ValueError("random variables live on different sample spaces")
        return zip(self.values, other.values)

    def __add__(self, other: "Rv") -> "Rv":
        return Rv(tuple(a + b for a, b in self._zip(other)))

    def __sub__(self, other: "Rv") -> "Rv":
        return Rv(tuple(a - b for a, b in self._zip(other)))

    def __neg__(self) -> "Rv":
        return Rv(tuple(-a for a in self.values))

    def scale(self, factor: RationalLike) -> "Rv":
        factor = parse_rational(factor)
        return Rv(tuple(factor * a for a in self.values))

    def __mul__(self, factor: RationalLike) -> "Rv":
        return self.scale(factor)

    __rmul__ = __mul__

    def maximum(self, other: "Rv") -> "Rv":
        return Rv(tuple(max(a, b) for a, b in self._zip(other)))

    def minimum(self, other: "Rv") -> "Rv":
        return Rv(tuple(min(a, b) for a, b in self._zip(other)))

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(v) for v in self.values) + ")"


@dataclass(frozen=True)
class RestrictedRv:
    """Values of a random variable on a measure's support"""

    support: OutcomeSet
    values: Tuple[Fraction, ...]

    def as_dict(self):
        return dict(zip(self.support, self.values))


@dataclass(frozen=True)
class QView:
    measure: ProbabilityMeasure
    support: OutcomeSet

    @classmethod
    def of(cls, measure: ProbabilityMeasure) -> "QView":
        return cls(measure, support_of(measure))

    def __str__(self) -> str:
        return str(self.measure)


@dataclass(frozen=True)
class RobustModel:
    """Finite sample space with a finite prior set

    convex=True reads the prior list as its convex hull.
    """

    n_outcomes: int
    priors: Tuple[ProbabilityMeasure, ...]
    convex: bool = False
    polar: OutcomeSet = field(init=False)
    support_T: OutcomeSet = field(init=False)

    def __post_init__(self):
        if self.n_outcomes < 1:
            raise ValueError("a model needs at least one outcome")
        object.__setattr__(self, "priors", tuple(self.priors))
        if not self.priors:
            raise ValueError("a model needs at least one prior")
        for prior in self.priors:
            if prior.n != self.n_outcomes:
                raise ValueError(f"prior {prior} does not have {self.n_outcomes} outcomes")
        charged = OutcomeSet.empty(self.n_outcomes)
        for prior in self.priors:
            charged = charged.union(support_of(prior))
        object.__setattr__(self, "support_T", charged)
        object.__setattr__(self, "polar", charged.complement())

    def rv(self, values: Sequence[RationalLike]) -> Rv:
        """Canonical representative: zero on polar outcomes"""
        if len(values) != self.n_outcomes:
            raise ValueError(f"expected {self.n_outcomes} values, got {len(values)}")
        return Rv(tuple(
            parse_rational(v) if i in self.support_T else Fraction(0) for i, v in enumerate(values)
        ))

    def canonical(self, x: Rv) -> Rv:
        return self.rv(x.values)

    def constant(self, m: RationalLike) -> Rv:
        return self.rv([m] * self.n_outcomes)

    def indicator(self, outcomes: OutcomeSet) -> Rv:
        return self.rv([1 if i in outcomes else 0 for i in range(self.n_outcomes)])

    def full(self) -> OutcomeSet:
        return OutcomeSet.full(self.n_outcomes)

    def qview(self, measure: ProbabilityMeasure) -> QView:
        if measure.n != self.n_outcomes:
            raise NotInModelError(f"{measure} does not have {self.n_outcomes} outcomes")
        view = QView.of(measure)
        if not view.support.issubset(self.support_T):
            raise NotInModelError(f"{measure} charges polar outcomes {view.support.difference(self.support_T)}")
        return view

    def contains_measure(self, measure: ProbabilityMeasure) -> bool:
        return measure.n == self.n_outcomes and support_of(measure).issubset(self.support_T)


def total_variation(mu: SignedMeasure, outcomes: OutcomeSet) -> Fraction:
    return sum((abs(mu.masses[i]) for i in outcomes), Fraction(0))


def total_variation_bruteforce(mu: SignedMeasure, outcomes: OutcomeSet) -> Fraction:
    """sup over B subset of A of mu(B) - mu(A minus B)"""
    total = mu.of(outcomes)
    return max(2 * mu.of(b) - total for b in outcomes.subsets())


def upper_probability(model: RobustModel, outcomes: OutcomeSet) -> Fraction:
    return max(prior.of(outcomes) for prior in model.priors)


def is_polar(model: RobustModel, outcomes: OutcomeSet) -> bool:
    return upper_probability(model, outcomes) == 0


def qs_leq(model: RobustModel, x: Rv, y: Rv) -> bool:
    return all(x[i] <= y[i] for i in model.support_T)


def qs_equal(model: RobustModel, x: Rv, y: Rv) -> bool:
    return all(x[i] == y[i] for i in model.support_T)


def project_jQ(model: RobustModel, x: Rv, q: QView) -> RestrictedRv:
    if not q.support.issubset(model.support_T):
        raise NotInModelError(f"{q.measure} charges polar outcomes")
    return RestrictedRv(q.support, tuple(x[i] for i in q.support))


def support_of(measure: SignedMeasure) -> OutcomeSet:
    return measure.support()


def union_support(measures: Iterable[SignedMeasure]) -> OutcomeSet:
    measures = list(measures)
    if not measures:
        raise ValueError("empty measure set")
    result = OutcomeSet.empty(measures[0].n)
    for mu in measures:
        result = result.union(support_of(mu))
    return result


def dominates(g: Sequence[SignedMeasure], i: Sequence[SignedMeasure]) -> bool:
    """True iff every I-null set is G-null, i.e. the set I dominates G"""
    return union_support(g).issubset(union_support(i))


def find_dominating_measure(model: RobustModel) -> ProbabilityMeasure:
    dominating = ProbabilityMeasure.mixture(list(model.priors))
    logger.info(
        f"Finite prior set of size {len(model.priors)} is dominated by the uniform mixture {dominating}"
    )
    return dominating


def prior_supports(model: RobustModel) -> List[OutcomeSet]:
    """Distinct supports available to the prior set (unions of supports when convex)"""
    base: List[OutcomeSet] = []
    for prior in model.priors:
        s = support_of(prior)
        if s not in base:
            base.append(s)
    if not model.convex:
        return base
    found = list(base)
    frontier = list(base)
    while frontier:
        new = []
        for s in frontier:
            for b in base:
                u = s.union(b)
                if u not in found:
                    found.append(u)
                    new.append(u)
        frontier = new
    return found
