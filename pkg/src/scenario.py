"""
Scenario documents
JSON files with named blocks, validated with pydantic and resolved into the
library's value types. Rationals are "p/q" strings or integers.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError, field_validator

from .core_model import ProbabilityMeasure, QView, RobustModel, Rv, find_dominating_measure
from .errors import ScenarioError, UnknownNameError
from .market import MarketModel, MartingaleSetSelector, SelectorKind
from .rationals import parse_rational
from .risk import MaxAffineRiskMeasure
from .sensitivity import RvFamily

logger = logging.getLogger(__name__)

RationalText = Union[StrictInt, StrictStr]
MeasureRef = Union[StrictStr, List[RationalText]]


def _check_rational(value: Any) -> Any:
    if isinstance(value, list):
        return [_check_rational(v) for v in value]
    if isinstance(value, dict):
        return {k: _check_rational(v) for k, v in value.items()}
    parse_rational(value)
    return value


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelBlock(_Block):
    outcomes: List[StrictStr] = Field(..., min_length=1, description="Outcome labels")
    priors: Dict[str, List[RationalText]] = Field(..., description="Named prior mass vectors")
    convex: bool = Field(default=False, description="Read the prior list as its convex hull")

    @field_validator("priors")
    @classmethod
    def _priors(cls, value):
        if not value:
            raise ValueError("at least one prior is required")
        return _check_rational(value)


class ConstraintBlock(_Block):
    measure: MeasureRef
    penalty: RationalText = 0

    @field_validator("penalty")
    @classmethod
    def _penalty(cls, value):
        return _check_rational(value)


class RiskBlock(_Block):
    constraints: List[ConstraintBlock] = Field(..., min_length=1)
    candidates: Optional[List[StrictStr]] = Field(
        default=None, description="Measure names; defaults to the constraint measures plus the prior mixture"
    )
    samples: Optional[List[StrictStr]] = Field(default=None, description="Variable names; defaults to all")


class MarketBlock(_Block):
    s0: List[RationalText] = Field(..., min_length=1)
    s1: List[List[RationalText]] = Field(..., min_length=1)
    claims: Optional[List[StrictStr]] = None
    selectors: List[StrictStr] = Field(default_factory=lambda: ["M"])

    @field_validator("s0", "s1")
    @classmethod
    def _prices(cls, value):
        return _check_rational(value)


class OptimizationBlock(_Block):
    lower: StrictStr
    upper: StrictStr
    targets: Dict[str, StrictStr] = Field(..., min_length=1)
    samples: int = Field(default=1000, ge=0)


class ContinuumBlock(_Block):
    m_grid: List[RationalText] = Field(default_factory=lambda: list(range(1, 11)), min_length=1)
    n_grid: List[int] = Field(default_factory=lambda: list(range(1, 11)), min_length=1)
    d: Tuple[RationalText, RationalText] = ("3/8", "7/16")
    d_prime: Tuple[RationalText, RationalText] = ("5/16", "3/8")

    @field_validator("m_grid", "d", "d_prime")
    @classmethod
    def _rationals(cls, value):
        return _check_rational(list(value))

    @field_validator("n_grid")
    @classmethod
    def _truncations(cls, value):
        if any(n < 1 for n in value):
            raise ValueError("truncations start at 1")
        return value


class Scenario(_Block):
    name: Optional[str] = None
    description: Optional[str] = None
    model: Optional[ModelBlock] = None
    variables: Dict[str, List[RationalText]] = Field(default_factory=dict)
    measures: Dict[str, List[RationalText]] = Field(default_factory=dict)
    risk_measures: Dict[str, RiskBlock] = Field(default_factory=dict)
    markets: Dict[str, MarketBlock] = Field(default_factory=dict)
    families: Dict[str, Dict[str, StrictStr]] = Field(default_factory=dict)
    optimization: Dict[str, OptimizationBlock] = Field(default_factory=dict)
    continuum: Optional[ContinuumBlock] = None

    @field_validator("variables", "measures")
    @classmethod
    def _vectors(cls, value):
        return _check_rational(value)


def _format_validation_error(error: ValidationError) -> Tuple[str, str]:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    message = first["msg"]
    if len(error.errors()) > 1:
        message += f" (and {len(error.errors()) - 1} more)"
    return message, location


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, f"{source}:{e.lineno}:{e.colno}")
    return scenario_from_dict(data, source)


def scenario_from_dict(data: Any, source: str = "<scenario>") -> Scenario:
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        message, location = _format_validation_error(e)
        raise ScenarioError(message, f"{source}:{location}")


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}", str(path))
    return parse_scenario(text, str(path))


# -- resolution ----------------------------------------------------------


@dataclass
class ResolvedRisk:
    rho: MaxAffineRiskMeasure
    candidates: List[Tuple[str, QView]]
    samples: List[Tuple[str, Rv]]


@dataclass
class ResolvedMarket:
    market: MarketModel
    claims: List[Tuple[str, Rv]]
    selectors: List[MartingaleSetSelector]


@dataclass
class ResolvedOptimization:
    lower: Rv
    upper: Rv
    targets: RvFamily
    samples: int


@dataclass
class ResolvedScenario:
    name: str
    model: Optional[RobustModel]
    measures: Dict[str, ProbabilityMeasure] = field(default_factory=dict)
    variables: Dict[str, Rv] = field(default_factory=dict)
    risk_measures: Dict[str, ResolvedRisk] = field(default_factory=dict)
    markets: Dict[str, ResolvedMarket] = field(default_factory=dict)
    families: Dict[str, RvFamily] = field(default_factory=dict)
    optimization: Dict[str, ResolvedOptimization] = field(default_factory=dict)
    continuum: ContinuumBlock = field(default_factory=ContinuumBlock)

    def require_model(self) -> RobustModel:
        if self.model is None:
            raise ScenarioError("scenario has no model block", self.name)
        return self.model

    def measure_name(self, measure: ProbabilityMeasure) -> str:
        for name, known in self.measures.items():
            if known == measure:
                return name
        return str(measure)


def _wrap(location: str, fn, *args):
    try:
        return fn(*args)
    except ScenarioError:
        raise
    except ValueError as e:
        raise ScenarioError(str(e), location)


class _Resolver:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.name = scenario.name or "scenario"

    def run(self) -> ResolvedScenario:
        s = self.scenario
        resolved = ResolvedScenario(self.name, None, continuum=s.continuum or ContinuumBlock())
        if s.model is None:
            needs_model = s.variables or s.measures or s.risk_measures or s.markets or s.families or s.optimization
            if needs_model:
                raise ScenarioError("blocks other than 'continuum' need a 'model' block", self.name)
            return resolved
        n = len(s.model.outcomes)
        priors = []
        for name, masses in s.model.priors.items():
            measure = self._measure(masses, n, f"model.priors.{name}")
            resolved.measures[name] = measure
            priors.append(measure)
        model = _wrap("model", RobustModel, n, tuple(priors), s.model.convex)
        resolved.model = model
        for name, masses in s.measures.items():
            if name in resolved.measures:
                raise ScenarioError(f"measure '{name}' is declared twice", f"measures.{name}")
            resolved.measures[name] = self._measure(masses, n, f"measures.{name}")
        for name, values in s.variables.items():
            if len(values) != n:
                raise ScenarioError(f"expected {n} values, got {len(values)}", f"variables.{name}")
            resolved.variables[name] = model.rv(values)

        for name, block in s.risk_measures.items():
            resolved.risk_measures[name] = self._risk(resolved, name, block)
        for name, block in s.markets.items():
            resolved.markets[name] = self._market(resolved, name, block)
        for name, members in s.families.items():
            pairs = []
            for measure_name, var_name in members.items():
                where = f"families.{name}.{measure_name}"
                pairs.append((self._lookup_measure(resolved, measure_name, where),
                              self._lookup_variable(resolved, var_name, where)))
            resolved.families[name] = _wrap(f"families.{name}", RvFamily.from_pairs, model, pairs)
        for name, block in s.optimization.items():
            where = f"optimization.{name}"
            pairs = [
                (self._lookup_measure(resolved, m, f"{where}.targets.{m}"),
                 self._lookup_variable(resolved, v, f"{where}.targets.{m}"))
                for m, v in block.targets.items()
            ]
            resolved.optimization[name] = ResolvedOptimization(
                lower=self._lookup_variable(resolved, block.lower, f"{where}.lower"),
                upper=self._lookup_variable(resolved, block.upper, f"{where}.upper"),
                targets=_wrap(where, RvFamily.from_pairs, model, pairs),
                samples=block.samples,
            )
        return resolved

    def _measure(self, masses, n: int, where: str) -> ProbabilityMeasure:
        if len(masses) != n:
            raise ScenarioError(f"expected {n} masses, got {len(masses)}", where)
        return _wrap(where, ProbabilityMeasure.of_masses, masses)

    def _lookup_measure(self, resolved: ResolvedScenario, ref: MeasureRef, where: str) -> ProbabilityMeasure:
        if isinstance(ref, list):
            return self._measure(ref, resolved.model.n_outcomes, where)
        if ref not in resolved.measures:
            raise UnknownNameError("measure", ref, where)
        return resolved.measures[ref]

    def _lookup_variable(self, resolved: ResolvedScenario, ref: str, where: str) -> Rv:
        if ref not in resolved.variables:
            raise UnknownNameError("variable", ref, where)
        return resolved.variables[ref]

    def _qview(self, resolved: ResolvedScenario, measure: ProbabilityMeasure, where: str) -> QView:
        return _wrap(where, resolved.model.qview, measure)

    def _risk(self, resolved: ResolvedScenario, name: str, block: RiskBlock) -> ResolvedRisk:
        where = f"risk_measures.{name}"
        pairs = []
        for k, c in enumerate(block.constraints):
            measure = self._lookup_measure(resolved, c.measure, f"{where}.constraints.{k}.measure")
            self._qview(resolved, measure, f"{where}.constraints.{k}.measure")
            pairs.append((measure, parse_rational(c.penalty)))
        rho = MaxAffineRiskMeasure(tuple(pairs))
        if block.candidates is None:
            candidates = []
            for k, (c, (measure, _)) in enumerate(zip(block.constraints, pairs)):
                label = c.measure if isinstance(c.measure, str) else f"R{k + 1}"
                candidates.append((label, self._qview(resolved, measure, where)))
            mixture = find_dominating_measure(resolved.model)
            candidates.append(("mixture", resolved.model.qview(mixture)))
        else:
            candidates = [
                (c, self._qview(resolved, self._lookup_measure(resolved, c, f"{where}.candidates"), f"{where}.candidates"))
                for c in block.candidates
            ]
        names = block.samples if block.samples is not None else list(resolved.variables)
        samples = [(v, self._lookup_variable(resolved, v, f"{where}.samples")) for v in names]
        return ResolvedRisk(rho, candidates, samples)

    def _market(self, resolved: ResolvedScenario, name: str, block: MarketBlock) -> ResolvedMarket:
        where = f"markets.{name}"
        market = _wrap(where, MarketModel, tuple(block.s0), tuple(tuple(r) for r in block.s1))
        if market.n != resolved.model.n_outcomes:
            raise ScenarioError(f"market has {market.n} outcomes, model has {resolved.model.n_outcomes}", where)
        names = block.claims if block.claims is not None else list(resolved.variables)
        claims = [(v, self._lookup_variable(resolved, v, f"{where}.claims")) for v in names]
        selectors = [self._selector(resolved, text, f"{where}.selectors") for text in block.selectors]
        return ResolvedMarket(market, claims, selectors)

    def _selector(self, resolved: ResolvedScenario, text: str, where: str) -> MartingaleSetSelector:
        kind, _, reference = text.partition(":")
        try:
            kind = SelectorKind(kind)
        except ValueError:
            choices = ", ".join(k.value for k in SelectorKind)
            raise ScenarioError(f"unknown selector '{text}' (choose from {choices})", where)
        if kind == SelectorKind.M_EQUIVALENT_TO:
            if not reference:
                raise ScenarioError("M_equivalent_to needs a measure, e.g. 'M_equivalent_to:Q'", where)
            return MartingaleSetSelector.equivalent_to(self._lookup_measure(resolved, reference, where))
        if reference:
            raise ScenarioError(f"selector {kind.value} takes no measure", where)
        return MartingaleSetSelector(kind)


def resolve_scenario(scenario: Scenario) -> ResolvedScenario:
    resolved = _Resolver(scenario).run()
    logger.debug(
        f"resolved scenario {resolved.name}: {len(resolved.variables)} variables, {len(resolved.markets)} markets"
    )
    return resolved
