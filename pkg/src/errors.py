"""
Exception hierarchy for robust-localization
Input problems also derive from ValueError so callers (and the HTTP layer) can
treat them as bad requests.
"""
from typing import Any, Optional


class RobustLocalizationError(Exception):
    """Base class for every error raised by this package"""


class ScenarioError(RobustLocalizationError, ValueError):
    """Scenario document could not be parsed or validated"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class UnknownNameError(ScenarioError):
    """A scenario block references a name that is not declared"""

    def __init__(self, kind: str, name: str, location: Optional[str] = None):
        self.kind = kind
        self.name = name
        super().__init__(f"unknown {kind} '{name}'", location)


class ConfigurationError(RobustLocalizationError, ValueError):
    """Environment or flag value is malformed"""


class MalformedProgramError(RobustLocalizationError, ValueError):
    """Linear program dimensions or bounds are inconsistent"""


class PivotLimitExceeded(RobustLocalizationError):
    """Simplex stopped after the configured number of pivots"""

    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"pivot limit of {limit} exceeded")


class SearchBudgetExceeded(RobustLocalizationError):
    """Exhaustive search would visit more candidates than allowed"""

    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(f"search needs {needed} candidates, budget is {budget}")


class VertexLimitExceeded(RobustLocalizationError):
    """Vertex enumeration refused because the space is too large"""

    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(f"{size} outcomes exceed the vertex enumeration limit {limit}")


class NotInModelError(RobustLocalizationError, ValueError):
    """Measure charges a polar outcome, so it is not in P_c"""


class NotAnAggregatorError(RobustLocalizationError, ValueError):
    """Random variable does not aggregate the given family"""


class IncoherentFamilyError(RobustLocalizationError):
    """Family admits no aggregator; carries the conflict witness"""

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)


class ArbitrageError(RobustLocalizationError):
    """Market admits an arbitrage; carries the offending strategy"""

    def __init__(self, message: str, strategy: Any = None):
        self.strategy = strategy
        super().__init__(message)


class UnboundedPriceError(RobustLocalizationError):
    """Hedging program is unbounded (price is -inf or +inf)"""

    def __init__(self, message: str, ray: Any = None):
        self.ray = ray
        super().__init__(message)


class InvalidProblemError(RobustLocalizationError, ValueError):
    """Optimization problem violates its preconditions"""
