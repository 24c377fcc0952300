"""
Robust Localization - exact robust-probability computations on finite spaces
"""
from .config import Settings, get_settings, settings_scope
from .core_model import (
    OutcomeSet,
    ProbabilityMeasure,
    QView,
    RobustModel,
    Rv,
    SignedMeasure,
    find_dominating_measure,
    qs_leq,
    total_variation,
    upper_probability,
)
from .errors import (
    ArbitrageError,
    IncoherentFamilyError,
    PivotLimitExceeded,
    RobustLocalizationError,
    ScenarioError,
    UnboundedPriceError,
)
from .lp_solver import LinearProgram, LpOutcome, LpStatus, Relation, Sense, solve, verify_certificates
from .market import (
    MarketModel,
    MartingaleSetSelector,
    SelectorKind,
    Strategy,
    check_NA_geometric,
    ftap_check,
    martingale_polytope_vertices,
    subhedge,
    superhedge,
    superhedge_dual,
    superhedge_Q,
)
from .optimize import LocalizedProblem, bliss_point, solve_localized
from .rationals import NEG_INF, POS_INF, ExtendedRational, parse_rational
from .risk import MaxAffineRiskMeasure, conjugate, localize_dual_D, q_rel_set
from .sensitivity import FiniteRvSet, RvFamily, is_coherent, is_Q_stable, localize_primal_E

__version__ = "0.1.0"
__all__ = [
    # Settings
    "Settings",
    "get_settings",
    "settings_scope",

    # Robust models
    "OutcomeSet",
    "SignedMeasure",
    "ProbabilityMeasure",
    "QView",
    "RobustModel",
    "Rv",
    "find_dominating_measure",
    "qs_leq",
    "total_variation",
    "upper_probability",

    # Exact numbers and LP
    "ExtendedRational",
    "NEG_INF",
    "POS_INF",
    "parse_rational",
    "LinearProgram",
    "LpOutcome",
    "LpStatus",
    "Relation",
    "Sense",
    "solve",
    "verify_certificates",

    # Sensitivity and localization
    "FiniteRvSet",
    "RvFamily",
    "is_coherent",
    "is_Q_stable",
    "localize_primal_E",
    "MaxAffineRiskMeasure",
    "conjugate",
    "localize_dual_D",
    "q_rel_set",

    # Markets
    "MarketModel",
    "MartingaleSetSelector",
    "SelectorKind",
    "Strategy",
    "check_NA_geometric",
    "ftap_check",
    "martingale_polytope_vertices",
    "subhedge",
    "superhedge",
    "superhedge_dual",
    "superhedge_Q",

    # Optimization
    "LocalizedProblem",
    "bliss_point",
    "solve_localized",

    # Errors
    "RobustLocalizationError",
    "ScenarioError",
    "ArbitrageError",
    "IncoherentFamilyError",
    "UnboundedPriceError",
    "PivotLimitExceeded",
]
