"""
Acceptance suite behind `robloc selftest`
Each criterion draws its own seeded instances and reports PASS/FAIL with a
deterministic one-line detail.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from . import sampling
from .continuum import (
    PiecewiseRationalFunction,
    bubble_table,
    example2_closed_form,
    example2_report,
    example_y,
    expect,
    p_n,
    rho_truncated,
)
from .core_model import ProbabilityMeasure, RobustModel, Rv, find_dominating_measure
from .lp_solver import LpStatus, solve, verify_certificates, vertex_optimum
from .market import (
    MartingaleSetSelector,
    SelectorKind,
    check_NA_geometric,
    check_NA_under,
    ftap_check,
    martingale_polytope_vertices,
    superhedge,
    superhedge_dual,
    superhedge_dual_Q,
    superhedge_Q,
)
from .optimize import bliss_problem, solve_localized
from .rationals import ExtendedRational, as_extended
from .risk import MaxAffineRiskMeasure, bubble_gap, q_rel_set
from .sensitivity import RvFamily, localization_identity_check, localize_primal_E, sup_localized

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SelftestSizes:
    markets: int = 200
    arbitrage_markets: int = 50
    risk_measures: int = 100
    samples_per_measure: int = 20
    bubble_triples: int = 500
    property_samples: int = 500
    programs: int = 1000
    bliss_instances: int = 20
    bliss_points: int = 10000

    @classmethod
    def quick(cls) -> "SelftestSizes":
        return cls(20, 10, 10, 5, 40, 40, 60, 3, 300)


def _rng(seed: int, criterion: int) -> random.Random:
    return random.Random(f"{seed}:{criterion}")


def _verdict(failures: List[str], summary: str) -> Dict:
    if failures:
        return {"passed": False, "detail": f"{summary}; first failure: {failures[0]} ({len(failures)} total)"}
    return {"passed": True, "detail": summary}


def _scaled(value: ExtendedRational, factor: Fraction) -> ExtendedRational:
    return value if not value.is_finite else as_extended(value.to_fraction() * factor)


# -- criteria ---------------------------------------------------------------


def _expectations_of_y(seed: int, sizes: SelftestSizes) -> Dict:
    y = example_y()
    failures = [f"n={n}" for n in range(1, 101) if expect(p_n(n), y) != Fraction(-2, n * (n + 1))]
    return _verdict(failures, "E_{P_n}[Y] = -2/(n(n+1)) for n = 1..100")


def _bubble_table(seed: int, sizes: SelftestSizes) -> Dict:
    zero = PiecewiseRationalFunction.constant(0)
    grid = range(1, 11)
    failures = [f"g({r.m}, {r.n_max})" for r in bubble_table(zero, grid, grid) if r.value != -r.m / r.n_max]
    far = bubble_table(zero, [5], [500])[0].value
    if far < Fraction(-1, 100):
        failures.append(f"g(5, 500) = {far}")
    steep = bubble_table(zero, [100], [5])[0].value
    if steep > -20:
        failures.append(f"g(100, 5) = {steep}")
    return _verdict(failures, f"10x10 grid exact, g(5, 500) = {far}, g(100, 5) = {steep}")


def _kappa_truncation(seed: int, sizes: SelftestSizes) -> Dict:
    report = example2_report(range(1, 11), list(range(1, 11)) + [100])
    failures = []
    if report.kappa_dual != -HALF:
        failures.append(f"kappa^Q_D(W) = {report.kappa_dual}")
    for row in report.rows:
        if not -(row.m + 1) / row.n_max <= row.kappa <= 0 or row.kappa != row.closed_form:
            failures.append(f"kappa({row.m}, {row.n_max}) = {row.kappa}")
    far = example2_report([10], [1000]).rows[0]
    if abs(far.gap - HALF) > Fraction(1, 50) or far.kappa != example2_closed_form(10, 1000):
        failures.append(f"gap at (10, 1000) = {far.gap}")
    return _verdict(failures, f"kappa^Q_D(W) = {report.kappa_dual}, gap at (10, 1000) = {float(far.gap):.6f}")


def _na_corpus(rng: random.Random, count: int):
    for _ in range(count):
        n = rng.randint(2, 6)
        d = rng.randint(1, 3)
        model = sampling.robust_model(rng, n, rng.randint(0, 2), full=True)
        yield model, sampling.na_market(rng, n, d)


def _superhedging_duality(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 4)
    failures = []
    selector = MartingaleSetSelector(SelectorKind.M)
    for k, (model, market) in enumerate(_na_corpus(rng, sizes.markets)):
        x = sampling.rv(rng, model)
        primal = superhedge(model, market, x).price
        dual = superhedge_dual(model, market, x, selector)
        vertices = martingale_polytope_vertices(model, market)
        best = max(v.expectation(x) for v in vertices)
        if not primal == dual == best:
            failures.append(f"market {k}: {primal}, {dual}, {best}")
    return _verdict(failures, f"{sizes.markets} NA markets, primal = dual = vertex maximum")


def _ftap_equivalence(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 5)
    corpus = list(_na_corpus(rng, sizes.markets))
    for _ in range(sizes.arbitrage_markets):
        n = rng.randint(2, 6)
        corpus.append((sampling.robust_model(rng, n, rng.randint(1, 3)), sampling.arbitrage_market(rng, n, rng.randint(1, 3))))
    for _ in range(sizes.arbitrage_markets):
        n = rng.randint(2, 6)
        corpus.append((sampling.robust_model(rng, n, rng.randint(1, 3)), sampling.na_market(rng, n, rng.randint(1, 3))))
    failures = []
    arbitrage = 0
    for k, (model, market) in enumerate(corpus):
        na = check_NA_geometric(model, market).holds
        arbitrage += not na
        if ftap_check(model, market).all_dominated != na:
            failures.append(f"instance {k}, selector M")
        convex = RobustModel(model.n_outcomes, model.priors, convex=True)
        for kind in (SelectorKind.M_DOMINATED, SelectorKind.M_EQUIVALENT):
            report = ftap_check(convex, market, MartingaleSetSelector(kind))
            if report.all_dominated != na or report.defects:
                failures.append(f"instance {k}, selector {kind.value}")
    return _verdict(failures, f"{len(corpus)} markets ({arbitrage} with arbitrage), 3 selectors agree with NA")


def _risk_instance(rng: random.Random):
    model = sampling.robust_model(rng, rng.randint(2, 5), rng.randint(1, 3))
    return model, sampling.risk_measure(rng, model, rng.randint(1, 4))


def _localization_identity(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 6)
    failures = []
    for k in range(sizes.risk_measures):
        model, rho = _risk_instance(rng)
        candidates = rho.measures() + [find_dominating_measure(model)]
        qset = q_rel_set(rho, [model.qview(q) for q in candidates])
        xs = [sampling.rv(rng, model) for _ in range(sizes.samples_per_measure)]
        if not localization_identity_check(model, rho, qset, xs).holds:
            failures.append(f"instance {k}")
    return _verdict(failures, f"{sizes.risk_measures} risk measures x {sizes.samples_per_measure} samples")


def _no_finite_bubble(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 7)
    zero = as_extended(0)
    failures = []
    for k in range(sizes.bubble_triples):
        model, rho = _risk_instance(rng)
        q = model.qview(sampling.measure_in_model(rng, model))
        if bubble_gap(rho, model, q, sampling.rv(rng, model)) != zero:
            failures.append(f"triple {k}")
    return _verdict(failures, f"{sizes.bubble_triples} (rho, Q, X) triples without a gap")


def _coherence_failures(rho: Callable[[object], object], x, y, up, c, lam) -> List[str]:
    found = []
    if rho(up) < rho(x):
        found.append("monotone")
    if rho(x + c[0]) != rho(x) + c[1]:
        found.append("cash-additive")
    if rho(x.scale(lam)) != rho(x) * lam:
        found.append("homogeneous")
    if rho(x + y) > rho(x) + rho(y):
        found.append("subadditive")
    return found


def _property_suites(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 8)
    failures: List[str] = []
    strict_chains = 0
    for k in range(sizes.property_samples):
        model, rho = _risk_instance(rng)
        coherent = MaxAffineRiskMeasure.coherent(rho.measures())
        x, y = sampling.rv(rng, model), sampling.rv(rng, model)
        up = x + model.rv([abs(sampling.rational(rng)) for _ in range(model.n_outcomes)])
        c = sampling.rational(rng)
        lam = Fraction(rng.randint(1, 5), rng.randint(1, 3))
        cash = (model.constant(c), c)
        failures.extend(f"evaluate {p} #{k}" for p in _coherence_failures(coherent.evaluate, x, y, up, cash, lam))

        # localizations keep the axioms of the function they localize
        q = model.qview(sampling.measure_in_model(rng, model))

        def local(z: Rv, f: MaxAffineRiskMeasure = rho) -> ExtendedRational:
            return localize_primal_E(model, f, q, z)

        if local(up) < local(x):
            failures.append(f"f^Q_E monotone #{k}")
        if local(x + model.constant(c)) != local(x) + as_extended(c):
            failures.append(f"f^Q_E cash-additive #{k}")
        if local(x.scale(lam), coherent) != _scaled(local(x, coherent), lam):
            failures.append(f"f^Q_E homogeneous #{k}")
        if local(x + y, coherent) > local(x, coherent) + local(y, coherent):
            failures.append(f"f^Q_E subadditive #{k}")

        if local(x) > as_extended(rho.evaluate(x)):
            failures.append(f"f^Q_E <= f #{k}")
        views = [model.qview(sampling.measure_in_model(rng, model)) for _ in range(3)]
        if sup_localized(model, rho, views[:1], x) > sup_localized(model, rho, views, x):
            failures.append(f"enlarged Qset #{k}")

        n_max = rng.randint(1, 6)
        f, g = sampling.step_function(rng), sampling.step_function(rng)
        bump = sampling.step_function(rng, nonnegative=True)

        def truncated(h: PiecewiseRationalFunction) -> Fraction:
            return rho_truncated(h, n_max)

        shift = (PiecewiseRationalFunction.constant(c), c)
        failures.extend(
            f"rho_N {p} #{k}"
            for p in _coherence_failures(truncated, f, g, f + bump, shift, lam)
        )

        market_model = sampling.robust_model(rng, model.n_outcomes, rng.randint(0, 2), full=True)
        market = sampling.na_market(rng, model.n_outcomes, rng.randint(1, 2))
        claim = sampling.rv(rng, market_model)
        price = as_extended(superhedge(market_model, market, claim).price)
        views = [(market_model.qview(sampling.measure_in_model(rng, market_model)), False)]
        moving = [w for w in range(market.n) if any(dv != 0 for dv in market.delta_at(w))]
        if moving:
            # one moving outcome: NA(Q,S) fails and no martingale measure lives there
            views.append((market_model.qview(ProbabilityMeasure.dirac(market.n, rng.choice(moving))), True))
        for view, broken in views:
            dual_q = superhedge_dual_Q(market_model, market, view, claim)
            price_q = superhedge_Q(market_model, market, view, claim)
            if not dual_q == price_q <= price:
                failures.append(f"pricing chain #{k}: {dual_q} <= {price_q} <= {price}")
            if broken:
                strict_chains += 1
                if check_NA_under(market_model, market, view).holds or not price_q < price:
                    failures.append(f"pricing chain #{k}: single moving outcome gives pi^Q = {price_q}")
    if not strict_chains:
        failures.append("no sampled measure broke NA(Q,S)")
    return _verdict(
        failures,
        f"{sizes.property_samples} samples: axioms, transfers, orderings, "
        f"pricing chain ({strict_chains} strict under NA(Q,S) failure)",
    )


def _lp_solver(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 9)
    failures = []
    compared = 0
    for k in range(sizes.programs):
        bounded = k % 4 == 0
        lp = sampling.linear_program(rng, rng.randint(1, 6), rng.randint(1, 8), bounded)
        outcome = solve(lp)
        if not verify_certificates(lp, outcome):
            failures.append(f"program {k}: {outcome.status.value} certificate")
        if bounded and sampling.vertex_comparable(lp):
            compared += 1
            brute = vertex_optimum(lp)
            expected = outcome.objective_value if outcome.status == LpStatus.OPTIMAL else None
            if brute != expected:
                failures.append(f"program {k}: simplex {expected}, vertices {brute}")
    for k, lp in enumerate(sampling.CYCLING_PROGRAMS):
        outcome = solve(lp)
        if outcome.status != LpStatus.OPTIMAL or not verify_certificates(lp, outcome):
            failures.append(f"cycling program {k}")
    return _verdict(
        failures,
        f"{sizes.programs} programs certified, {compared} matched vertex enumeration, "
        f"{len(sampling.CYCLING_PROGRAMS)} cycling programs terminate",
    )


def _bliss_point(seed: int, sizes: SelftestSizes) -> Dict:
    rng = _rng(seed, 10)
    failures = []
    for k in range(sizes.bliss_instances):
        model = sampling.robust_model(rng, rng.randint(2, 5), rng.randint(1, 3))
        lower = sampling.rv(rng, model)
        upper = lower + model.rv([abs(sampling.rational(rng)) for _ in range(model.n_outcomes)])
        targets = RvFamily.projecting(model, sampling.rv(rng, model, 8), model.priors)
        problem = bliss_problem(model, lower, upper, targets)
        _, report = solve_localized(model, problem, samples=sizes.bliss_points, seed=rng.randrange(2**32))
        if not report.verified:
            failures.append(f"instance {k}: {len(report.violations)} points beat the optimizer")
    return _verdict(failures, f"{sizes.bliss_instances} instances x {sizes.bliss_points} feasible points")


CRITERIA = (
    (1, "expectations of Y under P_n", _expectations_of_y),
    (2, "bubble table g(m, N)", _bubble_table),
    (3, "kappa truncation and localization gap", _kappa_truncation),
    (4, "superhedging duality", _superhedging_duality),
    (5, "FTAP equivalence", _ftap_equivalence),
    (6, "localization identity", _localization_identity),
    (7, "no bubble on finite spaces", _no_finite_bubble),
    (8, "property suites", _property_suites),
    (9, "LP solver certificates", _lp_solver),
    (10, "bliss point", _bliss_point),
)


def run_selftest(seed: int = 0, sizes: Optional[SelftestSizes] = None) -> List[CriterionResult]:
    sizes = sizes or SelftestSizes()
    results = []
    for number, title, check in CRITERIA:
        logger.info(f"criterion {number}: {title}")
        outcome = check(seed, sizes)
        results.append(CriterionResult(number, title, outcome["passed"], outcome["detail"]))
    return results
