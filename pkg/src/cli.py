"""
robloc command line
Loads a scenario, dispatches one command and emits a table and a JSON report.
Exit codes: 0 success, 2 mathematical verdict failure, 1 input error.
"""
import argparse
import logging
import sys
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from .config import Settings, get_settings, settings_scope
from .continuum import (
    example1_report,
    example1_value,
    example2_report,
    example2_witness,
    example_y,
    expect,
    p_n,
    rho_truncated,
)
from .errors import (
    ArbitrageError,
    IncoherentFamilyError,
    RobustLocalizationError,
    ScenarioError,
    UnboundedPriceError,
    UnknownNameError,
    VertexLimitExceeded,
)
from .market import (
    MartingaleSetSelector,
    SelectorKind,
    atomic_selector_truncation,
    check_NA_geometric,
    check_NA_under,
    ftap_check,
    martingale_polytope_vertices,
    subhedge,
    superhedge,
    superhedge_dual,
    superhedge_Q,
)
from .optimize import bliss_problem, solve_localized
from .rationals import as_extended, parse_rational
from .reports import RENDERERS, Report, decimal_cell, render_machine, render_table
from .risk import conjugate, q_rel_set, risk_table
from .scenario import ContinuumBlock, ResolvedScenario, load_scenario, resolve_scenario
from .sensitivity import classify_aggregator, is_coherent, localization_identity_check
from .telemetry import get_telemetry

logger = logging.getLogger(__name__)

# atomic-selector LPs grow with the grid; larger truncations are skipped
ATOMIC_GRID_LIMIT = 50

SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class RunOptions:
    seed: int = 0
    truncation: Optional[int] = None


Handler = Callable[[Optional[ResolvedScenario], RunOptions, Report], None]


@dataclass(frozen=True)
class Command:
    name: str
    handler: Handler
    needs_scenario: bool
    help: str


COMMANDS: Dict[str, Command] = {}


def command(name: str, help: str, needs_scenario: bool = True):
    def register(fn: Handler) -> Handler:
        COMMANDS[name] = Command(name, fn, needs_scenario, help)
        return fn

    return register


def execute(name: str, scenario: Optional[ResolvedScenario], options: Optional[RunOptions] = None) -> Report:
    """Run one command; verdict failures come back as a report with exit code 2"""
    if name not in COMMANDS:
        raise UnknownNameError("command", name)
    entry = COMMANDS[name]
    options = options or RunOptions()
    if entry.needs_scenario and scenario is None:
        raise ScenarioError(f"command '{name}' needs a scenario")
    report = Report(command=name, scenario=scenario.name if scenario else None)
    with get_telemetry().track_duration(f"command.{name}"):
        try:
            entry.handler(scenario, options, report)
        except (ArbitrageError, IncoherentFamilyError, UnboundedPriceError) as e:
            logger.info(f"{name}: {e}")
            report.fail(str(e))
    return report


# -- commands ---------------------------------------------------------------


def _require(blocks: dict, what: str) -> dict:
    if not blocks:
        raise ScenarioError(f"scenario has no '{what}' block")
    return blocks


@command("na-check", "no-arbitrage verdict per market, with a witness strategy when it fails")
def _na_check(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    failed = []
    for name, rm in _require(s.markets, "markets").items():
        na = check_NA_geometric(model, rm.market)
        section = report.section(f"market {name}", ["prior", "support", "NA(Q,S)", "witness H"])
        section.fact("NA(P,S)", na.holds)
        if not na.holds:
            section.fact("witness H", na.strategy.h)
            section.fact("strict gain at", f"w{na.outcome + 1}")
            failed.append(name)
        for prior in model.priors:
            local = check_NA_under(model, rm.market, model.qview(prior))
            section.add_row(s.measure_name(prior), str(prior.support()), local.holds,
                            local.strategy.h if local.strategy else None)
    if failed:
        report.fail(f"arbitrage in {', '.join(failed)}")


@command("superhedge", "superhedging, subhedging and martingale prices of each claim")
def _superhedge(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    failed = []
    for name, rm in _require(s.markets, "markets").items():
        na = check_NA_geometric(model, rm.market)
        if not na.holds:
            section = report.section(f"market {name}")
            section.fact("NA(P,S)", False).fact("witness H", na.strategy.h)
            failed.append(f"{name}: arbitrage")
            continue
        prices = report.section(
            f"market {name}",
            ["claim", "price", "decimal", "strategy H", "subhedge", "sup E_q[X]", "pricing measure"],
        )
        local = report.section(f"market {name}: prices seen by each prior", ["claim", "prior", "pi^Q"])
        for claim, x in rm.claims:
            result = superhedge(model, rm.market, x)
            dual = superhedge_dual(model, rm.market, x, MartingaleSetSelector(SelectorKind.M))
            prices.add_row(claim, result.price, decimal_cell(result.price), result.strategy.h,
                           subhedge(model, rm.market, x), dual, result.pricing_measure)
            if dual != result.price:
                failed.append(f"{name}/{claim}: duality gap")
            for prior in model.priors:
                local.add_row(claim, s.measure_name(prior), superhedge_Q(model, rm.market, model.qview(prior), x))
    if failed:
        report.fail("; ".join(failed))


@command("ftap", "robust FTAP check for every selector of every market")
def _ftap(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    settings = get_settings()
    defects: List[str] = []
    for name, rm in _require(s.markets, "markets").items():
        section = report.section(
            f"market {name}",
            ["selector", "NA", "all priors dominated", "hypotheses met", "consistent", "dominating measures"],
        )
        for selector in rm.selectors:
            ftap = ftap_check(model, rm.market, selector, workers=settings.workers)
            section.add_row(str(selector), ftap.na.holds, ftap.all_dominated, ftap.hypotheses_met,
                            ftap.consistent, "; ".join("-" if q is None else str(q) for q in ftap.dominating))
            defects.extend(ftap.defects)
        try:
            vertices = martingale_polytope_vertices(model, rm.market)
        except VertexLimitExceeded as e:
            section.notes.append(str(e))
            continue
        corners = report.section(f"market {name}: martingale polytope vertices", ["vertex"])
        for vertex in vertices:
            corners.add_row(vertex)
        corners.fact("count", len(vertices))
    if defects:
        report.fail("; ".join(defects))


@command("localize", "sup of primal localizations over the relevant measures against rho")
def _localize(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    failed = []
    for name, risk in _require(s.risk_measures, "risk_measures").items():
        labels = {id(q): label for label, q in risk.candidates}
        qset = q_rel_set(risk.rho, [q for _, q in risk.candidates])
        section = report.section(f"risk measure {name}", ["X", "rho(X)", "sup_Q rho^Q_E(X)", "equal"])
        section.fact("relevant measures", ", ".join(labels[id(q)] for q in qset) or "none")
        if not qset:
            failed.append(f"{name}: no relevant measure among the candidates")
            continue
        check = localization_identity_check(model, risk.rho, qset, [x for _, x in risk.samples])
        for (label, _), row in zip(risk.samples, check.rows):
            section.add_row(label, row.value, row.localized_sup, row.holds)
        if not check.holds:
            failed.append(f"{name}: identity fails on {len(check.violations)} samples")
    if failed:
        report.fail("; ".join(failed))


@command("risk-table", "primal and dual localizations per candidate measure, with the bubble gap")
def _risk_table(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    zero = as_extended(0)
    bubbles = []
    for name, risk in _require(s.risk_measures, "risk_measures").items():
        penalties = report.section(f"risk measure {name}: penalties", ["Q", "penalty"])
        for label, q in risk.candidates:
            penalties.add_row(label, conjugate(risk.rho, q.measure))
        table = report.section(f"risk measure {name}", ["X", "Q", "relevant", "rho^Q_E", "rho^Q_D", "gap"])
        for x_label, x in risk.samples:
            rows = risk_table(risk.rho, model, [q for _, q in risk.candidates], x)
            for (q_label, _), row in zip(risk.candidates, rows):
                table.add_row(x_label, q_label, row.relevant, row.primal, row.dual, row.gap)
                if row.gap != zero:
                    bubbles.append(f"{name}/{x_label}/{q_label}")
    if bubbles:
        report.fail(f"localization gap on a finite space: {', '.join(bubbles)}")


@command("aggregate", "coherence of each family and its aggregator")
def _aggregate(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    incoherent = []
    for name, family in _require(s.families, "families").items():
        section = report.section(f"family {name}", ["measure", "support", "member"])
        for q, y in family.entries:
            section.add_row(s.measure_name(q.measure), str(q.support), y)
        result = is_coherent(model, family)
        section.fact("coherent", result.coherent)
        if result.coherent:
            kind = classify_aggregator(model, family, result.aggregator)
            section.fact("aggregator", result.aggregator).fact("kind", kind.kind.value)
        else:
            c = result.conflict
            section.fact("conflict", f"entries {c.first + 1} and {c.second + 1} disagree at w{c.outcome + 1}")
            incoherent.append(name)
    if incoherent:
        report.fail(f"incoherent families: {', '.join(incoherent)}")


@command("bliss", "bliss point by clamping per prior and patching")
def _bliss(s: ResolvedScenario, options: RunOptions, report: Report) -> None:
    model = s.require_model()
    failed = []
    for name, block in _require(s.optimization, "optimization").items():
        problem = bliss_problem(model, block.lower, block.upper, block.targets)
        optimizer, result = solve_localized(
            model, problem, samples=block.samples, seed=options.seed, workers=get_settings().workers
        )
        section = report.section(f"problem {name}", ["measure", "local optimum", "value at optimizer"])
        section.fact("optimizer", optimizer).fact("objective", result.objective_value)
        section.fact("points checked", result.samples_checked).fact("points beating it", len(result.violations))
        for (q, _), best, value in zip(problem.objectives, result.local_optima, result.local_values):
            section.add_row(s.measure_name(q.measure), best, value)
        if not result.verified:
            failed.append(name)
    if failed:
        report.fail(f"aggregated optimizer not optimal in {', '.join(failed)}")


@command("bubble-demo", "exact truncation tables for the continuum bubble examples", needs_scenario=False)
def _bubble_demo(s: Optional[ResolvedScenario], options: RunOptions, report: Report) -> None:
    block = s.continuum if s is not None else ContinuumBlock()
    m_grid = [parse_rational(m) for m in block.m_grid]
    n_grid = [options.truncation] if options.truncation else list(block.n_grid)
    mismatches = []

    first = example1_report(m_grid, n_grid)
    g = report.section("g(m, N) = rho_N(-m 1_B)", ["m", "N", "g", "decimal", "-m/N", "rho^Q_D(0) at N"])
    g.fact("rho^Q_E(0)", first.primal_at_zero).fact("rho^Q_D(0)", first.dual_at_zero)
    g.fact("relevant", first.relevant).fact("bubble", first.gap)
    for row in first.rows:
        closed = example1_value(row.m, row.n_max)
        g.add_row(row.m, row.n_max, row.g, decimal_cell(row.g), closed, row.truncated_dual)
        if row.g != closed:
            mismatches.append(f"g({row.m}, {row.n_max})")

    y = example_y()
    truncated = report.section("rho_N(Y)", ["N", "E_{P_N}[Y]", "rho_N(Y)"])
    for n_max in n_grid:
        e, rho_y = expect(p_n(n_max), y), rho_truncated(y, n_max)
        truncated.add_row(n_max, e, rho_y)
        if e != Fraction(-2, n_max * (n_max + 1)) or rho_y != e:
            mismatches.append(f"rho_{n_max}(Y)")

    second = example2_report(m_grid, n_grid)
    kappa = report.section("kappa_N(W 1_S - m 1_B)", ["m", "N", "kappa_N", "decimal", "closed form", "gap"])
    kappa.fact("kappa^Q_D(W)", second.kappa_dual).fact("limiting gap", second.limiting_gap)
    for row in second.rows:
        kappa.add_row(row.m, row.n_max, row.kappa, decimal_cell(row.kappa), row.closed_form, decimal_cell(row.gap))
        if row.kappa != row.closed_form:
            mismatches.append(f"kappa({row.m}, {row.n_max})")

    d, d_prime = tuple(parse_rational(v) for v in block.d), tuple(parse_rational(v) for v in block.d_prime)
    witness = report.section("Z = 1_D - 1_D' - m 1_B", ["m", "max_n E_{P_n}[Z]", "E_Q[Z]", "D, D' outside A_m", "holds"])
    witness.fact("D", d).fact("D'", d_prime)
    for m in m_grid:
        check = example2_witness(m, max(n_grid), d, d_prime)
        witness.add_row(m, check.max_expectation, check.q_expectation, check.outside_a_m, check.holds)
        if not check.holds:
            mismatches.append(f"witness at m={m}")

    grids = [n for n in n_grid if n <= ATOMIC_GRID_LIMIT]
    atomic = report.section("atomic selector truncation", ["grid n", "best min mass", "dominated"])
    for row in atomic_selector_truncation(grids):
        atomic.add_row(row.grid, row.min_mass, row.dominated)
    if len(grids) < len(n_grid):
        atomic.notes.append(f"grids above {ATOMIC_GRID_LIMIT} skipped")

    if mismatches:
        report.fail(f"closed forms disagree: {', '.join(mismatches)}")


@command("selftest", "acceptance suite, PASS/FAIL per criterion", needs_scenario=False)
def _selftest(s: Optional[ResolvedScenario], options: RunOptions, report: Report) -> None:
    from .selftest import run_selftest

    section = report.section("acceptance criteria", ["criterion", "title", "result", "detail"])
    results = run_selftest(options.seed)
    for result in results:
        section.add_row(result.number, result.title, "PASS" if result.passed else "FAIL", result.detail)
    failed = [str(r.number) for r in results if not r.passed]
    if failed:
        report.fail(f"criteria failed: {', '.join(failed)}")


# -- output -----------------------------------------------------------------

_locks_guard = threading.Lock()
_file_locks: Dict[Path, threading.Lock] = {}


def _lock_for(path: Path) -> threading.Lock:
    with _locks_guard:
        return _file_locks.setdefault(path.resolve(), threading.Lock())


def write_report(report: Report, out_dir: Path) -> List[Path]:
    """Write <command>.txt and <command>.json; writes to one file are serialized"""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix, render in ((".txt", render_table), (".json", render_machine)):
        path = out_dir / f"{report.command}{suffix}"
        with _lock_for(path):
            path.write_text(render(report), encoding="utf-8")
        written.append(path)
    return written


# -- entry point ------------------------------------------------------------


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError(f"seed must be in [0, {SEED_MAX}]")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robloc", description="Robust finite models, localization, superhedging and bubble tables"
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="command to run")
    parser.add_argument("--scenario", type=Path, help="scenario JSON file")
    parser.add_argument("--out", type=Path, help="output directory (default: ROBLOC_OUTPUT_DIR or ./reports)")
    parser.add_argument("--format", choices=sorted(RENDERERS), default="table", help="stdout format")
    parser.add_argument("--seed", type=_seed, default=0, help="seed for randomized checks")
    parser.add_argument("--max-pivots", type=_positive, help="pivot cap per LP")
    parser.add_argument("--truncation", type=_positive, help="single truncation level N for bubble-demo")
    parser.add_argument("--workers", type=_positive, help="threads for per-prior work")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    return parser


def _configure_logging(settings: Settings, verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("robust_localization").setLevel(level)


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings().with_overrides(max_pivots=args.max_pivots, workers=args.workers)
        _configure_logging(settings, args.verbose)
        with settings_scope(settings):
            scenario = resolve_scenario(load_scenario(args.scenario)) if args.scenario else None
            report = execute(args.command, scenario, RunOptions(seed=args.seed, truncation=args.truncation))
            sys.stdout.write(RENDERERS[args.format](report))
            write_report(report, args.out or Path(settings.output_dir))
    except (RobustLocalizationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: cannot write report: {e}", file=sys.stderr)
        return 1
    return report.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
