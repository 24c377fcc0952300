"""
Exact-rational linear programming
Dense two-phase tableau simplex with Bland's rule. Every outcome carries a
certificate (primal/dual pair, Farkas vector or improving ray) that
verify_certificates re-checks independently.

Canonical rows are the constraints followed by one row per finite bound
(lower bound row first). Duals are indexed by canonical rows and satisfy
A^T y = c; for minimization y <= 0 on <= rows and y >= 0 on >= rows, for
maximization the signs are reversed, equality rows are free.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

from .config import get_settings
from .errors import MalformedProgramError, PivotLimitExceeded
from .exact_linalg import solve_square
from .rationals import RationalLike, format_rational, parse_rational
from .telemetry import get_telemetry

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


Row = Tuple[Tuple[Fraction, ...], Relation, Fraction]


def _opt(value: Optional[RationalLike]) -> Optional[Fraction]:
    return None if value is None else parse_rational(value)


@dataclass(frozen=True)
class LinearProgram:
    objective: Tuple[Fraction, ...]
    sense: Sense = Sense.MIN
    rows: Tuple[Tuple[Fraction, ...], ...] = ()
    relations: Tuple[Relation, ...] = ()
    rhs: Tuple[Fraction, ...] = ()
    lower: Optional[Tuple[Optional[Fraction], ...]] = None
    upper: Optional[Tuple[Optional[Fraction], ...]] = None

    def __post_init__(self):
        n = len(self.objective)
        if n == 0:
            raise MalformedProgramError("program has no variables")
        object.__setattr__(self, "objective", tuple(parse_rational(c) for c in self.objective))
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "rows", tuple(tuple(parse_rational(a) for a in row) for row in self.rows))
        object.__setattr__(self, "relations", tuple(Relation(r) for r in self.relations))
        object.__setattr__(self, "rhs", tuple(parse_rational(b) for b in self.rhs))
        if not len(self.rows) == len(self.relations) == len(self.rhs):
            raise MalformedProgramError(
                f"{len(self.rows)} rows, {len(self.relations)} relations, {len(self.rhs)} right-hand sides"
            )
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise MalformedProgramError(f"row {i} has {len(row)} coefficients, expected {n}")
        lower = self.lower if self.lower is not None else (None,) * n
        upper = self.upper if self.upper is not None else (None,) * n
        if len(lower) != n or len(upper) != n:
            raise MalformedProgramError("bounds do not match the number of variables")
        lower = tuple(_opt(v) for v in lower)
        upper = tuple(_opt(v) for v in upper)
        for j, (lo, hi) in enumerate(zip(lower, upper)):
            if lo is not None and hi is not None and lo > hi:
                raise MalformedProgramError(f"variable {j} has lower bound above upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def build(
        cls,
        objective: Sequence[RationalLike],
        sense: Sense = Sense.MIN,
        constraints: Iterable[Tuple[Sequence[RationalLike], Relation, RationalLike]] = (),
        lower: Optional[Sequence[Optional[RationalLike]]] = None,
        upper: Optional[Sequence[Optional[RationalLike]]] = None,
    ) -> "LinearProgram":
        constraints = list(constraints)
        return cls(
            objective=tuple(objective),
            sense=sense,
            rows=tuple(tuple(c[0]) for c in constraints),
            relations=tuple(c[1] for c in constraints),
            rhs=tuple(c[2] for c in constraints),
            lower=tuple(lower) if lower is not None else None,
            upper=tuple(upper) if upper is not None else None,
        )

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def canonical_rows(self) -> List[Row]:
        rows: List[Row] = list(zip(self.rows, self.relations, self.rhs))
        n = self.n_vars
        for j in range(n):
            unit = tuple(Fraction(1) if k == j else ZERO for k in range(n))
            if self.lower[j] is not None:
                rows.append((unit, Relation.GE, self.lower[j]))
            if self.upper[j] is not None:
                rows.append((unit, Relation.LE, self.upper[j]))
        return rows

    def objective_at(self, x: Sequence[Fraction]) -> Fraction:
        return _dot(self.objective, x)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    primal: Tuple[Fraction, ...] = ()
    dual: Tuple[Fraction, ...] = ()
    objective_value: Optional[Fraction] = None
    farkas: Optional[Tuple[Fraction, ...]] = None
    ray: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), ZERO)


class _SimplexRun:
    """Single solve; the tableau is private to the instance"""

    def __init__(self, lp: LinearProgram, max_pivots: int, trace: Optional[TextIO]):
        self.lp = lp
        self.max_pivots = max_pivots
        self.trace = trace
        self.rows = lp.canonical_rows()
        self.m = len(self.rows)
        n = lp.n_vars
        self.n_struct = 2 * n
        col = self.n_struct
        self.slack_of = {}
        for i, (_, rel, _) in enumerate(self.rows):
            if rel != Relation.EQ:
                self.slack_of[i] = col
                col += 1
        self.art0 = col
        self.n_cols = col + self.m
        self.signs: List[int] = []
        self.tableau: List[List[Fraction]] = []
        for i, (coeffs, rel, b) in enumerate(self.rows):
            sign = -1 if b < 0 else 1
            row = [ZERO] * (self.n_cols + 1)
            for j, a in enumerate(coeffs):
                if a:
                    row[2 * j] = sign * a
                    row[2 * j + 1] = -sign * a
            if i in self.slack_of:
                row[self.slack_of[i]] = Fraction(sign if rel == Relation.LE else -sign)
            row[self.art0 + i] = Fraction(1)
            row[-1] = sign * b
            self.signs.append(sign)
            self.tableau.append(row)
        self.basis = [self.art0 + i for i in range(self.m)]
        self.pivots = 0

    def _column_name(self, j: int) -> str:
        if j < self.n_struct:
            return f"x{j // 2}{'+' if j % 2 == 0 else '-'}"
        if j < self.art0:
            row = next(i for i, c in self.slack_of.items() if c == j)
            return f"s{row}"
        return f"a{j - self.art0}"

    def _dump(self, phase: int, entering: int, leaving_row: int):
        logger.debug(
            f"phase {phase} pivot {self.pivots}: {self._column_name(entering)} enters, "
            f"{self._column_name(self.basis[leaving_row])} leaves"
        )
        if self.trace is None:
            return
        self.trace.write(
            f"phase {phase} pivot {self.pivots}: enter {self._column_name(entering)} "
            f"leave {self._column_name(self.basis[leaving_row])}\n"
        )
        for r, row in enumerate(self.tableau):
            cells = " ".join(format_rational(v) for v in row)
            self.trace.write(f"  {self._column_name(self.basis[r]):>5} | {cells}\n")

    def _pivot(self, r: int, j: int):
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise PivotLimitExceeded(self.max_pivots)
        pivot_row = self.tableau[r]
        p = pivot_row[j]
        if p != 1:
            pivot_row[:] = [v / p for v in pivot_row]
        for k, row in enumerate(self.tableau):
            if k != r and row[j]:
                factor = row[j]
                row[:] = [v - factor * w for v, w in zip(row, pivot_row)]
        self.basis[r] = j

    def _reduced_costs(self, cost: Sequence[Fraction]) -> List[Fraction]:
        reduced = list(cost)
        for r, row in enumerate(self.tableau):
            cb = cost[self.basis[r]]
            if cb:
                for j in range(self.n_cols):
                    if row[j]:
                        reduced[j] -= cb * row[j]
        return reduced

    def _iterate(self, cost: Sequence[Fraction], allowed: int, phase: int) -> Optional[int]:
        """Run Bland pivots; return an entering column with no leaving row, if any"""
        while True:
            reduced = self._reduced_costs(cost)
            entering = next((j for j in range(allowed) if reduced[j] < 0), None)
            if entering is None:
                return None
            leaving = None
            best = None
            for r, row in enumerate(self.tableau):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leaving]):
                        best, leaving = ratio, r
            if leaving is None:
                return entering
            self._dump(phase, entering, leaving)
            self._pivot(leaving, entering)

    def _duals(self, cost: Sequence[Fraction]) -> List[Fraction]:
        duals = []
        for i in range(self.m):
            col = self.art0 + i
            y = sum((cost[self.basis[r]] * row[col] for r, row in enumerate(self.tableau)), ZERO)
            duals.append(self.signs[i] * y)
        return duals

    def _values(self) -> List[Fraction]:
        z = [ZERO] * self.n_cols
        for r, row in enumerate(self.tableau):
            z[self.basis[r]] = row[-1]
        return z

    def _primal(self, z: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        return tuple(z[2 * j] - z[2 * j + 1] for j in range(self.lp.n_vars))

    def run(self) -> LpOutcome:
        phase_one = [ZERO] * self.art0 + [Fraction(1)] * self.m
        self._iterate(phase_one, self.n_cols, phase=1)
        infeasibility = sum((row[-1] for r, row in enumerate(self.tableau) if self.basis[r] >= self.art0), ZERO)
        if infeasibility > 0:
            return LpOutcome(LpStatus.INFEASIBLE, farkas=tuple(self._duals(phase_one)), pivots=self.pivots)

        for r in range(self.m):
            if self.basis[r] >= self.art0:
                j = next((j for j in range(self.art0) if self.tableau[r][j] != 0), None)
                if j is not None:
                    self._dump(1, j, r)
                    self._pivot(r, j)

        s = 1 if self.lp.sense == Sense.MIN else -1
        cost = [ZERO] * (self.n_cols)
        for j, c in enumerate(self.lp.objective):
            cost[2 * j] = s * c
            cost[2 * j + 1] = -s * c

        entering = self._iterate(cost, self.art0, phase=2)
        z = self._values()
        primal = self._primal(z)
        if entering is not None:
            direction = [ZERO] * self.n_cols
            direction[entering] = Fraction(1)
            for r, row in enumerate(self.tableau):
                direction[self.basis[r]] = -row[entering]
            return LpOutcome(
                LpStatus.UNBOUNDED, primal=primal, ray=self._primal(direction), pivots=self.pivots
            )
        duals = self._duals(cost)
        if s < 0:
            duals = [-y for y in duals]
        return LpOutcome(
            LpStatus.OPTIMAL,
            primal=primal,
            dual=tuple(duals),
            objective_value=self.lp.objective_at(primal),
            pivots=self.pivots,
        )


def solve(lp: LinearProgram, max_pivots: Optional[int] = None, trace: Optional[TextIO] = None) -> LpOutcome:
    """Solve exactly; raises PivotLimitExceeded when the pivot cap is hit"""
    limit = max_pivots if max_pivots is not None else get_settings().max_pivots
    telemetry = get_telemetry()
    with telemetry.track_duration("lp.solve", {"variables": lp.n_vars}):
        outcome = _SimplexRun(lp, limit, trace).run()
    telemetry.record_solve(outcome.status.value, outcome.pivots)
    logger.debug(f"LP with {lp.n_vars} variables finished {outcome.status.value} after {outcome.pivots} pivots")
    return outcome


def _row_sign_ok(relation: Relation, y: Fraction, sense: Sense) -> bool:
    if relation == Relation.EQ:
        return True
    nonpositive = (relation == Relation.LE) == (sense == Sense.MIN)
    return y <= 0 if nonpositive else y >= 0


def _feasible(rows: Sequence[Row], x: Sequence[Fraction]) -> bool:
    for coeffs, rel, b in rows:
        lhs = _dot(coeffs, x)
        if rel == Relation.LE and lhs > b:
            return False
        if rel == Relation.GE and lhs < b:
            return False
        if rel == Relation.EQ and lhs != b:
            return False
    return True


def _transpose_times(rows: Sequence[Row], y: Sequence[Fraction], n: int) -> List[Fraction]:
    out = [ZERO] * n
    for (coeffs, _, _), yi in zip(rows, y):
        if yi:
            for j, a in enumerate(coeffs):
                out[j] += yi * a
    return out


def verify_certificates(lp: LinearProgram, outcome: LpOutcome) -> bool:
    """Re-check an outcome with exact arithmetic only"""
    rows = lp.canonical_rows()
    n = lp.n_vars

    def fail(reason: str) -> bool:
        logger.debug(f"certificate rejected: {reason}")
        return False

    if outcome.status == LpStatus.OPTIMAL:
        x, y = outcome.primal, outcome.dual
        if len(x) != n or len(y) != len(rows):
            return fail("dimension mismatch")
        if not _feasible(rows, x):
            return fail("primal infeasible")
        if _transpose_times(rows, y, n) != list(lp.objective):
            return fail("dual equality A^T y = c violated")
        if not all(_row_sign_ok(rel, yi, lp.sense) for (_, rel, _), yi in zip(rows, y)):
            return fail("dual sign violated")
        primal_value = lp.objective_at(x)
        dual_value = _dot([b for _, _, b in rows], y)
        if primal_value != dual_value or primal_value != outcome.objective_value:
            return fail("strong duality violated")
        for (coeffs, _, b), yi in zip(rows, y):
            if yi and _dot(coeffs, x) != b:
                return fail("complementary slackness violated")
        return True

    if outcome.status == LpStatus.INFEASIBLE:
        y = outcome.farkas
        if y is None or len(y) != len(rows):
            return fail("missing Farkas vector")
        if any(v != 0 for v in _transpose_times(rows, y, n)):
            return fail("Farkas vector does not annihilate A")
        if not all(_row_sign_ok(rel, yi, Sense.MIN) for (_, rel, _), yi in zip(rows, y)):
            return fail("Farkas sign violated")
        if _dot([b for _, _, b in rows], y) <= 0:
            return fail("Farkas vector does not separate")
        return True

    x, d = outcome.primal, outcome.ray
    if d is None or len(d) != n or len(x) != n:
        return fail("missing ray")
    if not _feasible(rows, x):
        return fail("ray origin infeasible")
    for coeffs, rel, _ in rows:
        ad = _dot(coeffs, d)
        if (rel == Relation.LE and ad > 0) or (rel == Relation.GE and ad < 0) or (rel == Relation.EQ and ad != 0):
            return fail("ray leaves the feasible region")
    improvement = lp.objective_at(d)
    if (lp.sense == Sense.MIN and improvement >= 0) or (lp.sense == Sense.MAX and improvement <= 0):
        return fail("ray does not improve the objective")
    return True


def vertex_optimum(lp: LinearProgram) -> Optional[Fraction]:
    """Best objective over all vertices by brute force (None if there is no vertex)

    Only meaningful when the feasible region is a polytope.
    """
    rows = lp.canonical_rows()
    n = lp.n_vars
    best: Optional[Fraction] = None
    for subset in itertools.combinations(range(len(rows)), n):
        point = solve_square([rows[i][0] for i in subset], [rows[i][2] for i in subset])
        if point is None or not _feasible(rows, point):
            continue
        value = lp.objective_at(point)
        if best is None or (value < best if lp.sense == Sense.MIN else value > best):
            best = value
    return best
