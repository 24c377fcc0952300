"""
Exact closed-form objects on the unit interval
Piecewise polynomials with rational coefficients, mixtures of normalized
Lebesgue measure on intervals, truncated suprema over the measures P_n and
the bubble tables built from them.

The measures are P_n = (n-1)/n * U(A_n) + 1/n * U(B) with A_n = (0, 1/(n+1))
and B = [1/2, 1), where U(I) is the uniform distribution on I. Q is U((0, 1/2)).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from sympy import QQ, Poly, Rational, Symbol

from .rationals import NEG_INF, POS_INF, ExtendedRational, RationalLike, parse_rational

logger = logging.getLogger(__name__)

MAX_DEGREE = 3
ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

_omega = Symbol("omega")

Coefficients = Tuple[Fraction, ...]


def _trim(coeffs: Iterable[Fraction]) -> Coefficients:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _poly(coeffs: Coefficients) -> Poly:
    ascending = list(coeffs) or [ZERO]
    return Poly([Rational(c.numerator, c.denominator) for c in reversed(ascending)], _omega, domain=QQ)


def _from_poly(poly: Poly) -> Coefficients:
    descending = poly.all_coeffs()
    return _trim(Fraction(int(c.p), int(c.q)) for c in reversed(descending))


def _horner(coeffs: Coefficients, x: Fraction) -> Fraction:
    value = ZERO
    for c in reversed(coeffs):
        value = value * x + c
    return value


@dataclass(frozen=True)
class PiecewiseRationalFunction:
    """Polynomial of degree at most 3 on each piece (breakpoints[k], breakpoints[k+1])"""

    breakpoints: Tuple[Fraction, ...]
    pieces: Tuple[Coefficients, ...]
    _antiderivatives: Tuple[Coefficients, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = tuple(parse_rational(p) for p in self.breakpoints)
        pieces = tuple(_trim(parse_rational(c) for c in piece) for piece in self.pieces)
        if len(points) < 2 or points[0] != 0 or points[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(points, points[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(pieces) != len(points) - 1:
            raise ValueError(f"{len(points) - 1} pieces expected, got {len(pieces)}")
        if any(len(piece) > MAX_DEGREE + 1 for piece in pieces):
            raise ValueError(f"piece degree exceeds {MAX_DEGREE}")
        merged_points = [points[0]]
        merged_pieces: List[Coefficients] = []
        for piece, end in zip(pieces, points[1:]):
            if merged_pieces and merged_pieces[-1] == piece:
                merged_points[-1] = end
            else:
                merged_pieces.append(piece)
                merged_points.append(end)
        object.__setattr__(self, "breakpoints", tuple(merged_points))
        object.__setattr__(self, "pieces", tuple(merged_pieces))
        object.__setattr__(
            self, "_antiderivatives", tuple(_from_poly(_poly(p).integrate()) for p in merged_pieces)
        )

    @classmethod
    def constant(cls, c: RationalLike) -> "PiecewiseRationalFunction":
        return cls((ZERO, ONE), ((parse_rational(c),),))

    @classmethod
    def polynomial(cls, coeffs: Sequence[RationalLike]) -> "PiecewiseRationalFunction":
        return cls((ZERO, ONE), (tuple(coeffs),))

    @classmethod
    def on_interval(
        cls, lo: RationalLike, hi: RationalLike, coeffs: Sequence[RationalLike] = (1,)
    ) -> "PiecewiseRationalFunction":
        """The polynomial on (lo, hi) and zero elsewhere"""
        lo, hi = parse_rational(lo), parse_rational(hi)
        if not 0 <= lo < hi <= 1:
            raise ValueError(f"({lo}, {hi}) is not a subinterval of (0, 1)")
        points = [ZERO]
        pieces: List[Sequence[RationalLike]] = []
        if lo > 0:
            points.append(lo)
            pieces.append(())
        pieces.append(tuple(coeffs))
        points.append(hi)
        if hi < 1:
            pieces.append(())
            points.append(ONE)
        return cls(tuple(points), tuple(pieces))

    @classmethod
    def indicator(cls, lo: RationalLike, hi: RationalLike) -> "PiecewiseRationalFunction":
        return cls.on_interval(lo, hi, (1,))

    def _refined(self, other: "PiecewiseRationalFunction"):
        points = sorted(set(self.breakpoints) | set(other.breakpoints))
        for a, b in zip(points, points[1:]):
            mid = (a + b) / 2
            yield a, b, self.piece_at(mid), other.piece_at(mid)

    def _combine(self, other: "PiecewiseRationalFunction", op) -> "PiecewiseRationalFunction":
        points = [ZERO]
        pieces = []
        for _, b, p, q in self._refined(other):
            pieces.append(op(p, q))
            points.append(b)
        return PiecewiseRationalFunction(tuple(points), tuple(pieces))

    def piece_at(self, x: Fraction) -> Coefficients:
        """Coefficients of the piece containing x (the right piece at a breakpoint)"""
        for k in range(len(self.pieces)):
            if x < self.breakpoints[k + 1]:
                return self.pieces[k]
        return self.pieces[-1]

    def __call__(self, x: RationalLike) -> Fraction:
        x = parse_rational(x)
        return _horner(self.piece_at(x), x)

    def __add__(self, other: "PiecewiseRationalFunction") -> "PiecewiseRationalFunction":
        return self._combine(other, lambda p, q: _from_poly(_poly(p) + _poly(q)))

    def __sub__(self, other: "PiecewiseRationalFunction") -> "PiecewiseRationalFunction":
        return self._combine(other, lambda p, q: _from_poly(_poly(p) - _poly(q)))

    def __neg__(self) -> "PiecewiseRationalFunction":
        return self.scale(-1)

    def scale(self, factor: RationalLike) -> "PiecewiseRationalFunction":
        factor = parse_rational(factor)
        return PiecewiseRationalFunction(self.breakpoints, tuple(tuple(factor * c for c in p) for p in self.pieces))

    def __mul__(self, other: "PiecewiseRationalFunction") -> "PiecewiseRationalFunction":
        return self._combine(other, lambda p, q: _from_poly(_poly(p) * _poly(q)))

    def integrate(self, lo: Fraction, hi: Fraction) -> Fraction:
        total = ZERO
        for k, anti in enumerate(self._antiderivatives):
            a = max(lo, self.breakpoints[k])
            b = min(hi, self.breakpoints[k + 1])
            if a < b:
                total += _horner(anti, b) - _horner(anti, a)
        return total


@dataclass(frozen=True)
class IntervalMixtureMeasure:
    """sum_k w_k * U(lo_k, hi_k)"""

    components: Tuple[Tuple[Fraction, Tuple[Fraction, Fraction]], ...]

    def __post_init__(self):
        components = tuple(
            (parse_rational(w), (parse_rational(lo), parse_rational(hi))) for w, (lo, hi) in self.components
        )
        if not components:
            raise ValueError("a mixture needs at least one component")
        for w, (lo, hi) in components:
            if w < 0:
                raise ValueError(f"negative weight {w}")
            if not 0 <= lo < hi <= 1:
                raise ValueError(f"({lo}, {hi}) is not a subinterval of (0, 1)")
        if sum(w for w, _ in components) != 1:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "components", components)

    def mass(self, lo: Fraction, hi: Fraction) -> Fraction:
        total = ZERO
        for w, (a, b) in self.components:
            overlap = min(b, hi) - max(a, lo)
            if w and overlap > 0:
                total += w * overlap / (b - a)
        return total


def expect(mu: IntervalMixtureMeasure, f: PiecewiseRationalFunction) -> Fraction:
    return sum((w * f.integrate(lo, hi) / (hi - lo) for w, (lo, hi) in mu.components if w), ZERO)


# -- the example objects ----------------------------------------------------

B_INTERVAL = (HALF, ONE)
S_INTERVAL = (ZERO, HALF)


def a_interval(n: int) -> Tuple[Fraction, Fraction]:
    return ZERO, Fraction(1, n + 1)


def p_n(n: int) -> IntervalMixtureMeasure:
    if n < 1:
        raise ValueError("n starts at 1")
    return IntervalMixtureMeasure(((Fraction(n - 1, n), a_interval(n)), (Fraction(1, n), B_INTERVAL)))


def q_half() -> IntervalMixtureMeasure:
    return IntervalMixtureMeasure(((ONE, S_INTERVAL),))


def indicator_b() -> PiecewiseRationalFunction:
    return PiecewiseRationalFunction.indicator(*B_INTERVAL)


def indicator_s() -> PiecewiseRationalFunction:
    return PiecewiseRationalFunction.indicator(*S_INTERVAL)


def example_y() -> PiecewiseRationalFunction:
    """-1 on B, 2*omega elsewhere"""
    return PiecewiseRationalFunction((ZERO, HALF, ONE), ((ZERO, Fraction(2)), (-ONE,)))


def example_w() -> PiecewiseRationalFunction:
    return -example_y()


def localized_input(x_base: PiecewiseRationalFunction, m: RationalLike) -> PiecewiseRationalFunction:
    """X 1_S - m 1_B"""
    return x_base * indicator_s() - indicator_b().scale(m)


def _running_max(values: Sequence[Fraction]) -> List[Fraction]:
    out, best = [], None
    for v in values:
        best = v if best is None or v > best else best
        out.append(best)
    return out


def truncated_values(x: PiecewiseRationalFunction, n_max: int) -> List[Fraction]:
    """E_{P_n}[X] for n = 1..n_max"""
    return [expect(p_n(n), x) for n in range(1, n_max + 1)]


def rho_truncated(x: PiecewiseRationalFunction, n_max: int) -> Fraction:
    if n_max < 1:
        raise ValueError("truncation must be at least 1")
    return max(truncated_values(x, n_max))


@dataclass(frozen=True)
class BubbleRow:
    m: Fraction
    n_max: int
    value: Fraction


def bubble_table(
    x_base: PiecewiseRationalFunction, m_grid: Sequence[RationalLike], n_grid: Sequence[int]
) -> List[BubbleRow]:
    """g(m, N) = rho_N(X 1_S - m 1_B) over the grids"""
    if not m_grid or not n_grid:
        raise ValueError("grids must be non-empty")
    logger.debug(f"bubble table over {len(m_grid)} values of m up to N = {max(n_grid)}")
    rows = []
    top = max(n_grid)
    for m in m_grid:
        m = parse_rational(m)
        running = _running_max(truncated_values(localized_input(x_base, m), top))
        for n_max in n_grid:
            rows.append(BubbleRow(m, n_max, running[n_max - 1]))
    return rows


def example1_value(m: RationalLike, n_max: int) -> Fraction:
    """Closed form of g(m, N) for X = 0"""
    return -parse_rational(m) / n_max


@dataclass(frozen=True)
class Example1Row:
    m: Fraction
    n_max: int
    g: Fraction
    truncated_dual: ExtendedRational


@dataclass(frozen=True)
class Example1Report:
    rows: Tuple[Example1Row, ...]
    primal_at_zero: ExtendedRational
    dual_at_zero: ExtendedRational

    @property
    def relevant(self) -> bool:
        return self.primal_at_zero.is_finite

    @property
    def gap(self) -> ExtendedRational:
        return POS_INF if self.relevant else ExtendedRational.finite(0)


def example1_report(m_grid: Sequence[RationalLike], n_grid: Sequence[int]) -> Example1Report:
    """g(m, N) = rho_N(-m 1_B) against the localizations of rho at 0 for S = (0, 1/2)

    For fixed m, g(m, N) = -m/N rises to 0, so rho^Q_E(0) = 0 and the primal
    localization is relevant. Every P_n gives B the mass 1/n > 0, so no measure
    of any truncation is carried by S and rho^Q_D is -inf throughout.
    """
    rows = tuple(
        Example1Row(row.m, row.n_max, row.value, NEG_INF)
        for row in bubble_table(PiecewiseRationalFunction.constant(0), m_grid, n_grid)
    )
    return Example1Report(rows, ExtendedRational.finite(0), NEG_INF)


def example2_term(n: int, m: RationalLike) -> Fraction:
    m = parse_rational(m)
    return -Fraction(n - 1, n * (n + 1)) - m / n


def example2_closed_form(m: RationalLike, n_max: int) -> Fraction:
    return max(-HALF, max(example2_term(n, m) for n in range(1, n_max + 1)))


@dataclass(frozen=True)
class Example2Row:
    m: Fraction
    n_max: int
    kappa: Fraction
    closed_form: Fraction
    gap: Fraction


@dataclass(frozen=True)
class Example2Report:
    kappa_dual: Fraction
    rows: Tuple[Example2Row, ...]
    limiting_gap: Fraction = HALF


def kappa_truncated(x: PiecewiseRationalFunction, n_max: int) -> Fraction:
    """max(rho_N(X), E_Q[X])"""
    return max(rho_truncated(x, n_max), expect(q_half(), x))


def example2_report(m_grid: Sequence[RationalLike], n_grid: Sequence[int]) -> Example2Report:
    w = example_w()
    kappa_dual = expect(q_half(), w)
    q = q_half()
    top = max(n_grid)
    rows = []
    for m in m_grid:
        m = parse_rational(m)
        z = localized_input(w, m)
        e_q = expect(q, z)
        running = _running_max(truncated_values(z, top))
        for n_max in n_grid:
            kappa = max(running[n_max - 1], e_q)
            rows.append(Example2Row(m, n_max, kappa, example2_closed_form(m, n_max), kappa - kappa_dual))
    return Example2Report(kappa_dual, tuple(rows))


@dataclass(frozen=True)
class WitnessCheck:
    m: Fraction
    max_expectation: Fraction
    q_expectation: Fraction
    outside_a_m: bool

    @property
    def holds(self) -> bool:
        return self.max_expectation <= 0 and self.q_expectation == 0


DEFAULT_D = (Fraction(3, 8), Fraction(7, 16))
DEFAULT_D_PRIME = (Fraction(5, 16), Fraction(3, 8))


def example2_witness(
    m: RationalLike,
    n_max: int,
    d: Tuple[Fraction, Fraction] = DEFAULT_D,
    d_prime: Tuple[Fraction, Fraction] = DEFAULT_D_PRIME,
) -> WitnessCheck:
    """Z = 1_D - 1_D' - m 1_B: E_{P_n}[Z] <= 0 for n <= N and E_Q[Z] = 0"""
    m = parse_rational(m)
    z = PiecewiseRationalFunction.indicator(*d) - PiecewiseRationalFunction.indicator(*d_prime) - indicator_b().scale(m)
    a_hi = Fraction(1, m.numerator // m.denominator + 1) if m >= 0 else ONE
    outside = min(d[0], d_prime[0]) >= a_hi
    return WitnessCheck(m, max(truncated_values(z, n_max)), expect(q_half(), z), outside)
