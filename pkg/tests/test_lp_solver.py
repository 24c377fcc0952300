import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robust_localization.errors import MalformedProgramError, PivotLimitExceeded
from robust_localization.lp_solver import (
    LinearProgram,
    LpOutcome,
    LpStatus,
    Relation,
    Sense,
    solve,
    verify_certificates,
    vertex_optimum,
)
from robust_localization.sampling import CYCLING_PROGRAMS, linear_program, vertex_comparable

F = Fraction


def test_bounded_maximum():
    lp = LinearProgram.build([1], Sense.MAX, [([1], Relation.LE, 5)], lower=[0])
    outcome = solve(lp)
    assert outcome.status == LpStatus.OPTIMAL
    assert outcome.primal == (5,)
    assert outcome.objective_value == 5
    assert verify_certificates(lp, outcome)


def test_unbounded_maximum_has_improving_ray():
    lp = LinearProgram.build([1], Sense.MAX, lower=[0])
    outcome = solve(lp)
    assert outcome.status == LpStatus.UNBOUNDED
    assert outcome.ray == (1,)
    assert verify_certificates(lp, outcome)


def test_infeasible_program_has_farkas_vector():
    lp = LinearProgram.build([1], Sense.MIN, [([1], Relation.LE, -1)], lower=[0])
    outcome = solve(lp)
    assert outcome.status == LpStatus.INFEASIBLE
    assert outcome.farkas is not None
    assert verify_certificates(lp, outcome)


def test_two_variable_optimum_matches_vertex_enumeration():
    lp = LinearProgram.build(
        [1, 1], Sense.MAX,
        [([1, 2], Relation.LE, 4), ([3, 1], Relation.LE, 6)],
        lower=[0, 0],
    )
    outcome = solve(lp)
    assert outcome.primal == (F(8, 5), F(6, 5))
    assert outcome.objective_value == F(14, 5)
    assert vertex_optimum(lp) == F(14, 5)
    assert verify_certificates(lp, outcome)


def test_free_variables_with_equalities():
    lp = LinearProgram.build([1, 1], Sense.MIN, [([1, 1], Relation.EQ, 1), ([1, -1], Relation.EQ, 0)])
    outcome = solve(lp)
    assert outcome.primal == (F(1, 2), F(1, 2))
    assert verify_certificates(lp, outcome)


def test_tampered_certificates_are_rejected():
    lp = LinearProgram.build([1], Sense.MAX, [([1], Relation.LE, 5)], lower=[0])
    outcome = solve(lp)
    wrong_value = LpOutcome(LpStatus.OPTIMAL, primal=(F(4),), dual=outcome.dual, objective_value=F(4))
    assert not verify_certificates(lp, wrong_value)
    flipped = LpOutcome(LpStatus.INFEASIBLE, farkas=tuple(-y for y in outcome.dual))
    assert not verify_certificates(lp, flipped)


@pytest.mark.parametrize("lp,expected", zip(CYCLING_PROGRAMS, [F(-1, 20), F(-1)]))
def test_cycling_examples_terminate(lp, expected):
    outcome = solve(lp)
    assert outcome.status == LpStatus.OPTIMAL
    assert outcome.objective_value == expected
    assert verify_certificates(lp, outcome)


def test_pivot_limit():
    lp = LinearProgram.build([1, 1], Sense.MAX, [([1, 2], Relation.LE, 4)], lower=[0, 0])
    with pytest.raises(PivotLimitExceeded) as info:
        solve(lp, max_pivots=0)
    assert info.value.limit == 0


def test_trace_records_pivots():
    lp = LinearProgram.build([1], Sense.MAX, [([1], Relation.LE, 5)], lower=[0])
    trace = io.StringIO()
    solve(lp, trace=trace)
    assert "phase 1 pivot 0: enter x0+" in trace.getvalue()


def test_malformed_programs():
    with pytest.raises(MalformedProgramError):
        LinearProgram.build([1, 1], Sense.MIN, [([1], Relation.LE, 1)])
    with pytest.raises(MalformedProgramError):
        LinearProgram.build([1], Sense.MIN, lower=[2], upper=[1])
    with pytest.raises(MalformedProgramError):
        LinearProgram.build([])


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_random_programs_carry_valid_certificates(seed):
    rng = random.Random(seed)
    lp = linear_program(rng, rng.randint(1, 6), rng.randint(0, 8))
    assert verify_certificates(lp, solve(lp))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_boxed_programs_agree_with_vertex_enumeration(seed):
    rng = random.Random(seed)
    lp = linear_program(rng, rng.randint(1, 6), rng.randint(0, 8), bounded=True)
    outcome = solve(lp)
    assert outcome.status != LpStatus.UNBOUNDED
    assert verify_certificates(lp, outcome)
    if not vertex_comparable(lp):
        return
    if outcome.is_optimal:
        assert outcome.objective_value == vertex_optimum(lp)
    else:
        assert vertex_optimum(lp) is None


def test_sampled_programs_have_rational_data():
    rng = random.Random(5)
    programs = [linear_program(rng, 6, 8, bounded=True) for _ in range(5)]
    assert all(lp.n_vars == 6 and len(lp.rows) == 8 for lp in programs)
    entries = [a for lp in programs for row in lp.rows for a in row]
    assert any(a.denominator > 1 for a in entries)
    assert all(abs(a.numerator) <= 10 and a.denominator <= 10 for a in entries)
    assert not vertex_comparable(programs[0])
