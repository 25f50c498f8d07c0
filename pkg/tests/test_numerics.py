from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptrestrict.numerics import (
    LinearProgram,
    StructuralError,
    check_duality,
    identity,
    lp_solve,
    rank,
    solve_linear,
    to_fraction,
)
from gptrestrict.numerics.lp import verify_ray
from gptrestrict.numerics.surd import NormExpression, compare, from_json_number, to_json_number

from oracles import brute_optimum, random_lp, seeded


def test_unit_box_maximum():
    prog = LinearProgram.build(1, ub=[([1], 1)], objective=[1], maximize=True)
    out = lp_solve(prog)
    assert out.status == "optimal"
    assert out.value == 1
    assert check_duality(prog, out)


def test_empty_box_has_certificate():
    prog = LinearProgram.build(1, ub=[([1], -1)])
    out = lp_solve(prog)
    assert out.status == "infeasible"
    assert out.certificate.verify(prog)


def test_two_outcome_mixture_weights():
    prog = LinearProgram.build(2, eq=[([1, 1], 1), ([F(1, 2), F(1, 4)], F(3, 8))])
    out = lp_solve(prog)
    assert out.feasible
    assert list(out.x) == [F(1, 2), F(1, 2)]


def test_unbounded_ray():
    prog = LinearProgram.build(2, ub=[([1, -1], 1)], objective=[1, 1], maximize=True)
    out = lp_solve(prog)
    assert out.status == "unbounded"
    assert verify_ray(prog, out)


def test_free_variable_can_go_negative():
    prog = LinearProgram.build(1, eq=[([1], -3)], free=[0])
    out = lp_solve(prog)
    assert list(out.x) == [F(-3)]


def test_dimension_mismatch_is_structural():
    with pytest.raises(StructuralError):
        LinearProgram.build(2, eq=[([1, 2, 3], 0)])
    with pytest.raises(StructuralError):
        LinearProgram.build(2, objective=[1])


def test_rank_examples():
    assert rank(identity(3)) == 3
    assert rank([[0] * 4, [0] * 4]) == 0
    assert rank([[1, -1, 1], [1, -1, -1]]) == 2


def test_solve_linear_examples():
    sol = solve_linear(identity(2), [1, 2])
    assert sol.x == [1, 2] and not sol.underdetermined
    sol = solve_linear([[1, 1]], [1])
    assert sol.underdetermined
    assert sol.x[0] + sol.x[1] == 1
    assert solve_linear([[1, 0], [1, 0]], [0, 1]) is None


def test_float_input_becomes_short_rational():
    assert to_fraction(0.6) == F(3, 5)


def test_lp_matches_vertex_enumeration():
    rng = seeded(11)
    for _ in range(60):
        prog = random_lp(rng, bounded=True)
        out = lp_solve(prog)
        best = brute_optimum(prog)
        if best is None:
            assert out.status == "infeasible"
            assert out.certificate.verify(prog)
        else:
            assert out.status == "optimal"
            assert out.value == best
            assert check_duality(prog, out)


small = st.integers(-4, 4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small, st.integers(-4, 8)), min_size=1, max_size=4), small, small)
def test_lp_outcomes_certify_themselves(rows, c1, c2):
    prog = LinearProgram.build(2, ub=[([a, b], r) for a, b, r in rows], objective=[c1, c2])
    out = lp_solve(prog)
    if out.status == "infeasible":
        assert out.certificate.verify(prog)
    elif out.status == "unbounded":
        assert verify_ray(prog, out)
    else:
        assert prog.satisfied_by(out.x)
        assert check_duality(prog, out)


def test_norm_expression_sign_by_squaring():
    x = NormExpression.of(1, F(1, 2), -1)  # 1 - sqrt(1/2)
    assert x.sign() == 1
    assert compare(x, F(29, 100)) == 1
    assert compare(x, F(3, 10)) == -1


def test_norm_expression_collapses_rational_roots():
    assert NormExpression.of(F(1, 2), F(1, 4)) == F(1)
    assert isinstance(NormExpression.of(F(1, 2), F(1, 4)), F)


def test_norm_expression_equivalent_radicands_merge():
    x = NormExpression(0, [(1, 2), (-F(1, 2), 8)])  # sqrt(2) - sqrt(8)/2 = 0
    assert x.terms == ()
    assert x == 0


def test_two_surd_comparison():
    a = NormExpression(0, [(1, 2), (1, 3)])
    b = NormExpression(0, [(1, 5), (1, F(3, 10))])
    assert compare(a, b) == (1 if float(a) > float(b) else -1)


@settings(max_examples=80, deadline=None)
@given(st.fractions(-3, 3, max_denominator=20), st.fractions(0, 4, max_denominator=20),
       st.fractions(-3, 3, max_denominator=20))
def test_norm_expression_order_matches_floats(c, n, r):
    x = NormExpression.of(c, n, 1)
    exact = compare(x, r)
    approx = float(x) - float(r)
    if abs(approx) > 1e-9:
        assert exact == (1 if approx > 0 else -1)


def test_number_json_round_trip():
    for x in (F(3, 7), NormExpression.of(1, F(1, 2), -1), NormExpression(1, [(1, 2), (2, 3)])):
        assert from_json_number(to_json_number(x)) == x
