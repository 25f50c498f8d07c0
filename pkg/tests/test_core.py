import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptrestrict.core import (
    Ball,
    Effect,
    Meter,
    Polytope,
    SymbolicEffect,
    decompose_indecomposable,
    dichotomic_meter,
    effect_set_vertices,
    evaluate,
    extreme_rays_of_dual_cone,
    is_extreme_effect,
    is_indecomposable,
    is_trivial,
    lambda_max,
    lambda_min,
    meter_range,
    trivial_meter,
)
from gptrestrict.errors import DomainError, ResourceError, ValidationError
from gptrestrict.numerics import compare
from gptrestrict.numerics.surd import NormExpression
from gptrestrict.sampling import random_effect, random_meter

HALF = F(1, 2)
QUBIT = Ball(3)


def e(c, *v):
    return Effect(F(c), tuple(F(x) for x in v))


def test_unit_evaluates_to_one(square):
    assert evaluate(square.unit, (F(1, 3), F(-1, 2)), square) == 1


def test_evaluate_at_vertices(square):
    f = e(HALF, HALF, 0)
    assert evaluate(f, (1, 1), square) == 1
    assert evaluate(f, (-1, 1), square) == 0


def test_evaluate_outside_is_domain_error(square):
    with pytest.raises(DomainError):
        evaluate(square.unit, (2, 0), square)


def test_qubit_projector_extremes():
    p = e(HALF, 0, 0, HALF)
    assert lambda_max(p, QUBIT) == 1
    assert lambda_min(p, QUBIT) == 0


def test_irrational_ball_extremes_are_exact():
    f = e(HALF, F(1, 4), F(1, 4), 0)
    top = lambda_max(f, QUBIT)
    assert isinstance(top, NormExpression)
    assert compare(top, F(85, 100)) == 1 and compare(top, F(86, 100)) == -1


def test_square_edge_effect_extremes(square):
    f = e(HALF, HALF, 0)
    assert lambda_max(f, square) == 1
    assert lambda_min(f, square) == 0


def test_dichotomic_identity(square):
    m = dichotomic_meter(square, e(F(1, 3), F(1, 6), F(1, 12)))
    assert square.lambda_max(m[1]) == 1 - square.lambda_min(m[0])


def test_range_of_dichotomic(square):
    f = e(HALF, HALF, 0)
    rng = meter_range(dichotomic_meter(square, f))
    assert set(rng) == {square.zero, f, f.complement(), square.unit}


def test_range_of_uniform_trivial(square):
    rng = meter_range(trivial_meter(square, [HALF, HALF]))
    assert set(rng) == {square.zero, square.unit * HALF, square.unit}


def test_range_cap(square):
    m = trivial_meter(square, [F(1, 21)] * 21)
    with pytest.raises(ResourceError):
        meter_range(m)


def test_trivial_detection(square, edge_x):
    assert is_trivial(trivial_meter(square, [F(1, 4), F(3, 4)]))
    assert not is_trivial(edge_x)


def test_indecomposable_examples(square):
    assert is_indecomposable(e(HALF, HALF, 0), square)
    assert not is_indecomposable(square.unit, square)
    assert is_indecomposable(e(HALF, 0, 0, HALF), QUBIT)
    with pytest.raises(DomainError):
        is_indecomposable(square.zero, square)


def test_ball_decomposition_examples():
    p = e(HALF, 0, 0, HALF)
    assert decompose_indecomposable(p, QUBIT) == [p]
    parts = decompose_indecomposable(QUBIT.unit, QUBIT)
    assert parts == [e(HALF, 0, 0, HALF), e(HALF, 0, 0, -HALF)]


def test_ball_decomposition_with_irrational_norm():
    f = e(HALF, F(1, 4), F(1, 4), 0)
    parts = decompose_indecomposable(f, QUBIT)
    assert all(isinstance(p, SymbolicEffect) for p in parts)
    # constants and scales add up exactly
    assert parts[0].constant + parts[1].constant == HALF
    assert parts[0].scale + parts[1].scale == 1


def test_square_unit_splits_into_two(square):
    parts = decompose_indecomposable(square.unit, square)
    assert len(parts) == 2
    assert parts[0] + parts[1] == square.unit
    assert all(is_indecomposable(p, square) for p in parts)


def test_polytope_must_be_minimal():
    with pytest.raises(ValidationError):
        Polytope([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))])


def test_polytope_must_be_full_dimensional():
    with pytest.raises(ValidationError):
        Polytope([(0, 0), (1, 1), (2, 2)])


def test_meter_normalization_is_enforced(square):
    with pytest.raises(ValidationError) as info:
        Meter(square, (e(F(9, 20), HALF, 0), e(F(9, 20), -HALF, 0)))
    assert any("normalization violated" in v for v in info.value.violations)


def test_violations_name_the_vertex(square):
    msgs = square.effect_violations(e(F(-1, 10), 0, 0))
    assert "vertex 0 (1, 1)" in msgs[0]


def test_square_effect_set_has_six_vertices(square):
    verts = effect_set_vertices(square)
    assert len(verts) == 6
    assert all(is_extreme_effect(v, square) for v in verts)


def test_square_dual_cone_rays(square):
    rays = extreme_rays_of_dual_cone(square)
    assert sorted(rays, key=lambda r: r.vector) == sorted(
        [e(HALF, HALF, 0), e(HALF, -HALF, 0), e(HALF, 0, HALF), e(HALF, 0, -HALF)], key=lambda r: r.vector)


def pentagon():
    return Polytope([(2, 0), (1, 2), (-1, 2), (-2, 0), (0, -2)])


@pytest.mark.parametrize("space_factory", [lambda: Polytope([(1, 1), (1, -1), (-1, 1), (-1, -1)]), pentagon])
def test_random_meters_satisfy_extreme_sums(space_factory):
    space = space_factory()
    rng = random.Random(3)
    for _ in range(20):
        m = random_meter(space, rng)
        lo = sum(space.lambda_min(x) for x in m.effects)
        hi = sum(space.lambda_max(x) for x in m.effects)
        assert lo <= 1 <= hi


def test_max_is_attained_at_a_vertex(square):
    rng = random.Random(5)
    for _ in range(20):
        f = random_effect(square, rng)
        top = square.lambda_max(f)
        for _ in range(30):
            x = (F(rng.randint(-20, 20), 20), F(rng.randint(-20, 20), 20))
            assert f(x) <= top


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_polytope_decomposition_resums(seed):
    space = pentagon()
    f = random_effect(space, random.Random(seed))
    if f.is_zero():
        return
    parts = decompose_indecomposable(f, space)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    assert total == f
    assert all(is_indecomposable(p, space) for p in parts)


def test_inscribed_polygon_agrees_with_disc_on_touching_effects():
    # an effect vanishing at a vertex of an inscribed octagon is rank one on the disc too
    disc = Ball(2)
    pts = [(1, 0), (0, 1), (-1, 0), (0, -1),
           (F(3, 5), F(4, 5)), (F(-3, 5), F(4, 5)), (F(-3, 5), F(-4, 5)), (F(3, 5), F(-4, 5))]
    poly = Polytope(pts)
    for x, y in pts:
        f = e(HALF, -HALF * x, -HALF * y)
        assert is_indecomposable(f, disc)
        assert poly.lambda_min(f) == 0
        # on the polygon the zero set is a single vertex, so it is not a ray there
        assert not is_indecomposable(f, poly)


def circle_polygon(m):
    """Rational points on the unit circle from t = k/m, k in [-m, m], and their mirror images."""
    pts = set()
    for k in range(-m, m + 1):
        t = F(k, m)
        x, y = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
        pts.update({(x, y), (-x, y)})
    return Polytope(sorted(pts))


def rank_one_defect(space):
    worst = F(0)
    for r in extreme_rays_of_dual_cone(space):
        c, n = r.constant, r.norm_sq
        worst = max(worst, abs(c * c - n) / (c * c))
    return worst


def test_polygon_rays_tend_to_rank_one_disc_effects():
    # edge-vanishing effects of finer inscribed polygons approach c^2 = |v|^2
    coarse, fine = rank_one_defect(circle_polygon(2)), rank_one_defect(circle_polygon(6))
    assert fine < coarse
    assert fine < F(1, 10)
