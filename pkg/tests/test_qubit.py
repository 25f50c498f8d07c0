import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gptrestrict.core import Effect
from gptrestrict.errors import DomainError, UnsupportedError, ValidationError
from gptrestrict.numerics.surd import compare
from gptrestrict.qubit import (
    QUBIT,
    UdMeter,
    bloch_pair,
    depolarize_effect,
    in_noisy_effects,
    inscribed_polytope,
    octahedron,
    overlap_sq,
    projector,
    shifted_depolarize_effect,
    sphere_point,
    ud_dichotomic_bound,
    ud_max_valid_q,
    ud_not_2tomic_certificate,
    ud_polytope_optimum,
    ud_success,
    ud_unrestricted_optimum,
)
from gptrestrict.simulation import CERTIFIED, NOT_CERTIFIED, UNDECIDED, certify_n_tomic

HALF = F(1, 2)
overlaps = st.fractions(min_value=F(1, 100), max_value=F(99, 100), max_denominator=100)


def test_bloch_pair_has_requested_overlap():
    for o in (F(1, 2), F(9, 10), F(1, 10), F(0), F(1)):
        n1, n2 = bloch_pair(o)
        assert overlap_sq(n1, n2) == o


def test_bloch_pair_without_rational_solution():
    # 3/4 is not a sum of two rational squares
    with pytest.raises(UnsupportedError):
        bloch_pair(F(1, 4))


def test_projector_values():
    p = projector((0, 0, 1))
    assert p((0, 0, 1)) == 1 and p((0, 0, -1)) == 0
    assert QUBIT.is_valid_effect(p)


def test_dichotomic_bound_example():
    assert ud_dichotomic_bound(overlap=HALF) == F(1, 4)


def test_unrestricted_optimum_example():
    opt = ud_unrestricted_optimum(overlap=HALF)
    assert abs(float(opt) - (1 - math.sqrt(0.5))) < 1e-15
    assert ud_unrestricted_optimum(overlap=F(1, 4)) == HALF


def test_constrained_optimum_saturates_bound():
    res = ud_max_valid_q(overlap=HALF, constraint="q1_plus_q2_le_1")
    assert (res.q1, res.q2) == (HALF, HALF)
    m = UdMeter.from_overlap(res.q1, res.q2, HALF)
    assert m.is_valid()
    assert ud_success(m) == res.exact == F(1, 4)


@settings(max_examples=20, deadline=None)
@given(overlaps)
def test_grid_search_matches_closed_form(o):
    res = ud_max_valid_q(overlap=o)
    assert abs(res.success - (1 - math.sqrt(o))) < 1e-6
    assert compare(ud_dichotomic_bound(overlap=o), ud_unrestricted_optimum(overlap=o)) < 0


@settings(max_examples=30, deadline=None)
@given(overlaps, overlaps)
def test_bounds_decrease_with_overlap(a, b):
    lo, hi = min(a, b), max(a, b)
    assert ud_dichotomic_bound(overlap=hi) <= ud_dichotomic_bound(overlap=lo)
    assert compare(ud_unrestricted_optimum(overlap=hi), ud_unrestricted_optimum(overlap=lo)) <= 0


def test_numpy_and_default_kernels_agree():
    from gptrestrict import _kernels
    a = _kernels.scan_numpy(0.0, 401, False)
    b = _kernels.scan(0.0, 401, False)
    assert a == pytest.approx(b)


def test_identical_states_are_rejected():
    with pytest.raises(DomainError):
        ud_max_valid_q(overlap=1)


def test_ud_meter_validity_boundary():
    # at overlap 1/2 the symmetric optimum is q = 2 - sqrt 2 ~ 0.5858
    assert UdMeter.from_overlap(F(585, 1000), F(585, 1000), HALF).is_valid()
    m = UdMeter.from_overlap(F(3, 5), F(3, 5), HALF)
    assert not m.is_valid()
    with pytest.raises(ValidationError):
        m.meter()


def test_not_2tomic_certificate_above_half():
    m = UdMeter.from_overlap(F(11, 20), F(11, 20), HALF)
    cert = ud_not_2tomic_certificate(m)
    assert cert.verdict == NOT_CERTIFIED
    assert cert.route == "indecomposable-family"
    assert cert.evidence["sum"] == F(11, 10)


def test_low_q_is_undecided_then_certified_by_sum():
    m = UdMeter.from_overlap(F(2, 5), F(2, 5), HALF)
    assert ud_not_2tomic_certificate(m).verdict == UNDECIDED
    cert = certify_n_tomic(m.meter(), 2)
    assert cert.verdict == CERTIFIED
    assert cert.recheck(m.meter())


def test_orthogonal_states_are_rejected():
    m = UdMeter(1, 1, (0, 0, 1), (0, 0, -1))
    with pytest.raises(DomainError):
        ud_not_2tomic_certificate(m)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=F(1, 20), max_value=1, max_denominator=20),
       st.fractions(min_value=-1, max_value=1, max_denominator=10),
       st.fractions(min_value=-1, max_value=1, max_denominator=10))
def test_depolarizing_dual_is_injective(t, a, b):
    e = projector(sphere_point(a, b))
    f = projector(sphere_point(b, a))
    assert (depolarize_effect(e, t) == depolarize_effect(f, t)) == (e == f)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=20),
       st.fractions(min_value=-2, max_value=2, max_denominator=10),
       st.fractions(min_value=-2, max_value=2, max_denominator=10))
def test_shifted_depolarize_lands_in_noisy_effects(t, a, b):
    e = projector(sphere_point(a, b))
    xi = tuple(x / 2 for x in sphere_point(b, a))
    g = shifted_depolarize_effect(e, t, xi)
    assert in_noisy_effects(g, t)
    assert in_noisy_effects(depolarize_effect(e, t), t)


def test_sharp_effect_is_not_noisy():
    assert not in_noisy_effects(projector((1, 0, 0)), F(99, 100))
    assert in_noisy_effects(projector((1, 0, 0)), 1)


def test_inscribed_polytope_vertices_are_on_sphere():
    poly = inscribed_polytope(20)
    assert len(poly.vertices) == 20
    assert all(sum(x * x for x in v) == 1 for v in poly.vertices)


@pytest.mark.parametrize("space", [octahedron(), inscribed_polytope(20)], ids=["octahedron", "20-vertex"])
def test_polytope_ud_value_bounds_the_ball(space):
    # fewer states means more effects, so the polytope value is an upper bound
    n1, n2 = (0, 0, 1), (1, 0, 0)
    out = ud_polytope_optimum(space, n1, n2)
    ball = ud_unrestricted_optimum(n1, n2)
    assert out.feasible
    assert compare(out.value, ball) >= 0


def test_effect_of_noisy_qubit():
    e = Effect(HALF, (F(1, 4), 0, 0))
    assert in_noisy_effects(e, HALF)
    assert not in_noisy_effects(e, F(49, 100))


def test_env_flag_selects_numpy_path():
    import os
    import subprocess
    import sys
    code = "from gptrestrict import _kernels, qubit; print(_kernels.HAVE_NUMBA, qubit.ud_max_valid_q(overlap=0.5).success)"
    env = dict(os.environ, GPTRESTRICT_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    flag, value = out.stdout.split()
    assert flag == "False"
    assert abs(float(value) - (1 - math.sqrt(0.5))) < 1e-6


def preimage(e, t):
    """An effect ``g`` and state ``xi`` with ``shifted_depolarize_effect(g, t, xi) == e`` (axis-aligned ``v``)."""
    c, a = e.constant, e.linear[0]
    m = abs(a) / t
    cg = min(max(c, m), 1 - m)
    if a == 0:
        return Effect(c, (F(0),) * 3), (F(0),) * 3
    alpha = (c - cg) * t / ((1 - t) * abs(a))
    sign = 1 if a > 0 else -1
    return Effect(cg, (a / t, F(0), F(0))), (alpha * sign, F(0), F(0))


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20),
       st.fractions(min_value=-1, max_value=1, max_denominator=30),
       st.fractions(min_value=0, max_value=1, max_denominator=30))
def test_noisy_effects_are_shifted_depolarizations(t, a_frac, c_frac):
    a = a_frac * t / 2
    c = abs(a) + c_frac * (1 - 2 * abs(a))
    e = Effect(c, (a, F(0), F(0)))
    assert in_noisy_effects(e, t)
    g, xi = preimage(e, t)
    assert QUBIT.is_valid_effect(g)
    assert sum(x * x for x in xi) <= 1
    assert shifted_depolarize_effect(g, t, xi) == e
