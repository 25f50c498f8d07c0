import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptrestrict.core import Effect, Meter, Polytope, dichotomic_meter, trivial_meter
from gptrestrict.errors import DomainError, UnsupportedError, ValidationError
from gptrestrict.numerics import rank
from gptrestrict.qubit import QUBIT
from gptrestrict.sampling import random_dichotomic, random_meter, ray_meters
from gptrestrict.simulation import (
    CERTIFIED,
    NOT_CERTIFIED,
    UNDECIDED,
    PostProcessing,
    certify_n_tomic,
    check_closure_axioms,
    mix,
    normalize_dichotomic,
    post_process,
    random_simulation,
    simulable,
)

HALF = F(1, 2)


def e(c, *v):
    return Effect(F(c), tuple(F(x) for x in v))


def test_identity_post_processing(edge_x):
    assert post_process(PostProcessing.identity(2), edge_x) == edge_x


def test_merging_gives_unit(square, edge_x):
    merged = post_process(PostProcessing(((1,), (1,))), edge_x)
    assert merged.effects == (square.unit,)


def test_swap_relabels(edge_x):
    swapped = post_process(PostProcessing(((0, 1), (1, 0))), edge_x)
    assert swapped.effects == (edge_x[1], edge_x[0])


def test_post_processing_must_be_stochastic():
    with pytest.raises(ValidationError):
        PostProcessing(((HALF, HALF), (1, 1)))
    with pytest.raises(ValidationError):
        PostProcessing(((F(3, 2), -HALF),))


def test_post_processing_row_count(edge_x):
    with pytest.raises(DomainError):
        post_process(PostProcessing.identity(3), edge_x)


def test_mix_examples(square, edge_x, edge_y):
    assert mix([edge_x, edge_x], [HALF, HALF]) == edge_x
    t = mix([trivial_meter(square, [HALF, HALF]), trivial_meter(square, [1, 0])], [HALF, HALF])
    assert t.effects == (square.unit * F(3, 4), square.unit * F(1, 4))
    m = mix([edge_x, edge_y], [HALF, HALF])
    # on the square (+-1, +-1) both mixed effects reach 1 at a corner
    assert [square.lambda_max(x) for x in m.effects] == [1, 1]


def test_mix_on_diamond_reaches_three_quarters():
    diamond = Polytope([(1, 0), (0, 1), (-1, 0), (0, -1)])
    a = dichotomic_meter(diamond, e(HALF, HALF, 0))
    b = dichotomic_meter(diamond, e(HALF, 0, HALF))
    m = mix([a, b], [HALF, HALF])
    assert [diamond.lambda_max(x) for x in m.effects] == [F(3, 4), F(3, 4)]


def test_mix_pads_with_zero_outcomes(square, edge_x):
    three = Meter(square, (square.unit * HALF, square.unit * F(1, 4), square.unit * F(1, 4)))
    m = mix([edge_x, three], [HALF, HALF])
    assert len(m) == 3
    assert m[2] == square.unit * F(1, 8)


def test_mix_rejects_bad_weights(edge_x):
    with pytest.raises(DomainError):
        mix([edge_x, edge_x], [HALF, F(1, 3)])


def test_generator_is_its_own_simulation(edge_x, edge_y):
    w = simulable(edge_x, [edge_x, edge_y])
    assert w.feasible and w.verify()
    assert w.weights == (1, 0)
    assert w.post_processings[0] == PostProcessing.identity(2)


def test_trivial_from_any_simulator(square, edge_y):
    w = simulable(trivial_meter(square, [F(1, 3), F(1, 6), HALF]), [edge_y])
    assert w.feasible and w.verify()


def test_other_edge_is_not_simulable(edge_x, edge_y):
    res = simulable(edge_y, [edge_x])
    assert not res.feasible
    assert res.verify()
    # independent oracle: the y effect is outside span{u, x effect}
    assert rank([edge_x[0].vector, edge_x[1].vector, edge_y[0].vector]) == 3


def test_mixed_spaces_unsupported(edge_x):
    diamond = Polytope([(1, 0), (0, 1), (-1, 0), (0, -1)])
    with pytest.raises(UnsupportedError):
        simulable(edge_x, [dichotomic_meter(diamond, e(HALF, HALF, 0))])


def test_ball_simulation_uses_same_linear_program():
    p = e(HALF, 0, 0, HALF)
    sharp = dichotomic_meter(QUBIT, p)
    soft = dichotomic_meter(QUBIT, e(HALF, 0, 0, F(1, 4)))
    assert simulable(soft, [sharp]).feasible
    assert not simulable(sharp, [soft]).feasible


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_round_trip_of_random_simulations(seed):
    rng = random.Random(seed)
    space = Polytope([(2, 0), (1, 2), (-1, 2), (-2, 0), (0, -2)])
    gens = [random_meter(space, rng) for _ in range(2)]
    target = random_simulation(rng, gens, rng.randint(2, 3))
    w = simulable(target, gens)
    assert w.feasible
    assert w.reconstruct() == target
    assert all(r.is_zero() for r in w.residual())


def test_closure_axioms_small_run(edge_x, edge_y, square):
    gens = [edge_x, edge_y, trivial_meter(square, [HALF, HALF])]
    rep = check_closure_axioms(gens, samples=20, seed=4)
    assert rep.ok
    assert rep.sim1_checked == 3


def test_normalize_already_sharp(edge_x):
    a, nu = normalize_dichotomic(edge_x)
    assert a == edge_x
    assert nu == PostProcessing.identity(2)


def test_normalize_soft_edge(square):
    soft = dichotomic_meter(square, e(HALF, F(1, 4), 0))
    a, nu = normalize_dichotomic(soft)
    assert a[0] == e(HALF, HALF, 0)
    assert nu.matrix == ((F(3, 4), F(1, 4)), (F(1, 4), F(3, 4)))
    assert post_process(nu, a) == soft


def test_normalize_rejects_trivial(square):
    with pytest.raises(DomainError):
        normalize_dichotomic(trivial_meter(square, [HALF, HALF]))


def test_normalize_random_dichotomic(square):
    rng = random.Random(8)
    for _ in range(20):
        m = random_dichotomic(square, rng)
        if all(x.is_constant() for x in m.effects):
            continue
        a, nu = normalize_dichotomic(m)
        assert [square.lambda_max(x) for x in a.effects] == [1, 1]
        assert [square.lambda_min(x) for x in a.effects] == [0, 0]
        assert post_process(nu, a) == m


def test_dichotomic_is_two_tomic(edge_x):
    cert = certify_n_tomic(edge_x, 2)
    assert cert.verdict == CERTIFIED and cert.route == "outcome-count"


def test_three_outcome_square_example_is_not_two_tomic(square):
    # the third effect is -1 at (1, 1), so this is not a valid meter; the certificate logic needs no validity
    m = Meter(square, (e(HALF, HALF, 0), e(HALF, 0, HALF), e(0, -HALF, -HALF)), check=False)
    cert = certify_n_tomic(m, 2)
    assert cert.verdict == NOT_CERTIFIED
    assert cert.route == "max-sum-exceeds"
    assert cert.evidence["sum"] == 3


def test_trit_sharp_meter_is_not_two_tomic():
    trit = Polytope([(0, 0), (1, 0), (0, 1)])
    m = Meter(trit, (e(1, -1, -1), e(0, 1, 0), e(0, 0, 1)))
    assert certify_n_tomic(m, 2).verdict == NOT_CERTIFIED
    assert certify_n_tomic(m, 3).verdict == CERTIFIED


def test_drop_one_route(square):
    m = Meter(square, (square.unit * F(1, 4), square.unit * F(1, 4), square.unit * HALF))
    cert = certify_n_tomic(m, 2)
    assert cert.verdict == CERTIFIED and cert.route == "max-sum-drop-one"
    assert cert.recheck(m)


def test_certificate_monotone_in_n():
    rng = random.Random(2)
    trit = Polytope([(0, 0), (1, 0), (0, 1)])
    for _ in range(30):
        m = random_meter(trit, rng, 4)
        for n in (2, 3):
            if certify_n_tomic(m, n).verdict == CERTIFIED:
                assert certify_n_tomic(m, n + 1).verdict == CERTIFIED


def test_n_outcome_simulations_respect_the_sum_bound():
    rng = random.Random(6)
    trit = Polytope([(0, 0), (1, 0), (0, 1)])
    dich = [random_dichotomic(trit, rng) for _ in range(3)]
    for _ in range(20):
        m = random_simulation(rng, dich, 4)
        total = sum(trit.lambda_max(x) for x in m.effects)
        assert total <= 2
        assert certify_n_tomic(m, 2).verdict != NOT_CERTIFIED


def test_ray_meters_of_square(square):
    rm = ray_meters(square)
    assert len(rm) == 2
    assert all(len(m) == 2 for m in rm)


def test_square_meters_are_certified_by_ray_basis(square):
    # no sum criterion applies, but every square meter is simulable from the two sharp edge meters
    third = F(1, 3)
    m = Meter(square, (e(third, third, 0), e(third, -F(1, 6), F(1, 6)), e(third, -F(1, 6), -F(1, 6))))
    cert = certify_n_tomic(m, 2)
    assert cert.verdict == CERTIFIED
    assert cert.route == "simulation-witness"
    assert cert.recheck(m)
    assert all(len(b) == 2 for b in cert.evidence["witness"].simulators)


def test_undecided_when_no_criterion_applies():
    trit = Polytope([(0, 0), (1, 0), (0, 1)])
    # vertex values (2/3, 1/3, 0) and its cyclic shifts
    m = Meter(trit, (e(F(2, 3), -F(1, 3), -F(2, 3)), e(0, F(2, 3), F(1, 3)), e(F(1, 3), -F(1, 3), F(1, 3))))
    cert = certify_n_tomic(m, 2)
    assert cert.verdict == UNDECIDED
    assert cert.evidence["sum"] == 2
    # the trit basis contains the sharp three-outcome meter, so the witness route is unavailable
    assert max(len(b) for b in ray_meters(trit)) == 3


