"""Effect and meter restrictions and their (R1)/(R2)/(R3) classification.

Effect restrictions are convex hulls of finitely many generator effects, so
every membership question is a single exact LP.  Meter restrictions come in
three kinds: those generated by simulation from finitely many meters, those
induced by an effect restriction, and the noise family ``R_t`` of meters
``t C + (1 - t) T`` with ``T`` trivial.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import (
    Ball,
    Effect,
    Meter,
    Polytope,
    StateSpace,
    decompose_indecomposable,
    effect_set_vertices,
    is_extreme_effect,
    is_indecomposable,
    meter_range,
)
from .errors import DomainError, UnsupportedError, ValidationError
from .geometry import polytope_vertices
from .numerics import LinearProgram, compare, in_span, lp_solve, rank, to_fraction
from .numerics.surd import Number
from .sampling import ray_meters
from .simulation import (
    InfeasibilityCertificate,
    random_probability,
    simulable,
)

ZERO = Fraction(0)
ONE = Fraction(1)


# ------------------------------------------------------ effect restrictions


def hull_membership(generators: Sequence[Effect], e: Effect):
    """LP deciding whether ``e`` is a convex combination of ``generators``."""
    n = len(generators)
    dim = len(e.vector)
    eq = [([ONE] * n, ONE)]
    for j in range(dim):
        eq.append(([g.vector[j] for g in generators], e.vector[j]))
    return lp_solve(LinearProgram.build(n, eq=eq))


@dataclass(frozen=True)
class EffectRestriction:
    """The convex hull of finitely many effects on ``space``."""

    space: StateSpace
    generators: tuple[Effect, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise DomainError("an effect restriction needs at least one generator")

    def contains(self, e: Effect) -> bool:
        return hull_membership(self.generators, e).feasible

    def weights(self, e: Effect) -> list[Fraction] | None:
        out = hull_membership(self.generators, e)
        return list(out.x) if out.feasible else None

    def vertices(self) -> list[Effect]:
        """Generators that are not convex combinations of the others."""
        gens = list(dict.fromkeys(self.generators))
        keep = []
        for i, g in enumerate(gens):
            others = gens[:i] + gens[i + 1:]
            if not others or not hull_membership(others, g).feasible:
                keep.append(g)
        return keep

    def includes(self, other: "EffectRestriction") -> bool:
        return all(self.contains(g) for g in other.generators)

    def same_hull(self, other: "EffectRestriction") -> bool:
        return self.includes(other) and other.includes(self)


def full_effect_restriction(space: Polytope) -> EffectRestriction:
    return EffectRestriction(space, tuple(effect_set_vertices(space)))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def effect_restriction_validate(restriction: EffectRestriction) -> ValidationReport:
    """Check generator validity, ``o`` and ``u`` membership and complement closure."""
    space = restriction.space
    report = ValidationReport()
    for i, g in enumerate(restriction.generators):
        for msg in space.effect_violations(g):
            report.violations.append(f"generator {i}: {msg}")
    if not report.ok:
        return report
    if not restriction.contains(space.unit):
        report.violations.append("(E1) violated: u is not in the restriction")
    if not restriction.contains(space.zero):
        report.violations.append("o is not in the restriction")
    for i, g in enumerate(restriction.generators):
        if not restriction.contains(g.complement()):
            report.violations.append(
                f"(E2) violated: complement of generator {i} is missing, so ({g}, u - e) is not an allowed meter")
    return report


def is_convex_closed_restriction(restriction, probes: Iterable[Effect] = ()) -> bool:
    """Convexity of an effect restriction.

    Hull restrictions are convex by construction.  A membership oracle (any
    callable ``Effect -> bool``) is tested on midpoints and one-third points
    of every pair of accepted ``probes``.
    """
    if isinstance(restriction, EffectRestriction):
        return True
    accepts: Callable[[Effect], bool] = restriction
    accepted = [p for p in probes if accepts(p)]
    for i, a in enumerate(accepted):
        for b in accepted[i + 1:]:
            for s in (Fraction(1, 2), Fraction(1, 3)):
                if not accepts(a * s + b * (1 - s)):
                    return False
    return True


# --------------------------------------------------------------- subalgebras


@dataclass(frozen=True)
class Subalgebra:
    """``U ∩ E(S)`` with ``U`` the span of the given effects and ``u``."""

    space: StateSpace
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, e: Effect) -> bool:
        return in_span([list(b) for b in self.basis], e.vector) and self.space.is_valid_effect(e)


def subalgebra_closure(effects: Sequence[Effect], space: StateSpace) -> Subalgebra:
    vecs = [space.unit.vector] + [e.vector for e in effects]
    basis: list[tuple[Fraction, ...]] = []
    for v in vecs:
        if rank([list(b) for b in basis] + [list(v)]) > len(basis):
            basis.append(tuple(v))
    return Subalgebra(space, tuple(basis))


@dataclass
class SubalgebraReport:
    is_subalgebra: bool
    span_dim: int
    hull_dim: int
    vertices_checked: int
    missing: list[Effect] = field(default_factory=list)


def is_subalgebra(restriction: EffectRestriction) -> SubalgebraReport:
    """Whether ``hull(E)`` equals ``span(E ∪ {u}) ∩ E(S)``.

    The hull always lies inside the span and inside ``E(S)``.  The reverse
    inclusion is tested by enumerating the vertices of the polytope
    ``U ∩ E(S)`` in basis coordinates and checking hull membership of each.
    """
    space = restriction.space
    if not isinstance(space, Polytope):
        raise UnsupportedError("subalgebra test needs a polytope state space")
    sub = subalgebra_closure(restriction.generators, space)
    hull_dim = rank([list(g.vector) for g in restriction.generators])
    a_ub, b_ub = [], []
    for row in space.embedded:
        vals = [sum(b[j] * row[j] for j in range(len(row))) for b in sub.basis]
        a_ub.append([-x for x in vals])
        b_ub.append(ZERO)
        a_ub.append(vals)
        b_ub.append(ONE)
    coords = polytope_vertices(a_ub, b_ub)
    missing = []
    for alpha in coords:
        vec = [sum(a * b[j] for a, b in zip(alpha, sub.basis)) for j in range(space.d + 1)]
        e = Effect.from_vector(vec)
        if not restriction.contains(e):
            missing.append(e)
    return SubalgebraReport(not missing and hull_dim == sub.dim, sub.dim, hull_dim, len(coords), missing)


# ---------------------------------------------------------- noise restriction


def noise_content(meter: Meter) -> Number:
    """``w(B; T)``: the sum of the minimal values of the effects."""
    total: Number = ZERO
    for e in meter.effects:
        total = total + meter.space.lambda_min(e)
    return total


def in_noise_restriction(meter: Meter, t) -> bool:
    t = _check_t(t)
    return compare(noise_content(meter), 1 - t) >= 0


def _check_t(t) -> Fraction:
    t = to_fraction(t)
    if not 0 <= t <= 1:
        raise DomainError(f"noise parameter t = {t} is outside [0, 1]")
    return t


def noisy_effect_generators(space: Polytope, t) -> list[Effect]:
    """Hull generators ``t g + (1 - t) r u`` of the effects allowed by ``R_t``."""
    t = _check_t(t)
    u = space.unit
    out = []
    for g in effect_set_vertices(space):
        for r in (ZERO, ONE):
            out.append(g * t + u * ((1 - t) * r))
    return list(dict.fromkeys(out))


# --------------------------------------------------------- meter restrictions

SIM = "sim"
EFFECTS = "effects"
NOISE = "noise"


@dataclass(frozen=True)
class MeterRestriction:
    space: StateSpace
    kind: str
    generators: tuple[Meter, ...] = ()
    effects: EffectRestriction | None = None
    t: Fraction | None = None

    @classmethod
    def by_simulation(cls, generators: Sequence[Meter]) -> "MeterRestriction":
        gens = tuple(generators)
        if not gens:
            raise DomainError("need at least one generator meter")
        return cls(gens[0].space, SIM, generators=gens)

    @classmethod
    def by_effects(cls, restriction: EffectRestriction) -> "MeterRestriction":
        return cls(restriction.space, EFFECTS, effects=restriction)

    @classmethod
    def noise(cls, space: StateSpace, t) -> "MeterRestriction":
        return cls(space, NOISE, t=_check_t(t))

    def contains(self, meter: Meter) -> bool:
        if self.kind == SIM:
            return simulable(meter, self.generators).feasible
        if self.kind == EFFECTS:
            return all(self.effects.contains(e) for e in meter_range(meter))
        return in_noise_restriction(meter, self.t)


def effects_of_restriction(restriction: MeterRestriction) -> EffectRestriction:
    """``E_R``: the effects occurring in ranges of allowed meters, as a hull."""
    space = restriction.space
    if restriction.kind == SIM:
        gens: list[Effect] = []
        for b in restriction.generators:
            gens.extend(meter_range(b))
        return EffectRestriction(space, tuple(dict.fromkeys(gens)))
    if restriction.kind == EFFECTS:
        # each generator e occurs in the allowed dichotomic meter (e, u - e)
        base = restriction.effects
        gens = [space.zero, space.unit]
        for g in base.generators:
            m = Meter(space, (g, g.complement()))
            if restriction.contains(m):
                gens.extend(meter_range(m))
        return EffectRestriction(space, tuple(dict.fromkeys(gens)))
    if isinstance(space, Ball):
        raise UnsupportedError("the noisy effect set of a ball has no finite generator list")
    return EffectRestriction(space, tuple(noisy_effect_generators(space, restriction.t)))


def tomographic_completeness(restriction: MeterRestriction) -> bool:
    """Whether the allowed effects separate all states (they span the dual space)."""
    space = restriction.space
    if restriction.kind == NOISE:
        return restriction.t > 0
    if restriction.kind == SIM:
        vecs = [list(e.vector) for b in restriction.generators for e in b.effects]
    else:
        vecs = [list(e.vector) for e in restriction.effects.generators]
    return rank(vecs) == space.d + 1


# ---------------------------------------------------------------- R3 witness


@dataclass
class R3Witness:
    meter: Meter
    t: Fraction
    q: Fraction
    r: Fraction
    l_b: Fraction
    base: Meter

    @property
    def noise_content(self) -> Fraction:
        return noise_content(self.meter)


def build_r3_witness(t, e: Effect, space: Polytope) -> R3Witness:
    """A meter whose effects are all allowed by ``R_t`` but which is not in ``R_t``.

    ``e`` must be an extreme indecomposable effect.  The free parameters are
    fixed as ``q = (t + 1) / 2``, ``r`` the midpoint of its admissible
    interval and ``r_i = r / (n + m)``.
    """
    t = to_fraction(t)
    if not 0 < t < 1:
        raise DomainError(f"t = {t} must lie strictly between 0 and 1")
    if e.is_zero() or not is_extreme_effect(e, space) or not is_indecomposable(e, space):
        raise DomainError(f"{e} is not an extreme indecomposable effect")
    if space.lambda_max(e) != 1:
        raise DomainError("extreme indecomposable effect must reach 1")
    parts = [e] + decompose_indecomposable(e.complement(), space)
    if not all(isinstance(p, Effect) for p in parts):
        raise UnsupportedError("decomposition of u - e is not rational")
    Meter(space, tuple(parts))  # checks that the parts sum to u
    ones = [p for p in parts if space.lambda_max(p) == 1]
    rest = [p for p in parts if space.lambda_max(p) != 1]
    q = (t + 1) / 2
    b_effects = [p * q for p in ones] + rest + [p * (1 - q) for p in ones]
    b = Meter(space, tuple(b_effects))
    l_b = max(space.lambda_max(x) for x in b_effects)
    lo = (l_b - t) / ((1 - t) * l_b)
    r = (lo + 1) / 2
    n_out = len(b_effects)
    r_i = r / n_out
    scale = (1 - (1 - t) * r) / t
    u = space.unit
    a_effects = tuple(x * (scale * t) + u * ((1 - t) * r_i) for x in b_effects)
    a = Meter(space, a_effects)
    w = noise_content(a)
    if w != (1 - t) * r or not w < 1 - t:
        raise ValidationError("noise content of the constructed meter is off")
    return R3Witness(a, t, q, r, l_b, b)


def r3_effect_check(witness: R3Witness) -> list[bool]:
    """LP membership of each effect of the witness in ``E_{R_t}``."""
    space = witness.meter.space
    allowed = EffectRestriction(space, tuple(noisy_effect_generators(space, witness.t)))
    return [allowed.contains(x) for x in witness.meter.effects]


def default_extreme_indecomposable(space: Polytope) -> Effect:
    for ray in _extreme_rays(space):
        if is_extreme_effect(ray, space):
            return ray
    raise DomainError("no extreme indecomposable effect found")


def _extreme_rays(space: Polytope):
    from .core import extreme_rays_of_dual_cone

    return extreme_rays_of_dual_cone(space)


# ------------------------------------------------------------ classification

R1, R2, R3 = "R1", "R2", "R3"
NO_RESTRICTION = "no-restriction"
UNKNOWN = "unknown"


@dataclass
class ClassificationResult:
    label: str
    seed: int
    budget: int
    trail: list[str] = field(default_factory=list)
    effect_outside: Effect | None = None
    meter_outside: Meter | None = None
    certificate: InfeasibilityCertificate | None = None
    candidates_tested: int = 0


def _full_effect_set_missing(e_r: EffectRestriction) -> Effect | None:
    for v in effect_set_vertices(e_r.space):
        if not e_r.contains(v):
            return v
    return None


def _linearly_independent(meter: Meter) -> bool:
    vecs = [list(e.vector) for e in meter.without_zero_outcomes().effects]
    return rank(vecs) == len(vecs)


def classify(restriction: MeterRestriction, seed: int = 0, budget: int = 50) -> ClassificationResult:
    """Label a meter restriction as (R1), (R2), (R3), no restriction or unknown.

    Definite labels always carry witnesses: an effect of ``E(S)`` outside
    ``E_R``, a meter outside ``R`` with a Farkas certificate, or the
    theorem that applies.
    """
    space = restriction.space
    if not isinstance(space, Polytope):
        raise UnsupportedError("classification needs a polytope state space")
    res = ClassificationResult(UNKNOWN, seed, budget)
    e_r = effects_of_restriction(restriction)
    outside = _full_effect_set_missing(e_r)
    res.effect_outside = outside
    if outside is None:
        res.trail.append("E_R equals E(S): every vertex of E(S) is an LP member")
    else:
        res.trail.append(f"E_R is a proper subset of E(S): vertex {outside} is not a member")

    if restriction.kind == EFFECTS:
        res.label = NO_RESTRICTION if outside is None else R1
        res.trail.append("restriction is induced by an effect restriction")
        return res

    if restriction.kind == NOISE:
        t = restriction.t
        if t == 1:
            res.label = NO_RESTRICTION
            res.trail.append("t = 1 allows every meter")
        elif t == 0:
            res.label = R1
            res.trail.append("t = 0 allows exactly the trivial meters, the meters of E_R = {r u}")
        else:
            w = build_r3_witness(t, default_extreme_indecomposable(space), space)
            res.meter_outside = w.meter
            res.label = R3
            res.trail.append(f"R3 witness with noise content {w.noise_content} < {1 - t}")
        return res

    gens = restriction.generators
    if outside is None:
        # the ray meters simulate every meter, so R = M iff they are all in R
        for m in ray_meters(space):
            res.candidates_tested += 1
            out = simulable(m, gens)
            if not out.feasible:
                res.label = R2
                res.meter_outside = m
                res.certificate = out
                res.trail.append("a ray meter is not simulable: R is a proper subset of M")
                return res
        res.label = NO_RESTRICTION
        res.trail.append("every ray meter is simulable, and ray meters simulate all meters")
        return res

    if len(gens) == 1 and _linearly_independent(gens[0]):
        res.label = R1
        res.trail.append("single generator with linearly independent effects")
        return res

    rng = random.Random(seed)
    for cand in _candidate_meters(e_r, rng, budget):
        res.candidates_tested += 1
        out = simulable(cand, gens)
        if not out.feasible:
            res.label = R3
            res.meter_outside = cand
            res.certificate = out
            res.trail.append("found a meter of M_{E_R} that is not simulable")
            return res
    res.trail.append(f"no separating meter among {res.candidates_tested} candidates")
    return res


def _candidate_meters(e_r: EffectRestriction, rng: random.Random, budget: int):
    """Meters whose whole range lies in ``E_R``, tried in a seeded order."""
    space = e_r.space
    verts = [v for v in e_r.vertices() if not v.is_zero()]
    allowed = MeterRestriction.by_effects(e_r)
    produced = 0
    for v in verts:
        if produced >= budget:
            return
        m = Meter(space, (v, v.complement()), check=False)
        if space.is_valid_effect(v.complement()) and allowed.contains(m):
            produced += 1
            yield m
    tries = 0
    while produced < budget and tries < 20 * budget:
        tries += 1
        k = rng.randint(2, min(4, len(verts) + 1))
        picks = rng.sample(verts, min(k - 1, len(verts)))
        w = random_probability(rng, len(picks))
        effects = [p * (x / 2) for p, x in zip(picks, w)]
        rest = space.unit
        for x in effects:
            rest = rest - x
        if not space.is_valid_effect(rest):
            continue
        m = Meter(space, tuple(effects) + (rest,))
        if allowed.contains(m):
            produced += 1
            yield m

