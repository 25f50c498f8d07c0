"""Mixing, post-processing and simulability of meters.

``simulable`` linearises the simulation scheme by substituting
``q[i][x][y] = p_i * nu_i[x][y]``, which turns the bilinear search for
weights and post-processings into one exact linear program.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .core import (
    Effect,
    Meter,
    Polytope,
    StateSpace,
    effect_sum,
    is_indecomposable,
    is_trivial,
)
from .errors import DomainError, ResourceError, UnsupportedError, ValidationError
from .numerics import (
    FarkasCertificate,
    LinearProgram,
    compare,
    lp_solve,
    rank,
    solve_linear,
    to_fraction,
    transpose,
)
from .numerics.surd import Number, as_exact

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class PostProcessing:
    """Row-stochastic matrix mapping source outcomes (rows) to target outcomes (columns)."""

    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_fraction(x) for x in r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if not rows or not rows[0]:
            raise ValidationError("post-processing needs at least one row and column")
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise ValidationError("ragged post-processing matrix")
            if any(x < 0 for x in r):
                raise ValidationError(f"row {i} has a negative entry")
            if sum(r) != 1:
                raise ValidationError(f"row {i} sums to {sum(r)}, not 1")

    @classmethod
    def identity(cls, n: int) -> "PostProcessing":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @property
    def sources(self) -> int:
        return len(self.matrix)

    @property
    def targets(self) -> int:
        return len(self.matrix[0])


def post_process(nu: PostProcessing, meter: Meter) -> Meter:
    """``A_y = sum_x nu[x][y] B_x``."""
    if nu.sources != len(meter):
        raise DomainError(f"post-processing has {nu.sources} rows for a {len(meter)}-outcome meter")
    d = meter.space.d
    out = []
    for y in range(nu.targets):
        out.append(effect_sum((meter[x] * nu.matrix[x][y] for x in range(len(meter)) if nu.matrix[x][y]), d))
    return Meter(meter.space, tuple(out))


def mix(meters: Sequence[Meter], p: Sequence) -> Meter:
    """Convex mixture, padding shorter meters with zero outcomes."""
    p = [to_fraction(x) for x in p]
    if len(p) != len(meters) or any(x < 0 for x in p) or sum(p) != 1:
        raise DomainError(f"mixing weights {p} are not a probability vector over {len(meters)} meters")
    space = _common_space(meters)
    n = max(len(m) for m in meters)
    d = space.d
    effects = []
    for y in range(n):
        effects.append(effect_sum(
            (m.padded(n)[y] * w for m, w in zip(meters, p) if w), d))
    return Meter(space, tuple(effects))


def _common_space(meters: Sequence[Meter]) -> StateSpace:
    if not meters:
        raise DomainError("no meters given")
    space = meters[0].space
    for m in meters[1:]:
        if m.space != space:
            raise UnsupportedError("meters live on different state spaces")
    return space


@dataclass(frozen=True)
class SimulationWitness:
    """Weights and post-processings that rebuild ``target`` from ``simulators``."""

    target: Meter
    simulators: tuple[Meter, ...]
    weights: tuple[Fraction, ...]
    post_processings: tuple[PostProcessing, ...]

    feasible = True

    def reconstruct(self) -> Meter:
        space = self.target.space
        n_out = len(self.target)
        parts = [post_process(nu, b) for nu, b in zip(self.post_processings, self.simulators)]
        effects = []
        for y in range(n_out):
            effects.append(effect_sum((m[y] * w for m, w in zip(parts, self.weights) if w), space.d))
        return Meter(space, tuple(effects), check=False)

    def residual(self) -> list[Effect]:
        rebuilt = self.reconstruct()
        return [a - b for a, b in zip(self.target.effects, rebuilt.effects)]

    def verify(self) -> bool:
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            return False
        return all(r.is_zero() for r in self.residual())


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Farkas multipliers showing that a linear program has no solution."""

    program: LinearProgram
    farkas: FarkasCertificate
    description: str = ""

    feasible = False

    def verify(self) -> bool:
        return self.farkas.verify(self.program)


def simulation_program(target: Meter, simulators: Sequence[Meter]) -> tuple[LinearProgram, list]:
    """The LP whose feasibility is equivalent to ``target in sim<simulators>``.

    Variables are ``q[i][x][y]`` followed by ``p_i``.  Returns the program and
    the ``(i, x, y)`` index of each ``q`` column.
    """
    m = len(target)
    index = []
    for i, b in enumerate(simulators):
        for x in range(len(b)):
            for y in range(m):
                index.append((i, x, y))
    nq = len(index)
    k = len(simulators)
    nvar = nq + k
    col = {key: c for c, key in enumerate(index)}
    eq = []
    for i, b in enumerate(simulators):
        for x in range(len(b)):
            row = [ZERO] * nvar
            for y in range(m):
                row[col[(i, x, y)]] = ONE
            row[nq + i] = -ONE
            eq.append((row, ZERO))
    eq.append(([ZERO] * nq + [ONE] * k, ONE))
    dim = target.space.d + 1
    for y in range(m):
        target_vec = target[y].vector
        for j in range(dim):
            row = [ZERO] * nvar
            for i, b in enumerate(simulators):
                for x in range(len(b)):
                    coeff = b[x].vector[j]
                    if coeff:
                        row[col[(i, x, y)]] = coeff
            eq.append((row, target_vec[j]))
    return LinearProgram.build(nvar, eq=eq), index


def simulable(target: Meter, simulators: Sequence[Meter]):
    """Decide ``target in sim<simulators>``.

    Returns a :class:`SimulationWitness` or an :class:`InfeasibilityCertificate`.
    """
    simulators = tuple(simulators)
    space = _common_space((target, *simulators))
    del space
    prog, index = simulation_program(target, simulators)
    out = lp_solve(prog)
    if not out.feasible:
        return InfeasibilityCertificate(prog, out.certificate, "target is not simulable")
    nq = len(index)
    weights = tuple(out.x[nq:])
    m = len(target)
    nus = []
    pos = 0
    for i, b in enumerate(simulators):
        rows = []
        for x in range(len(b)):
            qs = out.x[pos:pos + m]
            pos += m
            if weights[i] == 0:
                rows.append(tuple(Fraction(1, m) for _ in range(m)))
            else:
                rows.append(tuple(q / weights[i] for q in qs))
        nus.append(PostProcessing(tuple(rows)))
    return SimulationWitness(target, simulators, weights, tuple(nus))


# --------------------------------------------------------- random sampling


def random_probability(rng: random.Random, n: int, grain: int = 12) -> list[Fraction]:
    raw = [rng.randint(0, grain) for _ in range(n)]
    if sum(raw) == 0:
        raw[rng.randrange(n)] = 1
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def random_post_processing(rng: random.Random, sources: int, targets: int) -> PostProcessing:
    return PostProcessing(tuple(tuple(random_probability(rng, targets)) for _ in range(sources)))


def random_simulation(rng: random.Random, simulators: Sequence[Meter], outcomes: int) -> Meter:
    """A random element of ``sim<simulators>`` with ``outcomes`` outcomes."""
    p = random_probability(rng, len(simulators))
    parts = [post_process(random_post_processing(rng, len(b), outcomes), b) for b in simulators]
    return mix(parts, p)


@dataclass
class ClosureReport:
    sim1_checked: int = 0
    sim2_checked: int = 0
    sim3_checked: int = 0
    violations: list[str] = field(default_factory=list)
    witnesses_verified: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_closure_axioms(generators: Sequence[Meter], samples: int = 200, seed: int = 0) -> ClosureReport:
    """Property-test the closure-operator laws of ``sim<.>`` on ``generators``.

    SIM1: each generator is simulable from the set.  SIM2: a meter simulated
    from the generators together with an already simulated meter is again
    simulable from the generators alone.  SIM3: anything simulable from a
    subset is simulable from the full set.  Every witness found is checked
    to rebuild its target exactly.
    """
    rng = random.Random(seed)
    gens = tuple(generators)
    report = ClosureReport()

    def check(target: Meter, sims, label: str) -> None:
        res = simulable(target, sims)
        if not res.feasible:
            report.violations.append(f"{label}: not simulable")
            return
        if not res.verify():
            report.violations.append(f"{label}: witness does not rebuild the target")
            return
        report.witnesses_verified += 1

    for j, g in enumerate(gens):
        check(g, gens, f"SIM1 generator {j}")
        report.sim1_checked += 1

    for s in range(samples):
        kind = s % 2
        if kind == 0:
            inner = random_simulation(rng, gens, rng.randint(2, 3))
            outer = random_simulation(rng, gens + (inner,), rng.randint(2, 4))
            check(outer, gens, f"SIM2 sample {s}")
            report.sim2_checked += 1
        else:
            size = rng.randint(1, len(gens))
            subset = tuple(rng.sample(gens, size))
            target = random_simulation(rng, subset, rng.randint(2, 4))
            check(target, gens, f"SIM3 sample {s}")
            report.sim3_checked += 1
    return report


# ------------------------------------------------------ dichotomic meters


def normalize_dichotomic(meter: Meter) -> tuple[Meter, PostProcessing]:
    """Rescale a non-trivial dichotomic meter so both effects reach 0 and 1.

    Returns ``(A', nu)`` with ``nu o A' == A``.
    """
    if len(meter) != 2:
        raise DomainError("normalize_dichotomic expects a dichotomic meter")
    if is_trivial(meter):
        raise DomainError("a trivial meter is a post-processing of any meter; nothing to normalise")
    space = meter.space
    l1 = as_exact(space.lambda_max(meter[0]))
    l2 = as_exact(space.lambda_max(meter[1]))
    if l1 is None or l2 is None:
        raise UnsupportedError("maximal values are irrational; the rescaled meter is not rational")
    alpha = l1 + l2 - 1
    u = space.unit
    a1 = meter[0] * (1 / alpha) + u * ((l2 - 1) / alpha)
    a2 = meter[1] * (1 / alpha) + u * ((l1 - 1) / alpha)
    normalized = Meter(space, (a1, a2))
    nu = PostProcessing(((l1, 1 - l1), (1 - l2, l2)))
    return normalized, nu


# ------------------------------------------------------ n-tomic certificates

CERTIFIED = "certified-n-tomic"
NOT_CERTIFIED = "certified-not-n-tomic"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class NTomicCertificate:
    verdict: str
    n: int
    route: str | None
    evidence: dict

    @property
    def decided(self) -> bool:
        return self.verdict != UNDECIDED

    def recheck(self, meter: Meter) -> bool:
        """Recompute the evidence from scratch and confirm the verdict."""
        if self.verdict == CERTIFIED and self.route == "simulation-witness":
            w = self.evidence["witness"]
            return w.target == meter and w.verify() and all(len(b) <= self.n for b in w.simulators)
        again = certify_n_tomic(meter, self.n)
        return again.verdict == self.verdict and again.route == self.route


def _lmax_all(meter: Meter) -> list[Number]:
    return [meter.space.lambda_max(e) for e in meter.effects]


def _sum(values) -> Number:
    total: Number = ZERO
    for v in values:
        total = total + v
    return total


def positively_proportional(a: Effect, b: Effect) -> bool:
    """``b = t a`` for some ``t > 0`` (both taken nonzero and in the positive cone)."""
    if rank([a.vector, b.vector]) != 1:
        return False
    i = next(k for k, x in enumerate(a.vector) if x != 0)
    return b.vector[i] / a.vector[i] > 0


def completes_unit(a: Effect, b: Effect) -> bool:
    """Whether ``t_a a + t_b b = u`` for some ``t_a, t_b > 0``."""
    u = Effect.unit(a.dim).vector
    sol = solve_linear(transpose([list(a.vector), list(b.vector)]), u)
    if sol is None:
        return False
    if not sol.underdetermined:
        return all(t > 0 for t in sol.x)
    # a and b are parallel to u: some positive split always exists
    return True


def certify_n_tomic(meter: Meter, n: int) -> NTomicCertificate:
    """One-sided tests for membership in the effectively ``n``-tomic meters."""
    if n < 1:
        raise DomainError("n must be positive")
    reduced = meter.without_zero_outcomes()
    count = len(reduced)
    if count <= n:
        return NTomicCertificate(CERTIFIED, n, "outcome-count", {"nonzero_outcomes": count})

    lmax = _lmax_all(reduced)
    if n >= 2:
        for y in range(count):
            rest = _sum(v for x, v in enumerate(lmax) if x != y)
            if compare(rest, 1) <= 0:
                return NTomicCertificate(CERTIFIED, n, "max-sum-drop-one",
                                         {"dropped_outcome": y, "lambda_max": lmax, "sum": rest})
    total = _sum(lmax)
    if compare(total, n) > 0:
        return NTomicCertificate(NOT_CERTIFIED, n, "max-sum-exceeds", {"lambda_max": lmax, "sum": total})

    if n == 2:
        found = indecomposable_family(reduced)
        if found is not None:
            idx, s = found
            return NTomicCertificate(NOT_CERTIFIED, n, "indecomposable-family",
                                     {"outcomes": idx, "lambda_max": [lmax[i] for i in idx], "sum": s})
    witness = _ray_basis_witness(meter, n)
    if witness is not None:
        return NTomicCertificate(CERTIFIED, n, "simulation-witness", {"witness": witness})
    return NTomicCertificate(UNDECIDED, n, None, {"lambda_max": lmax, "sum": total})


def _ray_basis_witness(meter: Meter, n: int):
    """A simulation of ``meter`` from ray meters when all of them have at most ``n`` outcomes.

    Every meter on a polytope is simulable from its ray meters, so this
    settles the question whenever that basis is small enough.
    """
    from .sampling import ray_meters

    if not isinstance(meter.space, Polytope):
        return None
    try:
        basis = ray_meters(meter.space)
    except (ResourceError, UnsupportedError):
        return None
    if any(len(b) > n for b in basis):
        return None
    res = simulable(meter, basis)
    return res if res.feasible else None


def indecomposable_family(meter: Meter, limit: int = 14):
    """Largest-``lambda_max`` family of indecomposable outcomes meeting the pairwise conditions.

    Returns ``(indices, sum)`` when the sum exceeds one, else ``None``.
    """
    space = meter.space
    cand = [i for i, e in enumerate(meter.effects) if not e.is_zero() and is_indecomposable(e, space)]
    if len(cand) < 2:
        return None
    ok_pair = {}
    for i, j in combinations(cand, 2):
        a, b = meter[i], meter[j]
        ok_pair[(i, j)] = not positively_proportional(a, b) and not completes_unit(a, b)
    lmax = {i: space.lambda_max(meter[i]) for i in cand}
    best = None
    best_sum: Number = ZERO
    pool = cand[:limit]
    for size in range(2, len(pool) + 1):
        for subset in combinations(pool, size):
            if all(ok_pair[(i, j)] for i, j in combinations(subset, 2)):
                s = _sum(lmax[i] for i in subset)
                if best is None or compare(s, best_sum) > 0:
                    best, best_sum = list(subset), s
    if best is not None and compare(best_sum, 1) > 0:
        return best, best_sum
    return None
