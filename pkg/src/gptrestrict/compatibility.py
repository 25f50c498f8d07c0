"""Compatibility of meters as existence of a joint meter.

Two meters are compatible when one meter simulates both.  For finite
outcome sets this is the same as a grid ``G[x][y]`` of effects whose row
sums give ``A`` and column sums give ``B``: a common simulator ``C`` yields
``G[x][y] = sum_z nu_A[z][x] nu_B[z][y] C_z``, and ``G`` itself simulates
both meters by merging rows or columns.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Ball, Effect, Meter, effect_sum
from .errors import UnsupportedError
from .numerics import LinearProgram, lp_solve
from .simulation import (
    InfeasibilityCertificate,
    mix,
    post_process,
    random_post_processing,
    random_probability,
)
from .sampling import random_meter

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class JointMeter:
    a: Meter
    b: Meter
    grid: tuple[tuple[Effect, ...], ...]

    feasible = True

    def as_meter(self) -> Meter:
        return Meter(self.a.space, tuple(g for row in self.grid for g in row))

    def marginal_a(self) -> list[Effect]:
        d = self.a.space.d
        return [effect_sum(row, d) for row in self.grid]

    def marginal_b(self) -> list[Effect]:
        d = self.a.space.d
        return [effect_sum((row[y] for row in self.grid), d) for y in range(len(self.b))]

    def verify(self) -> bool:
        space = self.a.space
        if not all(space.is_valid_effect(g) for row in self.grid for g in row):
            return False
        return self.marginal_a() == list(self.a.effects) and self.marginal_b() == list(self.b.effects)


def are_compatible(a: Meter, b: Meter):
    """A :class:`JointMeter` for ``a`` and ``b`` or an infeasibility certificate."""
    space = a.space
    if b.space != space:
        raise UnsupportedError("meters live on different state spaces")
    if isinstance(space, Ball):
        raise UnsupportedError("the joint-meter LP needs a polytope; use the commutation test for sharp qubit meters")
    na, nb, dim = len(a), len(b), space.d + 1
    nvar = na * nb * dim

    def col(x, y, j):
        return (x * nb + y) * dim + j

    eq = []
    for x in range(na):
        for j in range(dim):
            row = [ZERO] * nvar
            for y in range(nb):
                row[col(x, y, j)] = ONE
            eq.append((row, a[x].vector[j]))
    for y in range(nb):
        for j in range(dim):
            row = [ZERO] * nvar
            for x in range(na):
                row[col(x, y, j)] = ONE
            eq.append((row, b[y].vector[j]))
    ub = []
    for x in range(na):
        for y in range(nb):
            for vert in space.embedded:
                row = [ZERO] * nvar
                for j in range(dim):
                    row[col(x, y, j)] = -vert[j]
                ub.append((row, ZERO))
    prog = LinearProgram.build(nvar, eq=eq, ub=ub, free=range(nvar))
    out = lp_solve(prog)
    if not out.feasible:
        return InfeasibilityCertificate(prog, out.certificate, "no joint meter exists")
    grid = tuple(
        tuple(Effect.from_vector(out.x[col(x, y, 0):col(x, y, 0) + dim]) for y in range(nb))
        for x in range(na))
    return JointMeter(a, b, grid)


def in_compat_set(d: Meter, a: Meter) -> bool:
    """Membership of ``d`` in ``C(a)``."""
    return are_compatible(d, a).feasible


def random_compatible_meter(a: Meter, rng: random.Random, outcomes: int | None = None) -> Meter:
    """A random member of ``C(a)`` read off a random joint meter.

    Row ``x`` of the grid is ``lam_x D^(x)_y + nu[x][y] (a_x - lam_x u)`` with
    ``0 <= lam_x <= lambda_min(a_x)``, a random meter ``D^(x)`` and a random
    stochastic ``nu``; its rows sum to ``a_x`` and every entry is an effect.
    """
    space = a.space
    n = outcomes if outcomes is not None else rng.randint(2, 3)
    nu = random_post_processing(rng, len(a), n)
    u = space.unit
    cols = [Effect.zero(space.d) for _ in range(n)]
    for x, ax in enumerate(a.effects):
        lam = space.lambda_min(ax) * Fraction(rng.randint(0, 4), 4)
        dx = random_meter(space, rng, n) if lam else None
        for y in range(n):
            g = (ax - u * lam) * nu.matrix[x][y]
            if lam:
                g = g + dx[y] * lam
            cols[y] = cols[y] + g
    return Meter(space, tuple(cols))


@dataclass
class CompatClosureReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_compat_closure(a: Meter, samples: int = 100, seed: int = 0) -> CompatClosureReport:
    """Property test that mixtures and post-processings of members of ``C(a)`` stay in ``C(a)``."""
    rng = random.Random(seed)
    report = CompatClosureReport()
    for s in range(samples):
        m1 = random_compatible_meter(a, rng)
        m2 = random_compatible_meter(a, rng)
        kind = s % 3
        if kind == 0:
            target = mix([m1, m2], random_probability(rng, 2))
        elif kind == 1:
            target = post_process(random_post_processing(rng, len(m1), rng.randint(2, 3)), m1)
        else:
            inner = mix([m1, m2], random_probability(rng, 2))
            target = post_process(random_post_processing(rng, len(inner), rng.randint(2, 3)), inner)
        res = are_compatible(target, a)
        report.checked += 1
        if not res.feasible:
            report.violations.append(f"sample {s}: simulated member is not compatible with a")
        elif not res.verify():
            report.violations.append(f"sample {s}: joint meter fails its marginals")
    return report
