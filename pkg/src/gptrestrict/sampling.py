"""Seeded random effects and meters on polytope state spaces.

Every meter is a post-processing of one whose effects lie on distinct
extreme rays of the dual cone, and such meters form the polytope
``{lam >= 0 : sum_i lam_i r_i = u}``.  Its vertices, the *ray meters*, are
therefore a finite simulation basis of all meters; sampling random
simulations from them reaches every meter.
"""
from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations

from .core import (
    Effect,
    Meter,
    Polytope,
    dichotomic_meter,
    effect_set_vertices,
    extreme_rays_of_dual_cone,
)
from .errors import UnsupportedError
from .numerics import rank, solve_linear, transpose
from .simulation import random_probability, random_simulation


def ray_meters(space: Polytope) -> list[Meter]:
    """Vertices of the meter polytope over the extreme rays, one meter each."""
    return list(_ray_meters(space))


@lru_cache(maxsize=32)
def _ray_meters(space: Polytope) -> tuple[Meter, ...]:
    if not isinstance(space, Polytope):
        raise UnsupportedError("ray meters need a polytope state space")
    rays = extreme_rays_of_dual_cone(space)
    u = space.unit.vector
    out: list[Meter] = []
    seen = set()
    for size in range(1, space.d + 2):
        for subset in combinations(range(len(rays)), size):
            cols = [rays[i].vector for i in subset]
            if rank(cols) != size:
                continue
            sol = solve_linear(transpose([list(c) for c in cols]), u)
            if sol is None or any(x <= 0 for x in sol.x):
                continue
            effects = tuple(rays[i] * w for i, w in zip(subset, sol.x))
            key = frozenset(effects)
            if key not in seen:
                seen.add(key)
                out.append(Meter(space, effects))
    return tuple(out)


def random_effect(space: Polytope, rng: random.Random) -> Effect:
    """A random convex combination of a few vertices of ``E(S)``."""
    verts = _effect_vertices(space)
    k = rng.randint(1, min(3, len(verts)))
    chosen = rng.sample(verts, k)
    w = random_probability(rng, k)
    total = Effect.zero(space.d)
    for e, x in zip(chosen, w):
        total = total + e * x
    return total


@lru_cache(maxsize=32)
def _effect_vertices(space: Polytope) -> list[Effect]:
    return effect_set_vertices(space)


def random_dichotomic(space: Polytope, rng: random.Random) -> Meter:
    return dichotomic_meter(space, random_effect(space, rng))


def random_meter(space: Polytope, rng: random.Random, outcomes: int | None = None) -> Meter:
    """A random meter obtained by simulation from the ray meters."""
    n = outcomes if outcomes is not None else rng.randint(2, 4)
    return random_simulation(rng, ray_meters(space), n)
