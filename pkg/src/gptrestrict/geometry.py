"""Double description for exact vertex and extreme-ray enumeration.

Constraints are added one at a time to a cone represented by its
lineality space and its extreme rays.  A new ray is created from a pair of
rays on opposite sides of the incoming hyperplane only when the pair is
adjacent; adjacency is decided combinatorially from the sets of tight
constraints.
"""
from __future__ import annotations

import os
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import UnsupportedError
from .numerics import as_matrix, dot

ZERO = Fraction(0)

DEFAULT_DIM_CAP = 6


def dim_cap() -> int:
    """Cap on the ambient dimension for vertex enumeration (``GPT_RESTRICT_DIM_CAP``)."""
    raw = os.environ.get("GPT_RESTRICT_DIM_CAP")
    return int(raw) if raw else DEFAULT_DIM_CAP


def _primitive(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale to the primitive integer vector on the same ray."""
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ZERO for _ in v)
    return tuple(Fraction(x // g) for x in ints)


def double_description(rows: Sequence[Sequence], n: int | None = None):
    """Generators of the cone ``{x : a . x >= 0 for every row a}``.

    Returns ``(rays, lineality)``: primitive extreme rays and a basis of the
    lineality space.
    """
    a = as_matrix(rows)
    n = n if n is not None else len(a[0])
    lin: list[tuple[Fraction, ...]] = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    rays: list[tuple[Fraction, ...]] = []
    zsets: list[frozenset[int]] = []

    for k, row in enumerate(a):
        pivot = next((l for l in lin if dot(row, l) != 0), None)
        if pivot is not None:
            s = dot(row, pivot)
            if s < 0:
                pivot = tuple(-x for x in pivot)
                s = -s
            new_lin = []
            for l in lin:
                if l is pivot or l == tuple(-x for x in pivot):
                    continue
                t = dot(row, l)
                new_lin.append(_primitive([x - t / s * p for x, p in zip(l, pivot)]) if t else l)
            lin = [l for l in new_lin if any(l)]
            new_rays = []
            for r in rays:
                t = dot(row, r)
                new_rays.append(_primitive([x - t / s * p for x, p in zip(r, pivot)]) if t else r)
            rays = new_rays
            zsets = [z | {k} for z in zsets]
            rays.append(_primitive(pivot))
            zsets.append(frozenset(range(k)))
            continue

        vals = [dot(row, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        new_rays = [rays[i] for i in pos + zero]
        new_z = [zsets[i] for i in pos] + [zsets[i] | {k} for i in zero]
        for i in pos:
            for j in neg:
                common = zsets[i] & zsets[j]
                if _adjacent(i, j, common, zsets):
                    vi, vj = vals[i], vals[j]
                    r = _primitive([vi * y - vj * x for x, y in zip(rays[i], rays[j])])
                    if any(r):
                        new_rays.append(r)
                        new_z.append(common | {k})
        rays, zsets = _dedupe(new_rays, new_z)
    return rays, lin


def _adjacent(i: int, j: int, common: frozenset[int], zsets) -> bool:
    for t, z in enumerate(zsets):
        if t != i and t != j and common <= z:
            return False
    return True


def _dedupe(rays, zsets):
    seen = {}
    for r, z in zip(rays, zsets):
        if r in seen:
            seen[r] = seen[r] | z
        else:
            seen[r] = z
    return list(seen), list(seen.values())


def cone_extreme_rays(rows: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Extreme rays of the pointed cone ``{x : a . x >= 0}``."""
    rays, lin = double_description(rows)
    if lin:
        raise UnsupportedError("cone is not pointed")
    return rays


def polytope_vertices(a_ub: Sequence[Sequence], b_ub: Sequence, *, cap: int | None = None) -> list[tuple[Fraction, ...]]:
    """Vertices of the bounded polyhedron ``{x : A x <= b}``."""
    a = as_matrix(a_ub)
    n = len(a[0])
    limit = dim_cap() if cap is None else cap
    if n > limit:
        raise UnsupportedError(f"vertex enumeration in dimension {n} exceeds the cap {limit}")
    # homogenise: (x, t) with b t - a x >= 0 and t >= 0
    rows = [[-x for x in row] + [Fraction(b)] for row, b in zip(a, b_ub)]
    rows.append([ZERO] * n + [Fraction(1)])
    rays, lin = double_description(rows, n + 1)
    if lin:
        raise UnsupportedError("polyhedron contains a line")
    verts = []
    for r in rays:
        t = r[-1]
        if t == 0:
            raise UnsupportedError("polyhedron is unbounded")
        verts.append(tuple(x / t for x in r[:-1]))
    return sorted(verts)
