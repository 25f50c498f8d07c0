"""States, effects and meters of a finite-dimensional GPT.

A state space of affine dimension ``d`` is embedded as ``{(1, x)}`` in
``R^{d+1}``, so an effect is stored in dual coordinates as a constant ``c``
and a linear part ``v`` with ``e(x) = c + v . x``.  The unit effect is
``(1, 0)`` and the zero effect ``(0, 0)``.

Two state-space backends exist.  :class:`Polytope` is given by a vertex list
and everything about it is decided with exact rational arithmetic.
:class:`Ball` is the Euclidean unit ball; its extreme values are
:class:`~gptrestrict.numerics.NormExpression` objects and its effect
validity reduces to exact comparisons of squares.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DomainError, ResourceError, UnsupportedError, ValidationError
from .numerics import (
    LinearProgram,
    NormExpression,
    compare,
    lp_solve,
    nullspace,
    rank,
    to_fraction,
)
from .numerics.surd import Number

ZERO = Fraction(0)
ONE = Fraction(1)

RANGE_CAP = 20


@dataclass(frozen=True)
class Effect:
    """Affine functional ``x -> constant + linear . x``."""

    constant: Fraction
    linear: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "constant", to_fraction(self.constant))
        object.__setattr__(self, "linear", tuple(to_fraction(x) for x in self.linear))

    @classmethod
    def from_vector(cls, vec: Sequence) -> "Effect":
        return cls(vec[0], tuple(vec[1:]))

    @classmethod
    def unit(cls, d: int) -> "Effect":
        return cls(ONE, (ZERO,) * d)

    @classmethod
    def zero(cls, d: int) -> "Effect":
        return cls(ZERO, (ZERO,) * d)

    @property
    def dim(self) -> int:
        return len(self.linear)

    @property
    def vector(self) -> tuple[Fraction, ...]:
        return (self.constant, *self.linear)

    @property
    def norm_sq(self) -> Fraction:
        return sum((x * x for x in self.linear), ZERO)

    def __call__(self, x: Sequence[Fraction]) -> Fraction:
        return self.constant + sum((a * b for a, b in zip(self.linear, x) if a and b), ZERO)

    def __add__(self, other: "Effect") -> "Effect":
        return Effect(self.constant + other.constant, tuple(a + b for a, b in zip(self.linear, other.linear)))

    def __sub__(self, other: "Effect") -> "Effect":
        return Effect(self.constant - other.constant, tuple(a - b for a, b in zip(self.linear, other.linear)))

    def __neg__(self) -> "Effect":
        return Effect(-self.constant, tuple(-a for a in self.linear))

    def __mul__(self, s) -> "Effect":
        s = to_fraction(s)
        return Effect(self.constant * s, tuple(a * s for a in self.linear))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.constant == 0 and not any(self.linear)

    def is_constant(self) -> bool:
        return not any(self.linear)

    def complement(self) -> "Effect":
        return Effect.unit(self.dim) - self

    def __str__(self):
        return f"({self.constant}, ({', '.join(str(x) for x in self.linear)}))"


def effect_sum(effects: Iterable[Effect], d: int) -> Effect:
    total = Effect.zero(d)
    for e in effects:
        total = total + e
    return total


class StateSpace:
    """Common interface of the two backends."""

    kind: str
    d: int

    @property
    def unit(self) -> Effect:
        return Effect.unit(self.d)

    @property
    def zero(self) -> Effect:
        return Effect.zero(self.d)

    def lambda_min(self, e: Effect) -> Number:
        raise NotImplementedError

    def lambda_max(self, e: Effect) -> Number:
        raise NotImplementedError

    def contains(self, x: Sequence) -> bool:
        raise NotImplementedError

    def effect_violations(self, e: Effect) -> list[str]:
        raise NotImplementedError

    def is_valid_effect(self, e: Effect) -> bool:
        return not self.effect_violations(e)

    def _check_dim(self, e: Effect) -> None:
        if e.dim != self.d:
            raise DomainError(f"effect of dimension {e.dim} on a state space of dimension {self.d}")


class Polytope(StateSpace):
    """Convex hull of finitely many rational vertices."""

    kind = "polytope"

    def __init__(self, vertices: Sequence[Sequence], *, check: bool = True):
        verts = tuple(tuple(to_fraction(x) for x in v) for v in vertices)
        if not verts:
            raise ValidationError("polytope needs at least one vertex")
        d = len(verts[0])
        if any(len(v) != d for v in verts):
            raise ValidationError("vertices of different lengths")
        self.vertices = verts
        self.d = d
        self.embedded = tuple((ONE, *v) for v in verts)
        if check:
            if rank(self.embedded) != d + 1:
                raise ValidationError(f"vertices do not span an affine space of dimension {d}")
            for k in range(len(verts)):
                others = [w for j, w in enumerate(verts) if j != k]
                if others and _in_hull(others, verts[k]):
                    raise ValidationError(f"vertex {k} is a convex combination of the others",
                                          [f"vertex {k} redundant"])

    def __repr__(self):
        return f"Polytope({len(self.vertices)} vertices, d={self.d})"

    def __eq__(self, other):
        return isinstance(other, Polytope) and set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    def values(self, e: Effect) -> list[Fraction]:
        self._check_dim(e)
        return [e(v) for v in self.vertices]

    def lambda_min(self, e: Effect) -> Fraction:
        return min(self.values(e))

    def lambda_max(self, e: Effect) -> Fraction:
        return max(self.values(e))

    def argmax(self, e: Effect) -> int:
        vals = self.values(e)
        return vals.index(max(vals))

    def contains(self, x: Sequence) -> bool:
        x = tuple(to_fraction(t) for t in x)
        if len(x) != self.d:
            return False
        return _in_hull(self.vertices, x)

    def effect_violations(self, e: Effect) -> list[str]:
        self._check_dim(e)
        out = []
        for k, v in enumerate(self.vertices):
            val = e(v)
            if val < 0:
                out.append(f"value {val} < 0 at vertex {k} {_fmt(v)}")
            elif val > 1:
                out.append(f"value {val} > 1 at vertex {k} {_fmt(v)}")
        return out

    def in_cone(self, e: Effect) -> bool:
        return all(val >= 0 for val in self.values(e))

    def active_vertices(self, e: Effect) -> list[int]:
        return [k for k, val in enumerate(self.values(e)) if val == 0]

    def centroid(self) -> tuple[Fraction, ...]:
        n = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / n for i in range(self.d))


class Ball(StateSpace):
    """Unit Euclidean ball ``{x : |x| <= 1}`` of dimension ``dim``."""

    kind = "ball"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValidationError("ball dimension must be positive")
        self.d = dim

    def __repr__(self):
        return f"Ball({self.d})"

    def __eq__(self, other):
        return isinstance(other, Ball) and other.d == self.d

    def __hash__(self):
        return hash(("ball", self.d))

    def lambda_min(self, e: Effect) -> Number:
        self._check_dim(e)
        return NormExpression.of(e.constant, e.norm_sq, -1)

    def lambda_max(self, e: Effect) -> Number:
        self._check_dim(e)
        return NormExpression.of(e.constant, e.norm_sq, 1)

    def contains(self, x: Sequence) -> bool:
        x = [to_fraction(t) for t in x]
        return len(x) == self.d and sum((t * t for t in x), ZERO) <= 1

    def effect_violations(self, e: Effect) -> list[str]:
        self._check_dim(e)
        c, n = e.constant, e.norm_sq
        out = []
        if c < 0 or c * c < n:
            out.append(f"minimum {c} - sqrt({n}) < 0")
        if 1 - c < 0 or (1 - c) ** 2 < n:
            out.append(f"maximum {c} + sqrt({n}) > 1")
        return out


def _fmt(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _in_hull(points: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> bool:
    """LP test ``x in conv(points)``."""
    k = len(points)
    d = len(x)
    eq = [([ONE] * k, ONE)]
    for i in range(d):
        eq.append(([p[i] for p in points], x[i]))
    return lp_solve(LinearProgram.build(k, eq=eq)).feasible


# ---------------------------------------------------------------- meters


def meter_violations(space: StateSpace, effects: Sequence[Effect]) -> list[str]:
    out = []
    if not effects:
        return ["meter has no outcomes"]
    for i, e in enumerate(effects):
        if e.dim != space.d:
            out.append(f"outcome {i}: dimension {e.dim}, expected {space.d}")
            continue
        out.extend(f"outcome {i}: {msg}" for msg in space.effect_violations(e))
    if any(e.dim != space.d for e in effects):
        return out
    total = effect_sum(effects, space.d)
    if total != space.unit:
        out.append(f"normalization violated: effects sum to {total}, not u")
    return out


@dataclass(frozen=True)
class Meter:
    """Finite outcome-indexed family of effects summing to the unit effect."""

    space: StateSpace
    effects: tuple[Effect, ...]
    labels: tuple[str, ...] = field(default=())
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(self.effects))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i + 1) for i in range(len(self.effects))))
        elif len(self.labels) != len(self.effects):
            raise ValidationError("label count differs from outcome count")
        if self.check:
            bad = meter_violations(self.space, self.effects)
            if bad:
                raise ValidationError("invalid meter: " + "; ".join(bad), bad)

    def __len__(self) -> int:
        return len(self.effects)

    def __getitem__(self, i: int) -> Effect:
        return self.effects[i]

    def __iter__(self):
        return iter(self.effects)

    def __eq__(self, other):
        return isinstance(other, Meter) and self.space == other.space and self.effects == other.effects

    def __hash__(self):
        return hash(self.effects)

    def probabilities(self, x: Sequence) -> list[Fraction]:
        return [evaluate(e, x, self.space) for e in self.effects]

    def without_zero_outcomes(self) -> "Meter":
        keep = [(e, l) for e, l in zip(self.effects, self.labels) if not e.is_zero()]
        return Meter(self.space, tuple(e for e, _ in keep), tuple(l for _, l in keep), check=False)

    def padded(self, n: int) -> "Meter":
        """The same meter with zero effects appended up to ``n`` outcomes."""
        extra = n - len(self.effects)
        if extra <= 0:
            return self
        return Meter(self.space, self.effects + (self.space.zero,) * extra, check=False)


def trivial_meter(space: StateSpace, p: Sequence) -> Meter:
    return Meter(space, tuple(space.unit * to_fraction(px) for px in p))


def dichotomic_meter(space: StateSpace, e: Effect) -> Meter:
    return Meter(space, (e, space.unit - e))


# ------------------------------------------------------------ operations


def evaluate(e: Effect, x: Sequence, space: StateSpace) -> Fraction:
    """Probability ``e(s)`` of the effect at the state with coordinates ``x``."""
    x = tuple(to_fraction(t) for t in x)
    if not space.contains(x):
        raise DomainError(f"point {_fmt(x)} is not a state of {space!r}")
    return e(x)


def lambda_min(e: Effect, space: StateSpace) -> Number:
    return space.lambda_min(e)


def lambda_max(e: Effect, space: StateSpace) -> Number:
    return space.lambda_max(e)


def meter_range(meter: Meter, cap: int = RANGE_CAP) -> list[Effect]:
    """All effects ``sum_{y in subset} A_y``, deduplicated, in first-seen order."""
    n = len(meter.effects)
    if n > cap:
        raise ResourceError(f"range of a {n}-outcome meter exceeds the cap of {cap} outcomes")
    d = meter.space.d
    seen: dict[Effect, None] = {Effect.zero(d): None}
    sums = [Effect.zero(d)]
    for e in meter.effects:
        sums = sums + [s + e for s in sums]
    for s in sums:
        seen.setdefault(s, None)
    return list(seen)


def is_trivial(meter: Meter) -> bool:
    return all(e.is_constant() for e in meter.effects)


def is_indecomposable(e: Effect, space: StateSpace) -> bool:
    """Whether ``e`` spans an extreme ray of the positive dual cone."""
    if e.is_zero():
        raise DomainError("the zero effect is not indecomposable by definition")
    if isinstance(space, Ball):
        c, n = e.constant, e.norm_sq
        return c > 0 and c * c == n
    if not space.in_cone(e):
        return False
    active = [space.embedded[k] for k in space.active_vertices(e)]
    return bool(active) and rank(active) == space.d


def is_extreme_effect(e: Effect, space: StateSpace) -> bool:
    """Whether ``e`` is an extreme point of the effect set."""
    if not space.is_valid_effect(e):
        return False
    if isinstance(space, Ball):
        c, n = e.constant, e.norm_sq
        # extreme points: o, u and the rank-one projectors
        return (c == 0 and n == 0) or (c == 1 and n == 0) or (c == Fraction(1, 2) and n == Fraction(1, 4))
    vals = space.values(e)
    tight = [space.embedded[k] for k, v in enumerate(vals) if v == 0 or v == 1]
    return bool(tight) and rank(tight) == space.d + 1


@dataclass(frozen=True)
class SymbolicEffect:
    """``constant + scale * (direction . x)`` with possibly irrational coefficients."""

    constant: Number
    scale: Number
    direction: tuple[Fraction, ...]

    def as_effect(self) -> Effect | None:
        if isinstance(self.constant, NormExpression) or isinstance(self.scale, NormExpression):
            return None
        return Effect(self.constant, tuple(self.scale * x for x in self.direction))


def decompose_indecomposable(e: Effect, space: StateSpace) -> list:
    """Split ``e`` into indecomposable effects summing to it exactly.

    On a polytope the result is a list of :class:`Effect`.  On a ball it is
    a list of effects when ``|v|`` is rational and of :class:`SymbolicEffect`
    otherwise.
    """
    if e.is_zero():
        raise DomainError("cannot decompose the zero effect")
    if not space.is_valid_effect(e):
        raise DomainError(f"{e} is not a valid effect")
    if isinstance(space, Ball):
        return _decompose_ball(e, space)
    return _decompose_polytope(e, space)


def _decompose_ball(e: Effect, space: Ball) -> list:
    c, n = e.constant, e.norm_sq
    if c * c == n:
        return [e]
    if n == 0:
        # u-multiples split along the last axis
        axis = tuple(ZERO for _ in range(space.d - 1)) + (ONE,)
        half = c / 2
        return [Effect(half, tuple(half * a for a in axis)), Effect(half, tuple(-half * a for a in axis))]
    root = NormExpression.of(0, n)
    if not isinstance(root, NormExpression):
        alpha, beta = (c + root) / 2, (c - root) / 2
        unit = tuple(x / root for x in e.linear)
        return [Effect(alpha, tuple(alpha * x for x in unit)),
                Effect(beta, tuple(-beta * x for x in unit))]
    inv = NormExpression(0, [(c / 2, 1 / n)])  # (c/2) / |v|
    alpha = NormExpression.of(c / 2, n / 4)
    beta = NormExpression.of(c / 2, n / 4, -1)
    return [SymbolicEffect(alpha, inv + Fraction(1, 2), e.linear),
            SymbolicEffect(beta, Fraction(1, 2) - inv, e.linear)]


def _decompose_polytope(e: Effect, space: Polytope) -> list[Effect]:
    parts: list[Effect] = []
    rest = e
    while not rest.is_zero():
        if is_indecomposable(rest, space):
            parts.append(rest)
            break
        ray = _extreme_ray_in_face(rest, space)
        vals = space.values(rest)
        rvals = space.values(ray)
        lam = min(v / r for v, r in zip(vals, rvals) if r > 0)
        parts.append(ray * lam)
        rest = rest - ray * lam
    return parts


def _extreme_ray_in_face(f: Effect, space: Polytope) -> Effect:
    """An extreme ray of the dual cone lying in the smallest face containing ``f``.

    Moves ``f`` along directions that vanish on its active vertices until the
    active set has rank ``d``; each move strictly raises that rank.
    """
    d = space.d
    cur = f
    while True:
        active = [space.embedded[k] for k in space.active_vertices(cur)]
        if active and rank(active) == d:
            return cur
        basis = nullspace(active, d + 1) if active else [list(r) for r in _identity(d + 1)]
        g = next(b for b in basis if rank([cur.vector, b]) == 2)
        direction = Effect.from_vector(g)
        vals = space.values(cur)
        gvals = space.values(direction)
        if all(x >= 0 for x in gvals):
            direction = -direction
            gvals = [-x for x in gvals]
        step = min(v / -gv for v, gv in zip(vals, gvals) if gv < 0)
        cur = cur + direction * step


def _identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def extreme_rays_of_dual_cone(space: Polytope) -> list[Effect]:
    """Extreme rays of ``{f : f(v) >= 0 for every vertex v}``, scaled to ``lambda_max = 1``."""
    from .geometry import cone_extreme_rays

    rays = cone_extreme_rays([list(v) for v in space.embedded])
    out = []
    for r in rays:
        eff = Effect.from_vector(r)
        out.append(eff * (1 / space.lambda_max(eff)))
    return out


def pairs(items):
    return combinations(items, 2)


def sum_of(values: Iterable[Number]) -> Number:
    total: Number = ZERO
    for v in values:
        total = total + v
    return total


def gbit() -> Polytope:
    """The square state space with vertices ``(+-1, +-1)``."""
    return Polytope([(1, 1), (1, -1), (-1, 1), (-1, -1)])


def ge(a, b) -> bool:
    return compare(a, b) >= 0


def effect_set_vertices(space: Polytope) -> list[Effect]:
    """Vertices of ``E(S) = {e : 0 <= e(v) <= 1 at every vertex v}`` by double description."""
    from .geometry import polytope_vertices

    if not isinstance(space, Polytope):
        raise UnsupportedError("the effect set of a ball has infinitely many extreme points")
    a_ub, b_ub = [], []
    for row in space.embedded:
        a_ub.append([-x for x in row])
        b_ub.append(ZERO)
        a_ub.append(list(row))
        b_ub.append(ONE)
    return [Effect.from_vector(v) for v in polytope_vertices(a_ub, b_ub)]
