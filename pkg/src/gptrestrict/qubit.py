"""Qubit analytics on the Bloch ball.

A qubit effect ``c 1 + v . sigma`` is stored as the affine functional
``(c, v)`` on Bloch vectors, so ``tr[E rho] = c + v . n``.  Pure states have
unit Bloch vectors and ``|<psi_1|psi_2>|^2 = (1 + n_1 . n_2) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .core import Ball, Effect, Meter, Polytope, is_indecomposable
from .errors import DomainError, UnsupportedError
from .numerics import LinearProgram, NormExpression, compare, dot, lp_solve, rank, to_fraction
from .numerics.surd import Number, rational_sqrt
from .simulation import (
    NOT_CERTIFIED,
    UNDECIDED,
    NTomicCertificate,
    completes_unit,
    positively_proportional,
)

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

QUBIT = Ball(3)


def _vec(n) -> tuple[Fraction, ...]:
    v = tuple(to_fraction(x) for x in n)
    if len(v) != 3:
        raise DomainError("Bloch vectors have three components")
    return v


def pure_state(n) -> tuple[Fraction, ...]:
    v = _vec(n)
    if dot(v, v) != 1:
        raise DomainError(f"Bloch vector {n} is not a unit vector")
    return v


def overlap_sq(n1, n2) -> Fraction:
    """``|<psi_1|psi_2>|^2`` for pure states with Bloch vectors ``n1``, ``n2``."""
    return (1 + dot(pure_state(n1), pure_state(n2))) / 2


def projector(n) -> Effect:
    """The rank-one effect of the pure state ``n``."""
    v = pure_state(n)
    return Effect(HALF, tuple(x / 2 for x in v))


def _resolve(n1, n2, overlap) -> Fraction:
    if overlap is not None:
        o = to_fraction(overlap)
        if not 0 <= o <= 1:
            raise DomainError(f"overlap squared {o} is outside [0, 1]")
        return o
    if n1 is None or n2 is None:
        raise DomainError("give two Bloch vectors or an overlap")
    return overlap_sq(n1, n2)


def bloch_pair(overlap) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Rational unit vectors with the given squared overlap, if they exist.

    ``n1`` is the z axis and ``n2 = (a, b, s)`` with ``s = 2 overlap - 1``;
    a small search looks for rational ``a, b`` with ``a^2 + b^2 = 1 - s^2``.
    """
    o = to_fraction(overlap)
    s = 2 * o - 1
    rest = 1 - s * s
    n1 = (ZERO, ZERO, ONE)
    a = rational_sqrt(rest)
    if a is not None:
        return n1, (a, ZERO, s)
    for den in range(1, 200):
        for num in range(1, den):
            b = Fraction(num, den)
            if b * b >= rest:
                break
            a = rational_sqrt(rest - b * b)
            if a is not None:
                return n1, (a, b, s)
    raise UnsupportedError(f"no small rational Bloch pair with overlap {o}")


# --------------------------------------------------- unambiguous discrimination


@dataclass(frozen=True)
class UdMeter:
    """``A_1 = q1 (u - P_2)``, ``A_2 = q2 (u - P_1)`` and the inconclusive ``A_?``."""

    q1: Fraction
    q2: Fraction
    n1: tuple[Fraction, ...]
    n2: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "q1", to_fraction(self.q1))
        object.__setattr__(self, "q2", to_fraction(self.q2))
        object.__setattr__(self, "n1", pure_state(self.n1))
        object.__setattr__(self, "n2", pure_state(self.n2))
        if self.q1 <= 0 or self.q2 <= 0:
            raise DomainError("q1 and q2 must be positive")

    @classmethod
    def from_overlap(cls, q1, q2, overlap) -> "UdMeter":
        n1, n2 = bloch_pair(overlap)
        return cls(q1, q2, n1, n2)

    @property
    def effects(self) -> tuple[Effect, Effect, Effect]:
        u = QUBIT.unit
        a1 = (u - projector(self.n2)) * self.q1
        a2 = (u - projector(self.n1)) * self.q2
        return a1, a2, u - a1 - a2

    def inconclusive_min(self) -> Number:
        return QUBIT.lambda_min(self.effects[2])

    def is_valid(self) -> bool:
        return QUBIT.is_valid_effect(self.effects[2]) and self.q1 <= 1 and self.q2 <= 1

    def meter(self) -> Meter:
        """The validated three-outcome meter (raises ``ValidationError`` if ``A_?`` is not an effect)."""
        return Meter(QUBIT, self.effects, labels=("1", "2", "?"))


def ud_success(meter: UdMeter) -> Fraction:
    """``((q1 + q2) / 2) (1 - |<psi_1|psi_2>|^2)`` for a valid UD meter."""
    if not meter.is_valid():
        raise DomainError(f"A_? has minimum {meter.inconclusive_min()} < 0; not a meter")
    o = overlap_sq(meter.n1, meter.n2)
    return (meter.q1 + meter.q2) / 2 * (1 - o)


def ud_dichotomic_bound(n1=None, n2=None, *, overlap=None) -> Fraction:
    """``(1 - |<psi_1|psi_2>|^2) / 2``, the bound for effectively dichotomic meters."""
    return (1 - _resolve(n1, n2, overlap)) / 2


def ud_unrestricted_optimum(n1=None, n2=None, *, overlap=None) -> Number:
    """``1 - |<psi_1|psi_2>|`` exactly."""
    return NormExpression.of(1, _resolve(n1, n2, overlap), -1)


@dataclass(frozen=True)
class UdOptimum:
    q1: float | Fraction
    q2: float | Fraction
    success: float | Fraction
    exact: Number | None
    constrained: bool
    grid: int


def _ud_valid_exact(q1: Fraction, q2: Fraction, s: Fraction) -> bool:
    half = 1 - (q1 + q2) / 2
    nsq = (q1 * q1 + q2 * q2 + 2 * q1 * q2 * s) / 4
    return half >= 0 and half * half >= nsq


def ud_max_valid_q(n1=None, n2=None, *, overlap=None, constraint: str = "none", grid: int = 2001) -> UdOptimum:
    """Maximise the UD success probability over valid ``(q1, q2)``.

    ``constraint="q1_plus_q2_le_1"`` adds the effectively-dichotomic
    condition.  A grid scan finds the best cell, bisection along its ray
    pushes it onto the validity boundary, a golden-section search over
    the ray direction refines it, and in the constrained case the
    exact optimiser ``q = (1/2, 1/2)`` is certified valid in rationals.
    """
    if constraint not in ("none", "q1_plus_q2_le_1"):
        raise DomainError(f"unknown constraint {constraint!r}")
    o = _resolve(n1, n2, overlap)
    if o == 1:
        raise DomainError("identical states cannot be discriminated")
    s = 2 * o - 1
    capped = constraint != "none"
    g1, g2 = _kernels.scan(float(s), grid, capped)
    r1, r2 = _kernels.bisect_ray(g1, g2, float(s), capped)
    r1, r2 = _kernels.refine_boundary(r1, r2, float(s), capped, 0.1)
    success = (r1 + r2) / 2 * (1 - float(o))
    if capped:
        if not _ud_valid_exact(HALF, HALF, s):
            raise AssertionError("q = (1/2, 1/2) must be valid for every overlap")
        exact = ud_dichotomic_bound(overlap=o)
        return UdOptimum(HALF, HALF, exact, exact, True, grid)
    return UdOptimum(r1, r2, success, ud_unrestricted_optimum(overlap=o), False, grid)


def ud_not_2tomic_certificate(meter: UdMeter) -> NTomicCertificate:
    """Certify that a UD meter with ``q1 + q2 > 1`` is not effectively dichotomic.

    Checks that ``A_1`` and ``A_2`` are indecomposable, not proportional and
    do not complete ``u`` with positive weights, then compares
    ``lambda_max(A_1) + lambda_max(A_2) = q1 + q2`` against 1.
    """
    m = meter.meter()
    a1, a2 = m[0], m[1]
    o = overlap_sq(meter.n1, meter.n2)
    if o == 1:
        raise DomainError("identical states: A_1 and A_2 are proportional")
    if not (is_indecomposable(a1, QUBIT) and is_indecomposable(a2, QUBIT)):
        raise DomainError("A_1 or A_2 is not indecomposable")
    if positively_proportional(a1, a2):
        raise DomainError("A_1 and A_2 are proportional")
    if completes_unit(a1, a2):
        raise DomainError("A_1 and A_2 complete u; the criterion does not apply")
    lmax = [QUBIT.lambda_max(a1), QUBIT.lambda_max(a2)]
    total = lmax[0] + lmax[1]
    evidence = {"outcomes": [0, 1], "lambda_max": lmax, "sum": total}
    if compare(total, 1) > 0:
        return NTomicCertificate(NOT_CERTIFIED, 2, "indecomposable-family", evidence)
    return NTomicCertificate(UNDECIDED, 2, None, evidence)


# ------------------------------------------------------------ depolarisation


def depolarize_effect(e: Effect, t) -> Effect:
    """Dual of the depolarising channel: ``(c, v) -> (c, t v)``."""
    t = to_fraction(t)
    return Effect(e.constant, tuple(t * x for x in e.linear))


def shifted_depolarize_effect(e: Effect, t, xi) -> Effect:
    """Dual of ``rho -> t rho + (1 - t) xi``: ``(c, v) -> (t c + (1 - t) e(xi), t v)``."""
    t = to_fraction(t)
    xi = _vec(xi)
    if dot(xi, xi) > 1:
        raise DomainError(f"{xi} is not a state")
    return Effect(t * e.constant + (1 - t) * e(xi), tuple(t * x for x in e.linear))


def in_noisy_effects(e: Effect, t) -> bool:
    """Membership in ``{t g + (1 - t) r u : g an effect, r in [0, 1]}`` on the Bloch ball.

    Writing ``e = (c, v)`` the set is the valid effects with ``|v| <= t / 2``.
    """
    t = to_fraction(t)
    return QUBIT.is_valid_effect(e) and 4 * e.norm_sq <= t * t


def commutes_sharp(e: Effect, f: Effect) -> bool:
    """Whether two qubit effects commute: their Bloch parts are parallel or one vanishes."""
    if e.is_constant() or f.is_constant():
        return True
    return rank([list(e.linear), list(f.linear)]) <= 1


# ------------------------------------------------------ inscribed polytopes


def sphere_point(a: Fraction, b: Fraction) -> tuple[Fraction, ...]:
    """Inverse stereographic projection of ``(a, b)``: a rational unit vector."""
    a, b = Fraction(a), Fraction(b)
    den = a * a + b * b + 1
    return (2 * a / den, 2 * b / den, (a * a + b * b - 1) / den)


def octahedron() -> Polytope:
    return Polytope([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])


def inscribed_polytope(count: int = 20) -> Polytope:
    """A polytope with ``count`` rational vertices on the unit sphere, containing the octahedron."""
    pts = [(ONE, ZERO, ZERO), (-ONE, ZERO, ZERO), (ZERO, ONE, ZERO),
           (ZERO, -ONE, ZERO), (ZERO, ZERO, ONE), (ZERO, ZERO, -ONE)]
    grid = [Fraction(k, 2) for k in (-2, 2, -1, 1, -3, 3)]
    for a in grid:
        for b in grid:
            for p in (sphere_point(a, b), tuple(-x for x in sphere_point(a, b))):
                if p not in pts and len(pts) < count:
                    pts.append(p)
    if len(pts) < count:
        raise DomainError(f"could not place {count} rational points")
    return Polytope(pts)


def ud_polytope_optimum(space: Polytope, n1, n2):
    """Best UD success over meters on ``space`` with zero error on the states ``n1``, ``n2``.

    Both states must be vertices.  Variables are the dual coordinates of
    ``A_1`` and ``A_2``; ``A_? = u - A_1 - A_2``.
    """
    n1, n2 = _vec(n1), _vec(n2)
    dim = space.d + 1
    s1, s2 = (ONE,) + n1, (ONE,) + n2
    nvar = 2 * dim
    eq = [(list(s2) + [ZERO] * dim, ZERO), ([ZERO] * dim + list(s1), ZERO)]
    ub = []
    for v in space.embedded:
        ub.append(([-x for x in v] + [ZERO] * dim, ZERO))
        ub.append(([ZERO] * dim + [-x for x in v], ZERO))
        ub.append((list(v) + list(v), ONE))
    obj = [x / 2 for x in s1] + [x / 2 for x in s2]
    prog = LinearProgram.build(nvar, eq=eq, ub=ub, objective=obj, maximize=True, free=range(nvar))
    return lp_solve(prog)

