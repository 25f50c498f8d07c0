"""Exact two-phase simplex with Bland's rule.

Problems are stated as::

    minimize / maximize   c . x
    subject to            A_eq x  = b_eq
                          A_ub x <= b_ub
                          x_j >= 0  for j not in ``free``

Every answer carries data that can be re-checked with one matrix-vector
product: a feasible point, a Farkas certificate of infeasibility, an
unbounded ray, or an optimal point together with dual multipliers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import StructuralError, Vector, as_matrix, as_vector, dot, matvec, vecmat

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LinearProgram:
    n: int
    a_eq: tuple[tuple[Fraction, ...], ...] = ()
    b_eq: tuple[Fraction, ...] = ()
    a_ub: tuple[tuple[Fraction, ...], ...] = ()
    b_ub: tuple[Fraction, ...] = ()
    objective: tuple[Fraction, ...] | None = None
    maximize: bool = False
    free: frozenset[int] = frozenset()

    @classmethod
    def build(
        cls,
        n: int,
        *,
        eq: Sequence[tuple[Sequence, object]] = (),
        ub: Sequence[tuple[Sequence, object]] = (),
        objective: Sequence | None = None,
        maximize: bool = False,
        free: Sequence[int] = (),
    ) -> "LinearProgram":
        """Assemble a program from ``(row, rhs)`` pairs, checking every shape."""
        a_eq = as_matrix([r for r, _ in eq], n) if eq else []
        a_ub = as_matrix([r for r, _ in ub], n) if ub else []
        for row in (*a_eq, *a_ub):
            if len(row) != n:
                raise StructuralError(f"constraint row of length {len(row)} for {n} variables")
        obj = None
        if objective is not None:
            obj = tuple(as_vector(objective))
            if len(obj) != n:
                raise StructuralError(f"objective of length {len(obj)} for {n} variables")
        free_set = frozenset(free)
        if any(j < 0 or j >= n for j in free_set):
            raise StructuralError("free index out of range")
        return cls(
            n=n,
            a_eq=tuple(tuple(r) for r in a_eq),
            b_eq=tuple(as_vector([b for _, b in eq])),
            a_ub=tuple(tuple(r) for r in a_ub),
            b_ub=tuple(as_vector([b for _, b in ub])),
            objective=obj,
            maximize=maximize,
            free=free_set,
        )

    def __post_init__(self):
        if len(self.a_eq) != len(self.b_eq) or len(self.a_ub) != len(self.b_ub):
            raise StructuralError("row count and rhs length differ")
        for row in (*self.a_eq, *self.a_ub):
            if len(row) != self.n:
                raise StructuralError(f"constraint row of length {len(row)} for {self.n} variables")

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.n:
            return False
        if any(x[j] < 0 for j in range(self.n) if j not in self.free):
            return False
        if any(dot(r, x) != b for r, b in zip(self.a_eq, self.b_eq)):
            return False
        return all(dot(r, x) <= b for r, b in zip(self.a_ub, self.b_ub))


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers proving ``{A_eq x = b_eq, A_ub x <= b_ub, x_N >= 0}`` empty.

    Conditions: ``y_ub >= 0``; ``A_eq^T y_eq + A_ub^T y_ub`` is ``>= 0`` on
    sign-constrained variables and ``= 0`` on free ones; and
    ``b_eq . y_eq + b_ub . y_ub < 0``.
    """

    y_eq: tuple[Fraction, ...]
    y_ub: tuple[Fraction, ...]

    def verify(self, prog: LinearProgram) -> bool:
        if len(self.y_eq) != len(prog.a_eq) or len(self.y_ub) != len(prog.a_ub):
            return False
        if any(y < 0 for y in self.y_ub):
            return False
        combo = [ZERO] * prog.n
        if prog.a_eq:
            combo = [a + b for a, b in zip(combo, vecmat(list(self.y_eq), [list(r) for r in prog.a_eq]))]
        if prog.a_ub:
            combo = [a + b for a, b in zip(combo, vecmat(list(self.y_ub), [list(r) for r in prog.a_ub]))]
        for j, v in enumerate(combo):
            if j in prog.free:
                if v != 0:
                    return False
            elif v < 0:
                return False
        return dot(self.y_eq, prog.b_eq) + dot(self.y_ub, prog.b_ub) < 0


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "feasible" | "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    certificate: FarkasCertificate | None = None
    ray: tuple[Fraction, ...] | None = None
    # duals of the minimisation form: y_eq free, y_ub <= 0
    dual_eq: tuple[Fraction, ...] | None = None
    dual_ub: tuple[Fraction, ...] | None = None
    pivots: int = field(default=0, compare=False)

    @property
    def feasible(self) -> bool:
        return self.status in ("feasible", "optimal", "unbounded")


class _Tableau:
    """Dense simplex tableau ``[B^-1 A | B^-1 | B^-1 b]``.

    The identity block of artificial columns is carried through every pivot,
    so ``B^-1`` (and therefore dual multipliers) can be read off at any time.
    """

    def __init__(self, a: list[list[Fraction]], b: list[Fraction]):
        self.m = len(a)
        self.ncols = len(a[0]) if a else 0
        m, n = self.m, self.ncols
        self.rows = []
        for i in range(m):
            art = [ZERO] * m
            art[i] = ONE
            self.rows.append(a[i] + art + [b[i]])
        self.basis = [n + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r: int, c: int, cost: list[Fraction]) -> None:
        row = self.rows[r]
        inv = 1 / row[c]
        if inv != 1:
            row = [x * inv if x else x for x in row]
            self.rows[r] = row
        nz = [j for j, x in enumerate(row) if x]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    for j in nz:
                        other[j] -= f * row[j]
        f = cost[c]
        if f:
            for j in nz:
                cost[j] -= f * row[j]
        self.basis[r] = c
        self.pivots += 1

    def reduced_costs(self, c: list[Fraction]) -> list[Fraction]:
        """``c_j - c_B B^-1 A_j`` for every column, plus ``-c_B x_B`` in the last slot."""
        d = list(c) + [ZERO]
        for i, bi in enumerate(self.basis):
            cb = c[bi]
            if cb:
                for j, x in enumerate(self.rows[i]):
                    if x:
                        d[j] -= cb * x
        return d

    def run(self, cost: list[Fraction], allowed: int) -> int | None:
        """Minimise with Bland's rule over columns ``< allowed``.

        Returns ``None`` at optimality, otherwise the entering column of an
        unbounded direction.
        """
        rhs = self.ncols + self.m
        while True:
            enter = next((j for j in range(allowed) if cost[j] < 0), None)
            if enter is None:
                return None
            best = None
            leave = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[rhs] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return enter
            self.pivot(leave, enter, cost)

    def binv_row_combo(self, weights: list[Fraction]) -> list[Fraction]:
        """``weights^T B^-1`` where weights are indexed by basis position."""
        n = self.ncols
        y = [ZERO] * self.m
        for i, w in enumerate(weights):
            if w:
                row = self.rows[i]
                for k in range(self.m):
                    v = row[n + k]
                    if v:
                        y[k] += w * v
        return y


def lp_solve(prog: LinearProgram) -> LpOutcome:
    """Solve ``prog`` exactly."""
    n = prog.n
    # standard form columns: original (split if free), then one slack per <= row
    col_of: list[tuple[int, int]] = []  # (original index, sign)
    for j in range(n):
        col_of.append((j, 1))
        if j in prog.free:
            col_of.append((j, -1))
    n_struct = len(col_of)
    m_eq, m_ub = len(prog.a_eq), len(prog.a_ub)
    ncols = n_struct + m_ub
    a: list[list[Fraction]] = []
    b: list[Fraction] = []
    signs: list[int] = []
    for k, (row, rhs) in enumerate([*zip(prog.a_eq, prog.b_eq), *zip(prog.a_ub, prog.b_ub)]):
        full = [row[j] * s for j, s in col_of] + [ZERO] * m_ub
        if k >= m_eq:
            full[n_struct + (k - m_eq)] = ONE
        s = -1 if rhs < 0 else 1
        if s < 0:
            full = [-x for x in full]
        a.append(full)
        b.append(rhs * s)
        signs.append(s)
    m = len(a)

    def to_original(xs: list[Fraction]) -> tuple[Fraction, ...]:
        out = [ZERO] * n
        for col, (j, s) in enumerate(col_of):
            if xs[col]:
                out[j] += s * xs[col]
        return tuple(out)

    if m == 0:
        x0 = tuple([ZERO] * n)
        return _no_constraints(prog, x0)

    tab = _Tableau(a, b)
    rhs_col = ncols + m

    # phase 1: minimise the sum of artificials
    c1 = [ZERO] * ncols + [ONE] * m
    cost = tab.reduced_costs(c1)
    tab.run(cost, ncols)
    w = sum((tab.rows[i][rhs_col] for i, bi in enumerate(tab.basis) if bi >= ncols), ZERO)
    if w > 0:
        y = tab.binv_row_combo([c1[bi] for bi in tab.basis])
        # y^T A_j <= 0 for every structural column and y^T b = w > 0; negate
        yo = [-yi * s for yi, s in zip(y, signs)]
        cert = FarkasCertificate(tuple(yo[:m_eq]), tuple(yo[m_eq:]))
        return LpOutcome("infeasible", certificate=cert, pivots=tab.pivots)

    # drive zero-level artificials out where a structural column allows it;
    # rows where none does are redundant and stay frozen at zero
    for i in range(m):
        if tab.basis[i] >= ncols:
            row = tab.rows[i]
            j = next((j for j in range(ncols) if row[j] != 0), None)
            if j is not None:
                tab.pivot(i, j, cost)

    def current_x() -> list[Fraction]:
        xs = [ZERO] * ncols
        for i, bi in enumerate(tab.basis):
            if bi < ncols:
                xs[bi] = tab.rows[i][rhs_col]
        return xs

    if prog.objective is None:
        return LpOutcome("feasible", x=to_original(current_x()), pivots=tab.pivots)

    sgn = -1 if prog.maximize else 1
    c2 = [sgn * prog.objective[j] * s for j, s in col_of] + [ZERO] * m_ub + [ZERO] * m
    cost = tab.reduced_costs(c2)
    enter = tab.run(cost, ncols)
    if enter is not None:
        d = [ZERO] * ncols
        d[enter] = ONE
        for i, bi in enumerate(tab.basis):
            if bi < ncols:
                d[bi] = -tab.rows[i][enter]
        return LpOutcome("unbounded", x=to_original(current_x()), ray=to_original(d), pivots=tab.pivots)

    xs = current_x()
    x = to_original(xs)
    value = dot(prog.objective, x)
    y = tab.binv_row_combo([c2[bi] for bi in tab.basis])
    y = [yi * s for yi, s in zip(y, signs)]
    if prog.maximize:
        # report duals of the minimisation of -c, negated back
        y = [-yi for yi in y]
    return LpOutcome(
        "optimal",
        x=x,
        value=value,
        dual_eq=tuple(y[:m_eq]),
        dual_ub=tuple(y[m_eq:]),
        pivots=tab.pivots,
    )


def _no_constraints(prog: LinearProgram, x0: tuple[Fraction, ...]) -> LpOutcome:
    if prog.objective is None:
        return LpOutcome("feasible", x=x0)
    sgn = -1 if prog.maximize else 1
    for j, cj in enumerate(prog.objective):
        c = sgn * cj
        if c < 0 or (j in prog.free and c != 0):
            ray = [ZERO] * prog.n
            ray[j] = ONE if c < 0 else -ONE
            return LpOutcome("unbounded", x=x0, ray=tuple(ray))
    return LpOutcome("optimal", x=x0, value=ZERO, dual_eq=(), dual_ub=())


def check_duality(prog: LinearProgram, out: LpOutcome) -> bool:
    """Re-verify an optimal outcome: primal feasibility, dual feasibility, equal values.

    Dual multipliers refer to the program written as a minimisation (of
    ``c`` or ``-c`` for a maximisation, with the sign folded back into the
    reported numbers): ``y_ub <= 0`` for a minimisation and ``>= 0`` for a
    maximisation.
    """
    if out.status != "optimal" or prog.objective is None:
        return False
    if not prog.satisfied_by(out.x):
        return False
    ye, yu = list(out.dual_eq), list(out.dual_ub)
    combo = [ZERO] * prog.n
    if prog.a_eq:
        combo = [p + q for p, q in zip(combo, vecmat(ye, [list(r) for r in prog.a_eq]))]
    if prog.a_ub:
        combo = [p + q for p, q in zip(combo, vecmat(yu, [list(r) for r in prog.a_ub]))]
    c = prog.objective
    for j in range(prog.n):
        if j in prog.free:
            if combo[j] != c[j]:
                return False
        elif prog.maximize:
            if combo[j] < c[j]:
                return False
        elif combo[j] > c[j]:
            return False
    if prog.maximize:
        if any(v < 0 for v in yu):
            return False
    elif any(v > 0 for v in yu):
        return False
    dual_value = dot(ye, prog.b_eq) + dot(yu, prog.b_ub)
    return dual_value == out.value


def verify_ray(prog: LinearProgram, out: LpOutcome) -> bool:
    """An unbounded ray keeps feasibility and strictly improves the objective."""
    if out.status != "unbounded" or out.ray is None:
        return False
    d = out.ray
    if any(d[j] < 0 for j in range(prog.n) if j not in prog.free):
        return False
    if any(v != 0 for v in matvec([list(r) for r in prog.a_eq], d)):
        return False
    if any(v > 0 for v in matvec([list(r) for r in prog.a_ub], d)):
        return False
    gain = dot(prog.objective, d)
    return gain > 0 if prog.maximize else gain < 0


def find_feasible(prog: LinearProgram) -> Vector | None:
    out = lp_solve(prog)
    return list(out.x) if out.feasible else None
