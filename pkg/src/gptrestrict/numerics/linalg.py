"""Exact dense linear algebra over the rationals.

Matrices are plain lists of rows of :class:`fractions.Fraction`.  Nothing
here ever touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

Vector = list[Fraction]
Matrix = list[list[Fraction]]


class StructuralError(ValueError):
    """Raised for ragged matrices and mismatched dimensions."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # decimal reading, so 0.6 means 3/5 rather than its binary expansion
        return Fraction(repr(x))
    return Fraction(x)


def as_vector(v: Sequence) -> Vector:
    return [to_fraction(x) for x in v]


def as_matrix(rows: Sequence[Sequence], cols: int | None = None) -> Matrix:
    m = [as_vector(r) for r in rows]
    if m:
        width = len(m[0]) if cols is None else cols
        for r in m:
            if len(r) != width:
                raise StructuralError(f"ragged matrix: row of length {len(r)}, expected {width}")
    return m


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise StructuralError(f"dot of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def matvec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return [dot(row, v) for row in m]


def vecmat(v: Sequence[Fraction], m: Matrix) -> Vector:
    """Row vector times matrix, i.e. ``m^T v``."""
    if len(v) != len(m):
        raise StructuralError(f"vecmat of length {len(v)} against {len(m)} rows")
    cols = len(m[0]) if m else 0
    out = [Fraction(0)] * cols
    for coeff, row in zip(v, m):
        if coeff:
            for j, a in enumerate(row):
                if a:
                    out[j] += coeff * a
    return out


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def _integer_rows(m: Matrix) -> list[list[int]]:
    rows = []
    for r in m:
        den = lcm(*(x.denominator for x in r)) if r else 1
        rows.append([int(x * den) for x in r])
    return rows


def rank(m: Sequence[Sequence]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    a = _integer_rows(as_matrix(m))
    if not a or not a[0]:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, rows):
            f = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c, cols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
        prev = p
        r += 1
    return r


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [row[:] for row in as_matrix(m)]
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(m: Sequence[Sequence], cols: int | None = None) -> Matrix:
    """Basis of ``{x : m x = 0}`` as a list of vectors."""
    a = as_matrix(m)
    n = cols if cols is not None else (len(a[0]) if a else 0)
    if not a:
        return identity(n)
    red, pivots = rref(a)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -red[i][f]
        basis.append(x)
    return basis


@dataclass(frozen=True)
class Solution:
    """A particular solution of ``m x = rhs`` plus the homogeneous directions."""

    x: Vector
    nullspace: Matrix

    @property
    def underdetermined(self) -> bool:
        return bool(self.nullspace)


def solve_linear(m: Sequence[Sequence], rhs: Sequence) -> Solution | None:
    """Solve ``m x = rhs`` exactly; ``None`` when the system is inconsistent."""
    a = as_matrix(m)
    b = as_vector(rhs)
    if len(a) != len(b):
        raise StructuralError(f"{len(a)} rows but rhs of length {len(b)}")
    if not a:
        return Solution([], [])
    n = len(a[0])
    aug = [row + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = red[i][n]
    return Solution(x, nullspace(a, n))


def in_span(vectors: Sequence[Sequence], target: Sequence) -> bool:
    if not vectors:
        return all(t == 0 for t in target)
    return solve_linear(transpose(as_matrix(vectors)), target) is not None
