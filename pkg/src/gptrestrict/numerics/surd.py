"""Exact sums of square roots of rationals.

A :class:`NormExpression` is ``c + k_1 sqrt(r_1) + ... + k_m sqrt(r_m)`` with
rational ``c, k_i`` and positive rational ``r_i``.  It arises as the extreme
value ``c +/- ||v||`` of an affine functional on a Euclidean ball, and sums of
such values stay in the same class.

Radicands are kept canonical: two radicands share a class when their
product is a rational square, and each class is stored once.  Square roots of
pairwise inequivalent rationals are linearly independent over Q, so an
expression is zero exactly when every stored coefficient is zero.  Signs of
nonzero expressions are then settled by interval arithmetic whose precision
is doubled until the enclosing interval excludes zero, which must happen.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

import mpmath

Number = Union[Fraction, "NormExpression"]

ZERO = Fraction(0)


def rational_sqrt(r: Fraction) -> Fraction | None:
    """``sqrt(r)`` if it is rational, else ``None``."""
    if r < 0:
        return None
    p, q = r.numerator, r.denominator
    sp, sq = isqrt(p), isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return None


class NormExpression:
    __slots__ = ("rational", "terms")

    def __init__(self, rational=ZERO, terms=()):
        self.rational = Fraction(rational)
        canon: dict[Fraction, Fraction] = {}
        extra = ZERO
        for k, r in terms:
            k, r = Fraction(k), Fraction(r)
            if k == 0 or r == 0:
                continue
            if r < 0:
                raise ValueError("negative radicand")
            root = rational_sqrt(r)
            if root is not None:
                extra += k * root
                continue
            for s in canon:
                rs = rational_sqrt(r * s)
                if rs is not None:
                    canon[s] += k * rs / s
                    break
            else:
                canon[r] = k
        self.rational += extra
        self.terms = tuple(sorted((r, k) for r, k in canon.items() if k != 0))

    @classmethod
    def of(cls, c, norm_sq, sign: int = 1) -> Number:
        """``c + sign * sqrt(norm_sq)``, collapsed to a Fraction when rational."""
        return _collapse(cls(c, [(sign, norm_sq)]))

    @property
    def c(self) -> Fraction:
        return self.rational

    @property
    def norm_sq(self) -> Fraction:
        """Square of the single surd term (only meaningful for ``c +/- sqrt(n)``)."""
        if len(self.terms) != 1:
            raise ValueError("norm_sq is defined for single-term expressions")
        r, k = self.terms[0]
        return k * k * r

    def is_rational(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, NormExpression):
            return _collapse(NormExpression(self.rational + other.rational,
                                            [(k, r) for r, k in self.terms + other.terms]))
        if isinstance(other, (int, Fraction)):
            return _collapse(NormExpression(self.rational + other, [(k, r) for r, k in self.terms]))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return NormExpression(-self.rational, [(-k, r) for r, k in self.terms])

    def __sub__(self, other):
        if isinstance(other, (NormExpression, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return _collapse(NormExpression(self.rational * other, [(k * other, r) for r, k in self.terms]))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def sign(self) -> int:
        if not self.terms:
            return (self.rational > 0) - (self.rational < 0)
        if len(self.terms) == 1:
            r, k = self.terms[0]
            c = self.rational
            s_surd = 1 if k > 0 else -1
            if c == 0:
                return s_surd
            s_c = 1 if c > 0 else -1
            if s_c == s_surd:
                return s_c
            # opposite signs: compare c^2 against k^2 r
            lhs, rhs = c * c, k * k * r
            return s_c if lhs > rhs else s_surd
        return _interval_sign(self)

    def __float__(self):
        return float(self.rational) + sum(float(k) * float(r) ** 0.5 for r, k in self.terms)

    def decimal(self, digits: int = 12) -> str:
        with mpmath.workdps(digits + 10):
            v = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for r, k in self.terms:
                v += (mpmath.mpf(k.numerator) / k.denominator) * mpmath.sqrt(
                    mpmath.mpf(r.numerator) / r.denominator)
            return mpmath.nstr(v, digits)

    def _cmp(self, other) -> int:
        return compare(self, other)

    def __eq__(self, other):
        if isinstance(other, (NormExpression, int, Fraction)):
            return compare(self, other) == 0
        return NotImplemented

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __hash__(self):
        if not self.terms:
            return hash(self.rational)
        return hash((self.rational, self.terms))

    def __repr__(self):
        parts = [str(self.rational)] + [f"{k}*sqrt({r})" for r, k in self.terms]
        return "NormExpression(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        out = {"c": str(self.rational), "decimal": self.decimal()}
        if len(self.terms) == 1:
            out["norm_sq"] = str(self.norm_sq)
            out["sign"] = 1 if self.terms[0][1] > 0 else -1
        else:
            out["terms"] = [[str(k), str(r)] for r, k in self.terms]
        return out

    @classmethod
    def from_json(cls, d: dict) -> Number:
        if "norm_sq" in d:
            return cls.of(Fraction(d["c"]), Fraction(d["norm_sq"]), d.get("sign", 1))
        return _collapse(cls(Fraction(d["c"]), [(Fraction(k), Fraction(r)) for k, r in d.get("terms", [])]))


def _collapse(x: NormExpression) -> Number:
    return x.rational if not x.terms else x


def _interval_sign(x: NormExpression) -> int:
    # nonzero is guaranteed by canonical form, so this loop terminates
    prec = 64
    while True:
        iv = mpmath.iv
        iv.prec = prec
        acc = iv.mpf([x.rational.numerator, x.rational.numerator]) / x.rational.denominator
        for r, k in x.terms:
            root = iv.sqrt(iv.mpf(r.numerator) / r.denominator)
            acc += (iv.mpf(k.numerator) / k.denominator) * root
        if acc.a > 0:
            return 1
        if acc.b < 0:
            return -1
        prec *= 2


def as_number(x) -> Number:
    if isinstance(x, NormExpression):
        return _collapse(x)
    return Fraction(x)


def compare(a, b) -> int:
    """Exact three-way comparison of rationals and norm expressions."""
    if not isinstance(a, NormExpression) and not isinstance(b, NormExpression):
        a, b = Fraction(a), Fraction(b)
        return (a > b) - (a < b)
    diff = a - b
    if isinstance(diff, NormExpression):
        return diff.sign()
    return (diff > 0) - (diff < 0)


def as_exact(x) -> Fraction | None:
    """The rational value of ``x`` if it has one."""
    if isinstance(x, NormExpression):
        return x.rational if not x.terms else None
    return Fraction(x)


def to_json_number(x):
    if isinstance(x, NormExpression):
        return x.to_json()
    return str(Fraction(x))


def from_json_number(v):
    if isinstance(v, dict):
        return NormExpression.from_json(v)
    return Fraction(v)
