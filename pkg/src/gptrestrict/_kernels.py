"""Floating-point kernels for the unambiguous-discrimination grid scan.

The decision procedures of the package are exact and never touch these
kernels; they only serve the numerical reproduction of the unrestricted
optimum.  numba is used when importable, unless ``GPTRESTRICT_NO_NUMBA=1``,
in which case a vectorised numpy version runs instead.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("GPTRESTRICT_NO_NUMBA", "") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    HAVE_NUMBA = False


def _feasible_py(q1, q2, s, capped):
    c = 1.0 - q1 - q2
    nsq = (q1 * q1 + q2 * q2 + 2.0 * q1 * q2 * s) / 4.0
    half = 1.0 - (q1 + q2) / 2.0
    ok = half >= 0.0 and half * half >= nsq and 0.0 <= q1 <= 1.0 and 0.0 <= q2 <= 1.0
    if capped:
        ok = ok and c >= -1e-15
    return ok


def scan_numpy(s: float, n: int, capped: bool):
    """Best ``(q1, q2)`` on an ``n x n`` grid over the unit square."""
    g = np.linspace(0.0, 1.0, n)
    q1, q2 = np.meshgrid(g, g, indexing="ij")
    half = 1.0 - (q1 + q2) / 2.0
    nsq = (q1 * q1 + q2 * q2 + 2.0 * q1 * q2 * s) / 4.0
    ok = (half >= 0.0) & (half * half >= nsq)
    if capped:
        ok &= (q1 + q2) <= 1.0 + 1e-15
    score = np.where(ok, q1 + q2, -1.0)
    k = int(np.argmax(score))
    i, j = divmod(k, n)
    return float(g[i]), float(g[j])


if HAVE_NUMBA:
    @njit(cache=True)
    def _scan_jit(s, n, capped):
        best = -1.0
        bi = 0.0
        bj = 0.0
        step = 1.0 / (n - 1)
        for i in range(n):
            q1 = i * step
            for j in range(n):
                q2 = j * step
                half = 1.0 - (q1 + q2) / 2.0
                nsq = (q1 * q1 + q2 * q2 + 2.0 * q1 * q2 * s) / 4.0
                if half < 0.0 or half * half < nsq:
                    continue
                if capped and q1 + q2 > 1.0 + 1e-15:
                    continue
                if q1 + q2 > best:
                    best = q1 + q2
                    bi = q1
                    bj = q2
        return bi, bj

    def scan(s: float, n: int, capped: bool):
        return _scan_jit(float(s), int(n), bool(capped))
else:
    scan = scan_numpy


def bisect_ray(q1: float, q2: float, s: float, capped: bool, iters: int = 80):
    """Push ``(q1, q2)`` outward along its ray to the feasibility boundary."""
    lo, hi = 1.0, 1.0
    while _feasible_py(q1 * hi, q2 * hi, s, capped) and hi < 1e6:
        hi *= 2.0
    if hi == 1.0:
        return q1, q2
    for _ in range(iters):
        mid = (lo + hi) / 2.0
        if _feasible_py(q1 * mid, q2 * mid, s, capped):
            lo = mid
        else:
            hi = mid
    return q1 * lo, q2 * lo


def refine_boundary(q1: float, q2: float, s: float, capped: bool, width: float, iters: int = 100):
    """Golden-section search over the ray direction near ``(q1, q2)``.

    The direction is ``phi = q1 / (q1 + q2)``; for each ``phi`` the boundary
    point is found by :func:`bisect_ray` and the objective is ``q1 + q2``.
    """
    total = q1 + q2
    if total == 0.0:
        return q1, q2

    def boundary(phi):
        return bisect_ray(phi, 1.0 - phi, s, capped)

    def value(phi):
        a, b = boundary(phi)
        return a + b

    phi0 = q1 / total
    lo, hi = max(0.0, phi0 - width), min(1.0, phi0 + width)
    ratio = (5.0 ** 0.5 - 1.0) / 2.0
    x1 = hi - ratio * (hi - lo)
    x2 = lo + ratio * (hi - lo)
    f1, f2 = value(x1), value(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = value(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = value(x1)
    best = boundary((lo + hi) / 2.0)
    if best[0] + best[1] >= total:
        return best
    return q1, q2
