"""Time the UD grid scan with numba and with the numpy fallback.

Run as ``python benchmarks/bench_ud_kernel.py [grid]``.  The exact decision
procedures never use these kernels, so this is the only place where the
two paths can be compared.
"""
import sys
import time

from gptrestrict import _kernels


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2001
    s = 0.0
    t_np, r_np = best_of(lambda: _kernels.scan_numpy(s, n, False))
    print(f"numpy  grid {n}x{n}: {t_np * 1e3:8.2f} ms  best {r_np}")
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled (GPTRESTRICT_NO_NUMBA)")
        return
    _kernels.scan(s, 11, False)  # compile
    t_jit, r_jit = best_of(lambda: _kernels.scan(s, n, False))
    print(f"numba  grid {n}x{n}: {t_jit * 1e3:8.2f} ms  best {r_jit}")
    print(f"speedup x{t_np / t_jit:.1f}; same optimum: {r_np == r_jit}")


if __name__ == "__main__":
    main()
