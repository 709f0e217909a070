"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat R] [--nmax N]

Times full partition enumeration and the fictitious-conversion iteration on
random fair networks of increasing size, and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from coconet import _fallback
from coconet.solver import CONSISTENCY_RTOL

try:
    from coconet import _kernels
except ImportError:  # extension not built
    _kernels = None


def random_fair(n: int, rng):
    W = rng.uniform(0, 1, size=(n, n))
    np.fill_diagonal(W, 0.0)
    W /= W.sum(axis=0, keepdims=True) * rng.uniform(1.0, 2.0, size=n)
    m = rng.uniform(0.1, 10, size=n)
    c = rng.uniform(0, 20, size=n)
    return m, c, c / m, W


def bench(backend, n: int, repeat: int, rng) -> tuple[float, float]:
    m, c, l, W = random_fair(n, rng)
    pts = [rng.uniform(-30, 50, size=n) for _ in range(repeat)]
    t_enum = timeit.timeit(lambda: [backend.enumerate_candidates(m, c, l, W, a, CONSISTENCY_RTOL) for a in pts], number=1)
    t_fict = timeit.timeit(lambda: [backend.fictitious(m, c, l, W, np.abs(a), CONSISTENCY_RTOL, 3 * n) for a in pts], number=1)
    return t_enum / repeat, t_fict / repeat


def agree(n: int, rng) -> bool:
    m, c, l, W = random_fair(n, rng)
    a = rng.uniform(-30, 50, size=n)
    k1, S1 = _kernels.enumerate_candidates(m, c, l, W, a, CONSISTENCY_RTOL)
    k2, S2 = _fallback.enumerate_candidates(m, c, l, W, a, CONSISTENCY_RTOL)
    return np.array_equal(k1, k2) and np.allclose(S1, S2, rtol=1e-10, atol=1e-10)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--nmax", type=int, default=8)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _fallback)] + ([("cython", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled extension not available; timing the fallback only")
    print(f"{'n':>3} {'backend':>8} {'enumerate [ms]':>15} {'fictitious [us]':>16}")
    for n in range(2, args.nmax + 1):
        times = {}
        for name, mod in backends:
            te, tf = bench(mod, n, args.repeat, np.random.default_rng(n))
            times[name] = (te, tf)
            print(f"{n:>3} {name:>8} {te * 1e3:>15.3f} {tf * 1e6:>16.1f}")
        if _kernels:
            (pe, pf), (ce, cf) = times["python"], times["cython"]
            print(f"{n:>3} {'speedup':>8} {pe / ce:>14.1f}x {pf / cf:>15.1f}x   agree={agree(n, rng)}")


if __name__ == "__main__":
    main()
