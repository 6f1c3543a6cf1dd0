"""Compiled vs pure-Python kernel throughput.

    python benchmarks/bench_backends.py [--repeat 3] [--quick]

Both backends run the same seeded workload; the script checks that they
return identical counters before reporting timings.
"""

import argparse
import time

from graphsort import _backend
from graphsort.async_exec import run_async
from graphsort.graph import PairWeightSpec, build_sampler
from graphsort.parallel import MatchingSamplerSpec, run_parallel
from graphsort.rng import Stream
from graphsort.sequential import make_input, run_sequential


def workloads(quick):
    n = 128 if quick else 512
    h = build_sampler(PairWeightSpec.harmonic(n))
    u = build_sampler(PairWeightSpec.uniform(n // 2))
    x = make_input("reverse", n)
    y = make_input("reverse", n // 2)
    return {
        f"harmonic n={n}": lambda b: run_sequential(x.copy(), h, rng=Stream(1), backend=b),
        f"uniform n={n // 2}": lambda b: run_sequential(y.copy(), u, rng=Stream(2), backend=b),
        f"structured n={n}": lambda b: run_parallel(
            x.copy(), MatchingSamplerSpec("structured", n), Stream(3), backend=b),
        f"thinned n={n} p={n // 8}": lambda b: run_parallel(
            x.copy(), MatchingSamplerSpec("thinned", n, n // 8), Stream(4), backend=b),
        f"async-mark n={n} p={n // 8}": lambda b: run_async(
            x.copy(), n // 8, h, protocol="mark", rng=Stream(5), backend=b),
    }


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    if not _backend.compiled_available():
        raise SystemExit("compiled extension not built; run: pip install -e . --no-build-isolation")
    print(f"{'workload':<28}{'comparisons':>12}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for name, fn in workloads(args.quick).items():
        tp, rp = best_of(lambda: fn("python"), 1 if not args.quick else args.repeat)
        tc, rc = best_of(lambda: fn("cython"), args.repeat)
        assert (rp.comparisons, rp.swaps, rp.rounds) == (rc.comparisons, rc.swaps, rc.rounds), name
        print(f"{name:<28}{rc.comparisons:>12}{tp:>11.4f}{tc:>11.5f}{tp / tc:>8.0f}x")


if __name__ == "__main__":
    main()
