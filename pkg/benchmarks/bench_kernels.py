"""Time the compiled loop-Hafnian kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 8,10,12,14] [--repeats 3]
"""
import argparse
import time

import numpy as np

from ngbsim import hafnian as hf


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,10,12,14")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if "compiled" not in hf.KERNELS:
        raise SystemExit("compiled kernels are not built; run `pip install --no-build-isolation -e .` first")
    py, cy = hf.KERNELS["python"], hf.KERNELS["compiled"]
    rng = np.random.default_rng(args.seed)

    print("kernel\tsize\tpython_s\tcompiled_s\tspeedup\trel_diff")
    for n in (int(v) for v in args.sizes.split(",")):
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a, f = (z + z.T) / 2, rng.normal(size=n) + 1j * rng.normal(size=n)
        tp, vp = best_time(lambda: py.lhaf_enum(a, f, True), args.repeats)
        tc, vc = best_time(lambda: cy.lhaf_enum(a, f, True), args.repeats)
        print(f"lhaf_enum\t{n}\t{tp:.4e}\t{tc:.4e}\t{tp / tc:.1f}\t{abs(vp - vc) / abs(vp):.1e}")

    # repeated rows: 3 distinct rows, total multiplicity = size
    for n in (int(v) for v in args.sizes.split(",")):
        mult = [n // 3 + (k < n % 3) for k in range(3)]
        z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        a, f = (z + z.T) / 2, rng.normal(size=3) + 1j * rng.normal(size=3)
        tp, vp = best_time(lambda: py.lhaf_repeated(a, f, mult, True), args.repeats)
        tc, vc = best_time(lambda: cy.lhaf_repeated(a, f, mult, True), args.repeats)
        print(f"lhaf_repeated\t{n}\t{tp:.4e}\t{tc:.4e}\t{tp / tc:.1f}\t{abs(vp - vc) / abs(vp):.1e}")


if __name__ == "__main__":
    main()
