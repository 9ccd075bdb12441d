"""Median evaluation time of each index against sample size.

    python3 scripts/timing.py --sizes 100 1000 5000
"""
import argparse

from pptour.diagnostics import timing_benchmark
from pptour.indexes import INDEX_NAMES


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 5000])
    ap.add_argument("--reps", type=int, default=5)
    a = ap.parse_args()
    for r in timing_benchmark(list(INDEX_NAMES), a.sizes, a.reps):
        print(f"{r['index']:>10s} n={r['n']:>5d}  {r['median_ms']:9.2f} ms")


if __name__ == "__main__":
    main()
