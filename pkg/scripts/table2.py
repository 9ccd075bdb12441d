"""Percentile table of every index on noise and structured pairs.

    python3 scripts/table2.py --reps 100 --out table2.csv
"""
import argparse
import time

from pptour.diagnostics import percentile_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--p", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="table2.csv")
    a = ap.parse_args()
    t0 = time.time()
    tab = percentile_table(n=a.n, n_reps=a.reps, p=a.p, seed=a.seed)
    tab.write(a.out)
    for r in sorted(tab.rows, key=lambda r: (r["index"], r["role"], r["family"])):
        print(f"{r['index']:>10s} {r['role']:>9s} {r['family']:>6s}  {r['p5']:.2f} {r['p95']:.2f}")
    print(f"{time.time() - t0:.0f}s -> {a.out}")


if __name__ == "__main__":
    main()
