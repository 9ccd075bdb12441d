"""Rotation scan of every index on a structured pair.

    python3 scripts/rotation.py --family sine --out rotation.csv
"""
import argparse
import csv

from pptour.diagnostics import rotation_scan, spread
from pptour.indexes import INDEX_NAMES
from pptour.simdata import SimSpec, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--family", default="sine")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--angles", type=int, default=36)
    ap.add_argument("--out", default=None)
    a = ap.parse_args()
    y = generate(SimSpec(a.family, seed=a.seed)).values[:, -2:]
    res = rotation_scan(y, list(INDEX_NAMES), a.angles)
    for k in INDEX_NAMES:
        print(f"{k:>10s}  spread {spread(res[k]):.3f}")
    if a.out:
        with open(a.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(res))
            for i in range(len(res["angle"])):
                w.writerow([repr(float(res[k][i])) for k in res])


if __name__ == "__main__":
    main()
