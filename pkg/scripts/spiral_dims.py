"""Skinny scout/refine on the spiral family for p = 4, 5, 6: convergence
and mean pairwise anchor distance.

    python3 scripts/spiral_dims.py --sampler blend
"""
import argparse

import numpy as np

from pptour.geometry import Frame, proj_dist
from pptour.optimizer import OptimizerConfig, pairwise_anchor_distances, scout_then_refine
from pptour.simdata import SimSpec, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--sampler", default="blend", choices=["window", "blend"])
    ap.add_argument("--max-tries", type=int, default=500)
    ap.add_argument("--alpha", type=float, default=0.5)
    a = ap.parse_args()
    for p in (4, 5, 6):
        tgt = Frame.axes(p, p - 2, p - 1)
        d_final, d_pair = [], []
        for s in range(a.seeds):
            sc = OptimizerConfig(method="better", alpha=a.alpha, cooling=1.0, max_tries=a.max_tries, seed=s,
                                 interp_steps=5, sampler=a.sampler)
            rf = OptimizerConfig(method="geodesic", seed=s + 1000, max_tries=5, interp_steps=5)
            h = scout_then_refine(generate(SimSpec("spiral", p=p, seed=s)), "skinny", sc, rf)
            d_final.append(proj_dist(h.final_frame, tgt))
            d_pair.append(np.mean(pairwise_anchor_distances(h)))
        conv = sum(d <= 0.3 for d in d_final)
        print(f"p={p}: converged {conv}/{a.seeds}  mean pairwise anchor distance {np.mean(d_pair):.3f}")


if __name__ == "__main__":
    main()
