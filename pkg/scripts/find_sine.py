"""Geodesic guided tour with splines2d on the sine family, several seeds.

    python3 scripts/find_sine.py --seeds 10
"""
import argparse
import time

from pptour.geometry import Frame, proj_dist
from pptour.optimizer import OptimizerConfig, guided_tour
from pptour.simdata import SimSpec, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--index", default="splines2d")
    ap.add_argument("--max-tries", type=int, default=25)
    a = ap.parse_args()
    tgt = Frame.axes(6, 4, 5)
    for s in range(a.seeds):
        t0 = time.time()
        h = guided_tour(generate(SimSpec("sine", seed=s)), a.index,
                        OptimizerConfig(method="geodesic", seed=s, max_tries=a.max_tries, interp_steps=10))
        print(f"seed {s}: anchors {len(h.anchors):3d}  final proj_dist {proj_dist(h.final_frame, tgt):.3f}  "
              f"value {h.anchor_values()[-1]:.3f}  {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
