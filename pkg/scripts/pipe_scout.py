"""Scout (search_better) then geodesic refinement with TIC on the pipe family.

Compare proposal samplers with --sampler window|blend.

    python3 scripts/pipe_scout.py --seeds 0 1 2 --sampler window
"""
import argparse
import time

from pptour.geometry import Frame, proj_dist
from pptour.optimizer import OptimizerConfig, scout_then_refine
from pptour.simdata import SimSpec, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, nargs="+", default=list(range(10)))
    ap.add_argument("--sampler", default="window", choices=["window", "blend"])
    ap.add_argument("--max-tries", type=int, default=5000)
    ap.add_argument("--index", default="tic")
    a = ap.parse_args()
    tgt = Frame.axes(6, 4, 5)
    for s in a.seeds:
        t0 = time.time()
        sc = OptimizerConfig(method="better", alpha=0.5, cooling=1.0, max_tries=a.max_tries, seed=s,
                             interp_steps=5, sampler=a.sampler)
        rf = OptimizerConfig(method="geodesic", seed=s + 1000, max_tries=10, interp_steps=5)
        h = scout_then_refine(generate(SimSpec("pipe", seed=s)), a.index, sc, rf)
        e = h.metadata["scout_end"]
        print(f"seed {s}: scout {proj_dist(h.frames[e], tgt):.3f} -> refined {proj_dist(h.final_frame, tgt):.3f}  "
              f"value {h.anchor_values()[-1]:.3f}  evals {h.metadata['n_evals']}  {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
