"""Compare learners on sample complexity and per-round computational cost.

Small-scale version of the headline experiment: each learner runs a batch on
uniform matroid instances of growing dimension, and we report the mean and
quartiles of the stopping time plus the average time to compute the next
action.  The dense learners (hedge, adahedge, uniform) enumerate all C(d, k)
actions, so their per-round cost grows with d, while the sparse learners
(ofw, lloo) stay nearly flat.
"""

import argparse

from combexplore.batch import run_batch
from combexplore.engine import GameConfig
from combexplore.scenarios import make_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--dims", type=int, nargs="+", default=[5, 10])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--sigma", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    learners = ["uniform", "hedge", "adahedge", "ofw", "lloo"]
    print(f"{'d':>3} {'learner':>9} {'mean tau':>9} {'q1':>7} {'q3':>7} {'errs':>5} {'us/round':>9} {'support':>8}")
    for d in args.dims:
        scenario = make_scenario(f"uniform_matroid:d={d},k={args.k},sigma={args.sigma}")
        for kind in learners:
            cfg = GameConfig(learner_kind=kind, delta=0.1)
            s = run_batch(scenario, cfg, runs=args.runs, seed=args.seed, workers=1)
            print(
                f"{d:>3} {kind:>9} {s.mean_tau:>9.0f} {s.q1_tau:>7.0f} {s.q3_tau:>7.0f} "
                f"{s.error_count:>5} {s.mean_round_nanos / 1000:>9.1f} {s.mean_support_size:>8.1f}"
            )


if __name__ == "__main__":
    main()
