"""Command line front end: `run` batches, `complexity` evaluation, `trace` dumps.

Flags can also be loaded from a JSON config file whose keys mirror the flag
names (--config); explicit flags win over the file.  The default worker count
comes from the COMBEXPLORE_WORKERS environment variable when set.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .batch import default_workers, emit_csv, emit_run_trace, run_batch
from .complexity import compute_complexity, lower_bound
from .engine import GameConfig, run_combgame
from .scenarios import make_scenario

LEARNERS = ("hedge", "adahedge", "ofw", "lloo", "uniform")
TRACKINGS = ("c_track", "d_track", "direct_sample")
THRESHOLDS = ("stylized", "theoretical_subgaussian", "theoretical_gaussian")


def _add_common(p):
    p.add_argument("--scenario", help="family:key=val,... e.g. uniform_matroid:d=5,k=3,sigma=0.1")
    p.add_argument("--learner", choices=LEARNERS, default="lloo")
    p.add_argument("--tracking", choices=TRACKINGS, default="d_track")
    p.add_argument("--threshold", choices=THRESHOLDS, default="stylized")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON file with keys mirroring the flags")


def build_parser():
    parser = argparse.ArgumentParser(prog="combexplore")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="batch Monte-Carlo runs, summarized to CSV")
    _add_common(run_p)
    run_p.add_argument("--runs", type=int, default=50)
    run_p.add_argument("--workers", type=int, default=None)
    run_p.add_argument("--out", help="CSV output path (default: print summary)")

    cx_p = sub.add_parser("complexity", help="allocation-game value and lower bound")
    cx_p.add_argument("--scenario", required=False)
    cx_p.add_argument("--delta", type=float, default=0.1)
    cx_p.add_argument("--tol", type=float, default=1e-6)
    cx_p.add_argument("--max-iter", type=int, default=100_000)
    cx_p.add_argument("--config", help="JSON file with keys mirroring the flags")

    tr_p = sub.add_parser("trace", help="single-run detailed trace")
    _add_common(tr_p)
    tr_p.add_argument("--out", required=True, help="trace output path")
    return parser


def _apply_config_file(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        for key, val in loaded.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise SystemExit(f"unknown config key {key!r}")
            # only fill values the command line left at the parser default
            if f"--{key.replace('_', '-')}" not in sys.argv and f"--{key}" not in sys.argv:
                setattr(args, attr, val)
    return args


def _game_config(args) -> GameConfig:
    return GameConfig(
        learner_kind=args.learner,
        tracking=args.tracking,
        threshold_mode=args.threshold,
        delta=args.delta,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args = _apply_config_file(args)
    if not args.scenario:
        raise SystemExit("--scenario is required (flag or config file)")
    scenario = make_scenario(args.scenario)

    if args.command == "run":
        workers = args.workers if args.workers is not None else default_workers()
        summary = run_batch(scenario, _game_config(args), args.runs, args.seed, workers)
        if args.out:
            emit_csv([summary], args.out)
            print(f"wrote {args.out}")
        else:
            print(
                f"{summary.scenario} learner={summary.learner} runs={summary.runs} "
                f"mean_tau={summary.mean_tau:.1f} q1={summary.q1_tau:.1f} q3={summary.q3_tau:.1f} "
                f"errors={summary.error_count}"
            )
        return 0

    if args.command == "complexity":
        res = compute_complexity(
            scenario.instance, scenario.action_space, scenario.answer_space, tol=args.tol, max_iter=args.max_iter
        )
        lb = lower_bound(args.delta, res.value)
        print(f"complexity={res.value:.8g} iterations={res.iterations} residual={res.residual:.3g}")
        tag = " (vacuous)" if lb.vacuous else ""
        print(f"lower_bound[delta={args.delta}]={lb.value:.6g}{tag}")
        return 0

    if args.command == "trace":
        config = _game_config(args)
        config.record_trace = True
        rng = np.random.default_rng([args.seed, 0])
        result = run_combgame(config, scenario.instance, scenario.action_space, scenario.answer_space, rng)
        emit_run_trace(result, args.out)
        print(
            f"tau={result.stopping_time} recommended={result.recommended} "
            f"correct={result.correct} -> {args.out}"
        )
        return 0

    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    raise SystemExit(main())
