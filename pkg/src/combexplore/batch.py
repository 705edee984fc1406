"""Batch Monte-Carlo execution and CSV/trace emission.

Each run owns an rng stream seeded by (seed, run_index), so summaries are
bit-identical regardless of worker count (wall-clock timing fields aside,
which measure the machine, not the simulation).
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import GameConfig, RunResult, run_combgame
from .scenarios import Scenario

__all__ = ["BatchSummary", "run_batch", "default_workers", "emit_csv", "read_csv", "emit_run_trace"]

WORKERS_ENV_VAR = "COMBEXPLORE_WORKERS"

CSV_FIELDS = [
    "scenario",
    "learner",
    "tracking",
    "threshold_mode",
    "d",
    "runs",
    "delta",
    "mean_tau",
    "q1_tau",
    "q3_tau",
    "error_count",
    "mean_round_nanos",
    "mean_support_size",
]


@dataclass
class BatchSummary:
    scenario: str
    learner: str
    tracking: str
    threshold_mode: str
    d: int
    runs: int
    delta: float
    mean_tau: float
    q1_tau: float
    q3_tau: float
    error_count: int
    mean_round_nanos: float
    mean_support_size: float
    taus: np.ndarray | None = None
    tracking_violations: int = 0

    def deterministic_fields(self) -> dict:
        """Summary fields that are a pure function of (scenario, config, seed);
        excludes the wall-clock timing measurement."""
        out = {f: getattr(self, f) for f in CSV_FIELDS if f != "mean_round_nanos"}
        out["taus"] = None if self.taus is None else tuple(self.taus.tolist())
        out["tracking_violations"] = self.tracking_violations
        return out


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _one_run(args):
    scenario, config, seed, idx = args
    rng = np.random.default_rng([seed, idx])
    result = run_combgame(config, scenario.instance, scenario.action_space, scenario.answer_space, rng)
    return idx, result


def run_batch(scenario: Scenario, config: GameConfig, runs: int, seed: int, workers: int | None = None) -> BatchSummary:
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if workers is None:
        workers = default_workers()
    jobs = [(scenario, config, seed, idx) for idx in range(runs)]
    results: list[RunResult | None] = [None] * runs
    if workers <= 1 or runs == 1:
        for job in jobs:
            idx, res = _one_run(job)
            results[idx] = res
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, res in pool.map(_one_run, jobs, chunksize=max(1, runs // (4 * workers))):
                results[idx] = res
    taus = np.array([r.stopping_time for r in results], dtype=np.int64)
    errors = sum(1 for r in results if not r.correct)
    return BatchSummary(
        scenario=scenario.name,
        learner=config.learner_kind,
        tracking=config.tracking,
        threshold_mode=config.threshold_mode,
        d=scenario.instance.d,
        runs=runs,
        delta=config.delta,
        mean_tau=float(taus.mean()),
        q1_tau=float(np.percentile(taus, 25)),
        q3_tau=float(np.percentile(taus, 75)),
        error_count=errors,
        mean_round_nanos=float(np.mean([r.per_round_nanos_mean for r in results])),
        mean_support_size=float(np.mean([r.mean_support_size for r in results])),
        taus=taus,
        tracking_violations=sum(r.tracking_violations for r in results),
    )


def emit_csv(summaries, path):
    """One row per summary, schema frozen in CSV_FIELDS."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for s in summaries:
                writer.writerow({f: getattr(s, f) for f in CSV_FIELDS})
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc


def read_csv(path):
    """Parse an emitted CSV back into BatchSummary objects (no taus)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                BatchSummary(
                    scenario=row["scenario"],
                    learner=row["learner"],
                    tracking=row["tracking"],
                    threshold_mode=row["threshold_mode"],
                    d=int(row["d"]),
                    runs=int(row["runs"]),
                    delta=float(row["delta"]),
                    mean_tau=float(row["mean_tau"]),
                    q1_tau=float(row["q1_tau"]),
                    q3_tau=float(row["q3_tau"]),
                    error_count=int(row["error_count"]),
                    mean_round_nanos=float(row["mean_round_nanos"]),
                    mean_support_size=float(row["mean_support_size"]),
                )
            )
    return out


def emit_run_trace(result: RunResult, path):
    """Line-delimited `t,action,statistic,beta,candidate,support_size` records."""
    if result.trace is None:
        raise ValueError("run was executed without record_trace=True")
    try:
        with open(path, "w") as fh:
            fh.write("t,action,statistic,beta,candidate,support_size\n")
            for t, action, stat, beta, cand, supp in result.trace:
                act = "|".join(str(a) for a in action)
                cnd = "|".join(str(a) for a in cand)
                fh.write(f"{t},{act},{stat:.12g},{beta:.12g},{cnd},{supp}\n")
    except OSError as exc:
        raise OSError(f"failed writing trace to {path}: {exc}") from exc
