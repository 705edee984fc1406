import csv
import json

import numpy as np
import pytest

from combexplore.batch import (
    CSV_FIELDS,
    emit_csv,
    emit_run_trace,
    read_csv,
    run_batch,
)
from combexplore.cli import main as cli_main
from combexplore.engine import GameConfig, run_combgame
from combexplore.scenarios import make_scenario


def easy_scenario():
    return make_scenario("uniform_matroid:d=5,k=3,sigma=0.1")


def small_config(**kw):
    return GameConfig(learner_kind="lloo", **kw)


class TestRunBatch:
    def test_repeat_reproducibility(self):
        sc = easy_scenario()
        s1 = run_batch(sc, small_config(), runs=5, seed=3, workers=1)
        s2 = run_batch(sc, small_config(), runs=5, seed=3, workers=1)
        assert s1.deterministic_fields() == s2.deterministic_fields()

    def test_worker_count_invariance(self):
        sc = easy_scenario()
        s1 = run_batch(sc, small_config(), runs=6, seed=1, workers=1)
        s2 = run_batch(sc, small_config(), runs=6, seed=1, workers=3)
        assert s1.deterministic_fields() == s2.deterministic_fields()

    def test_seed_changes_outcome(self):
        sc = easy_scenario()
        s1 = run_batch(sc, small_config(), runs=4, seed=1, workers=1)
        s2 = run_batch(sc, small_config(), runs=4, seed=2, workers=1)
        assert s1.taus.tolist() != s2.taus.tolist()

    def test_summary_statistics_consistent(self):
        sc = easy_scenario()
        s = run_batch(sc, small_config(), runs=8, seed=5, workers=1)
        assert s.mean_tau == pytest.approx(float(np.mean(s.taus)))
        assert s.q1_tau <= s.mean_tau or s.q1_tau <= s.q3_tau
        assert s.q1_tau == pytest.approx(float(np.percentile(s.taus, 25)))
        assert s.runs == 8
        assert s.d == 5
        assert s.learner == "lloo"

    def test_batch_matches_individual_runs(self):
        sc = easy_scenario()
        cfg = small_config()
        s = run_batch(sc, cfg, runs=3, seed=9, workers=1)
        for idx in range(3):
            rng = np.random.default_rng([9, idx])
            res = run_combgame(cfg, sc.instance, sc.action_space, sc.answer_space, rng)
            assert res.stopping_time == s.taus[idx]

    def test_budget_exceeded_counts_as_error(self):
        sc = make_scenario("uniform_matroid:d=5,k=3,sigma=1")
        cfg = small_config(max_rounds=20)
        s = run_batch(sc, cfg, runs=3, seed=0, workers=1)
        assert s.error_count == 3

    def test_invalid_runs(self):
        with pytest.raises(ValueError):
            run_batch(easy_scenario(), small_config(), runs=0, seed=0)


class TestCsv:
    def test_header_and_roundtrip(self, tmp_path):
        sc = easy_scenario()
        s = run_batch(sc, small_config(), runs=3, seed=2, workers=1)
        path = tmp_path / "out.csv"
        emit_csv([s], path)
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        assert header == CSV_FIELDS
        back = read_csv(path)
        assert len(back) == 1
        for f in CSV_FIELDS:
            got, want = getattr(back[0], f), getattr(s, f)
            if isinstance(want, float):
                assert got == pytest.approx(want)
            else:
                assert got == want

    def test_unwritable_path(self):
        sc = easy_scenario()
        s = run_batch(sc, small_config(), runs=1, seed=0, workers=1)
        with pytest.raises(OSError):
            emit_csv([s], "/nonexistent_dir/out.csv")


class TestTrace:
    def test_file_format(self, tmp_path):
        sc = easy_scenario()
        cfg = small_config(record_trace=True)
        rng = np.random.default_rng(0)
        res = run_combgame(cfg, sc.instance, sc.action_space, sc.answer_space, rng)
        path = tmp_path / "trace.csv"
        emit_run_trace(res, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(res.trace)
        for row in rows:
            assert set(row) == {"t", "action", "statistic", "beta", "candidate", "support_size"}
            arms = [int(a) for a in row["action"].split("|")]
            assert all(0 <= a < 5 for a in arms)
            assert float(row["statistic"]) <= float(row["beta"])
            assert int(row["support_size"]) >= 1
        ts = [int(r["t"]) for r in rows]
        assert ts == sorted(ts)

    def test_requires_trace(self):
        sc = easy_scenario()
        res = run_combgame(small_config(), sc.instance, sc.action_space, sc.answer_space, np.random.default_rng(0))
        with pytest.raises(ValueError):
            emit_run_trace(res, "/tmp/ignored.csv")


class TestCli:
    def test_run_to_csv(self, tmp_path):
        out = tmp_path / "summary.csv"
        rc = cli_main([
            "run", "--scenario", "uniform_matroid:d=5,k=3,sigma=0.1",
            "--learner", "lloo", "--runs", "2", "--seed", "1",
            "--workers", "1", "--out", str(out),
        ])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0].runs == 2
        assert rows[0].scenario == "uniform_matroid_d5_k3"

    def test_complexity_command(self, capsys):
        rc = cli_main(["complexity", "--scenario", "uniform_matroid:d=5,k=3,sigma=0.1"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "complexity=" in text and "lower_bound" in text

    def test_trace_command(self, tmp_path):
        out = tmp_path / "trace.csv"
        rc = cli_main([
            "trace", "--scenario", "uniform_matroid:d=5,k=3,sigma=0.1",
            "--learner", "adahedge", "--seed", "4", "--out", str(out),
        ])
        assert rc == 0
        assert out.read_text().startswith("t,action,statistic,beta,candidate,support_size")

    def test_config_file_fills_missing_flags(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "scenario": "uniform_matroid:d=5,k=3,sigma=0.1",
            "runs": 2,
            "workers": 1,
        }))
        rc = cli_main(["run", "--config", str(cfg), "--seed", "3"])
        assert rc == 0
        assert "mean_tau=" in capsys.readouterr().out

    def test_missing_scenario_errors(self):
        with pytest.raises(SystemExit):
            cli_main(["run", "--runs", "1"])

    def test_workers_env_var(self, monkeypatch):
        from combexplore.batch import default_workers

        monkeypatch.setenv("COMBEXPLORE_WORKERS", "3")
        assert default_workers() == 3
