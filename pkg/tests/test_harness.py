import json
from pathlib import Path

import numpy as np
import pytest

from adaptswarm.cluster.config import ConfigError
from adaptswarm.harness import (
    CSV_HEADER,
    SchemaError,
    aggregate,
    build_config,
    compare_report,
    emit_plots,
    load_config_file,
    run_experiment,
    scan_output_dir,
    smooth,
    spearman,
)
from adaptswarm.harness.aggregate import AlgoSummary, read_csv
from adaptswarm.harness.cli import main, parse_cli

CHEAP_ENV = {
    "max_steps": 20,
}


def cheap_config(tmp_path, algo="dqn", episodes=4, seeds=(1,), **agent):
    agent_cfg = {"batch_size": 8, "epsilon_decay_steps": 100}
    agent_cfg.update(agent)
    return build_config(
        algorithm=algo, episodes=episodes, seeds=list(seeds),
        out_dir=str(tmp_path),
        file_data={"env": dict(CHEAP_ENV), "agent": agent_cfg},
    )


def write_csv(path: Path, rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(str(x) for x in r))
    path.write_text("\n".join(lines) + "\n")


def fixture_rows(rewards, mean_q=0.5):
    return [
        (i + 1, 3, float(r), mean_q, 0.1, 0.2, 9.0, "true")
        for i, r in enumerate(rewards)
    ]


class TestParseCli:
    def test_valid_run_invocation(self):
        cfg = parse_cli(["run", "--algo", "drqn", "--episodes", "200",
                         "--seed", "42"])
        assert cfg.algorithm == "drqn"
        assert cfg.episodes == 200
        assert cfg.seeds == [42]

    def test_unknown_algorithm_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            parse_cli(["run", "--algo", "foo"])
        assert exc.value.code == 2
        err = capsys.readouterr().err
        for tag in ("dqn", "ddqn", "drqn", "pgnn", "ddpg"):
            assert tag in err

    def test_zero_episodes_rejected(self):
        with pytest.raises(ConfigError):
            parse_cli(["run", "--algo", "dqn", "--episodes", "0"])

    def test_seed_list_parses(self):
        cfg = parse_cli(["run", "--algo", "dqn", "--seed", "1,2,3"])
        assert cfg.seeds == [1, 2, 3]

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_cli(["run", "--algo", "dqn", "--frobnicate", "1"])
        assert exc.value.code == 2

    def test_config_file_defaults_flags_win(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"episodes": 7, "seeds": [9],
                                    "agent": {"gamma": 0.9}}))
        cfg = parse_cli(["run", "--algo", "dqn", "--config", str(path),
                         "--episodes", "3"])
        assert cfg.episodes == 3  # flag beats file
        assert cfg.seeds == [9]  # file survives where no flag given
        assert cfg.agent.gamma == 0.9

    def test_unknown_config_keys_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"agent": {"gamm": 0.9}}))
        with pytest.raises(ConfigError, match="gamm"):
            parse_cli(["run", "--algo", "dqn", "--config", str(path)])
        path.write_text(json.dumps({"unknown_section": {}}))
        with pytest.raises(ConfigError):
            load_config_file(path)


class TestRunExperiment:
    def test_csv_has_header_and_one_row_per_episode(self, tmp_path):
        cfg = cheap_config(tmp_path, episodes=4)
        exp_dir = run_experiment(cfg)
        lines = (exp_dir / "seed1.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 5

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg1 = cheap_config(tmp_path / "a", episodes=3, seeds=(7,))
        cfg2 = cheap_config(tmp_path / "b", episodes=3, seeds=(7,))
        d1 = run_experiment(cfg1)
        d2 = run_experiment(cfg2)
        assert (d1 / "seed7.csv").read_bytes() == (d2 / "seed7.csv").read_bytes()

    def test_manifest_hash_matches_config(self, tmp_path):
        cfg = cheap_config(tmp_path, episodes=2)
        exp_dir = run_experiment(cfg)
        manifest = json.loads((exp_dir / "manifest.json").read_text())
        assert manifest["config_hash"] == cfg.config_hash()
        assert manifest["status"] == "completed"
        assert manifest["csv_files"] == {"1": "seed1.csv"}

    def test_interrupted_run_marks_failure_and_keeps_partial_csv(
            self, tmp_path, monkeypatch):
        import adaptswarm.harness.runner as runner_mod

        calls = {"n": 0}
        real = runner_mod.run_episode

        def exploding(agent, env, seed, episode):
            calls["n"] += 1
            if calls["n"] >= 3:
                raise RuntimeError("boom")
            return real(agent, env, seed, episode)

        monkeypatch.setattr(runner_mod, "run_episode", exploding)
        cfg = cheap_config(tmp_path, episodes=10)
        with pytest.raises(RuntimeError):
            run_experiment(cfg)
        exp_dir = tmp_path / "dqn"
        manifest = json.loads((exp_dir / "manifest.json").read_text())
        assert manifest["status"] == "failed"
        lines = (exp_dir / "seed1.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3  # header + two completed episodes


class TestAggregate:
    def test_constant_rewards(self, tmp_path):
        path = tmp_path / "c.csv"
        write_csv(path, fixture_rows([5.0] * 30))
        summary = aggregate({"dqn": [path]})["dqn"]
        assert summary.episodes_to_best == 1
        assert summary.reward_trend == 0.0

    def test_strictly_increasing_rewards(self, tmp_path):
        path = tmp_path / "inc.csv"
        write_csv(path, fixture_rows(list(range(40))))
        summary = aggregate({"dqn": [path]})["dqn"]
        assert summary.reward_trend == pytest.approx(1.0)

    def test_two_seed_mean_is_arithmetic_mean(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(a, fixture_rows([1.0, 2.0, 3.0]))
        write_csv(b, fixture_rows([3.0, 6.0, 9.0]))
        summary = aggregate({"dqn": [a, b]})["dqn"]
        assert np.allclose(summary.curves["total_reward"], [2.0, 4.0, 6.0])

    def test_single_csv_identity(self, tmp_path):
        path = tmp_path / "one.csv"
        rewards = [0.5, -1.0, 2.0, 4.0]
        write_csv(path, fixture_rows(rewards))
        summary = aggregate({"dqn": [path]})["dqn"]
        assert np.allclose(summary.curves["total_reward"], rewards)

    def test_schema_mismatch_is_explicit(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("episode,steps,reward\n1,2,3\n")
        with pytest.raises(SchemaError, match="header"):
            read_csv(path)

    def test_smooth_window(self):
        values = np.arange(1.0, 26.0)
        sm = smooth(values, window=20)
        assert sm[0] == 1.0
        assert sm[4] == pytest.approx(3.0)  # mean of 1..5
        assert sm[24] == pytest.approx(np.mean(values[5:25]))

    def test_spearman_oracle_cases(self):
        x = np.arange(10.0)
        assert spearman(x, x) == pytest.approx(1.0)
        assert spearman(x, -x) == pytest.approx(-1.0)
        assert spearman(x, np.ones(10)) == 0.0


class TestPlots:
    def summaries(self, algos=("dqn", "pgnn")):
        out = {}
        for i, algo in enumerate(algos):
            s = AlgoSummary(algorithm=algo, seeds=1, episodes=10)
            curve = np.linspace(0, 1, 10) + i
            for metric in ("total_reward", "mean_q", "mae", "loss",
                           "adaptation_time_s"):
                s.curves[metric] = curve
                s.final_means[metric] = float(curve.mean())
            out[algo] = s
        return out

    def test_five_files_with_labelled_series(self, tmp_path):
        written, warnings = emit_plots(self.summaries(), tmp_path)
        assert len(written) == 5
        assert warnings == []
        body = (tmp_path / "plot_total_reward.svg").read_text()
        assert body.count("<polyline") == 2
        assert ">dqn<" in body and ">pgnn<" in body

    def test_single_algorithm_single_series(self, tmp_path):
        written, _ = emit_plots(self.summaries(("drqn",)), tmp_path)
        body = written[0].read_text()
        assert body.count("<polyline") == 1

    def test_empty_metric_omitted_with_warning(self, tmp_path):
        summaries = self.summaries(("dqn",))
        summaries["dqn"].curves["loss"] = np.full(10, np.nan)
        written, warnings = emit_plots(summaries, tmp_path)
        assert len(written) == 4
        assert any("loss" in w for w in warnings)
        assert not (tmp_path / "plot_loss.svg").exists()

    def test_deterministic_output(self, tmp_path):
        emit_plots(self.summaries(), tmp_path / "x")
        emit_plots(self.summaries(), tmp_path / "y")
        for name in ("plot_total_reward.svg", "plot_mae.svg"):
            assert (tmp_path / "x" / name).read_bytes() == \
                (tmp_path / "y" / name).read_bytes()


class TestCompareReport:
    def dominated(self):
        good = AlgoSummary(algorithm="aaa", seeds=2, episodes=50)
        bad = AlgoSummary(algorithm="bbb", seeds=2, episodes=50)
        for metric, better_high in (("total_reward", True), ("mean_q", True),
                                    ("mae", False), ("loss", False),
                                    ("adaptation_time_s", False)):
            good.final_means[metric] = 10.0 if better_high else 1.0
            bad.final_means[metric] = 1.0 if better_high else 10.0
        return {"aaa": good, "bbb": bad}

    def test_dominating_algorithm_ranks_first_everywhere(self):
        text = compare_report(self.dominated())
        for line in text.splitlines():
            if any(line.startswith(m) for m in
                   ("total_reward", "mean_q", "mae", "loss", "adaptation")):
                assert line.split()[1].startswith("aaa(")

    def test_ties_break_alphabetically(self):
        s = self.dominated()
        for metric in s["aaa"].final_means:
            s["bbb"].final_means[metric] = s["aaa"].final_means[metric]
        text = compare_report(s)
        for line in text.splitlines():
            if line.startswith("total_reward"):
                assert line.split()[1].startswith("aaa(")

    def test_includes_seed_and_episode_counts(self):
        text = compare_report(self.dominated())
        assert "seeds per algorithm: [2]" in text
        assert "episodes: [50]" in text

    def test_requires_two_algorithms(self):
        with pytest.raises(ValueError):
            compare_report({"dqn": AlgoSummary(algorithm="dqn", seeds=1,
                                               episodes=1)})


class TestCliEndToEnd:
    def test_run_then_report_round_trip(self, tmp_path):
        out = tmp_path / "exp"
        assert main(["run", "--algo", "dqn", "--episodes", "3", "--seed", "5",
                     "--out", str(out),
                     "--config", self._cheap_file(tmp_path)]) == 0
        assert main(["run", "--algo", "pgnn", "--episodes", "3", "--seed", "5",
                     "--out", str(out),
                     "--config", self._cheap_file(tmp_path)]) == 0
        assert main(["report", "--in", str(out)]) == 0
        assert (out / "report.txt").exists()
        assert (out / "summary.json").exists()
        assert len(list(out.glob("plot_*.svg"))) == 5
        first = (out / "summary.json").read_bytes()
        assert main(["report", "--in", str(out)]) == 0
        assert (out / "summary.json").read_bytes() == first

    def test_report_without_manifests_is_config_error(self, tmp_path):
        assert main(["report", "--in", str(tmp_path)]) == 2

    def _cheap_file(self, tmp_path) -> str:
        path = tmp_path / "cheap.json"
        if not path.exists():
            path.write_text(json.dumps(
                {"env": CHEAP_ENV,
                 "agent": {"batch_size": 8, "epsilon_decay_steps": 50,
                           "pgnn_batch_episodes": 2}}))
        return str(path)

    def test_scan_output_dir_groups_by_algorithm(self, tmp_path):
        out = tmp_path / "exp"
        main(["run", "--algo", "dqn", "--episodes", "2", "--seed", "1,2",
              "--out", str(out), "--config", self._cheap_file(tmp_path)])
        found = scan_output_dir(out)
        assert sorted(found) == ["dqn"]
        assert len(found["dqn"]) == 2
