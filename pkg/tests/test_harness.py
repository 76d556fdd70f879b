import json
import runpy
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from scipy import special, stats

import satenq
from src.envs import EnvSpec, NoiseConfig
from src.errors import ConfigError
from src.harness import (
    SUMMARY_COLUMNS, TARGETS, AggregateReport, AggregateRow, ExperimentConfig, RunMetrics, VariantSpec,
    aggregate, emit_outputs, evaluate_acceptance, levene_permutation_pvalue, levene_test, load_checkpoint,
    load_experiment_config, parse_experiment_config, read_curve_csv, read_summary_csv, robustness_eval,
    run_suite, target_config,
)
from src.harness import suite as suite_module
from src.harness.stats import _phase_series
from src.numerics import MlpParams, Rng


def _record(label, seed, ret, env="cartpole", failed=False, **extra):
    return RunMetrics(seed=seed, algorithm=label, label=label, env=env, eval_return_mean=ret,
                      failed=failed, train_returns=[ret - 1.0, ret], **extra)


class TestLevene:
    def test_identical_groups(self):
        group = [1.0, 2.0, 3.0, 4.0, 5.0]
        result = levene_test([group, list(group)])
        assert result.statistic == pytest.approx(0.0, abs=1e-12)
        assert result.p_value == pytest.approx(1.0)

    def test_constant_spread_within_groups(self):
        spread = [0, 0, 0, 0, 10, 10, 10, 10]
        flat = [5] * 8
        result = levene_test([spread, flat])
        assert result.statistic == float("inf")
        assert result.p_value == 0.0
        assert levene_permutation_pvalue([spread, flat], Rng(0), n_permutations=999) < 0.05

    def test_one_flat_group_goes_to_scipy(self):
        groups = [[5.0, 5.0, 5.0], [1.0, 2.0, 3.0, 10.0]]
        result = levene_test(groups)
        ref = stats.levene(*groups, center="median")
        assert np.isfinite(result.statistic)
        assert result.statistic == pytest.approx(ref.statistic)
        assert result.p_value == pytest.approx(ref.pvalue)

    def test_agrees_with_permutation_test(self):
        rng = Rng(21)
        agree = 0
        for trial in range(20):
            scale = 1.0 if trial % 2 == 0 else 6.0
            groups = [rng.normal(0.0, 1.0, 20), rng.normal(0.0, scale, 20)]
            parametric = levene_test(groups).p_value < 0.05
            permuted = levene_permutation_pvalue(groups, rng.derive(f"perm{trial}"), n_permutations=999) < 0.05
            agree += parametric == permuted
        assert agree >= 19

    @pytest.mark.parametrize("center", ["median", "mean"])
    def test_matches_scipy(self, center):
        rng = Rng(11)
        a, b, c = rng.normal(0, 1, 10), rng.normal(0, 3, 12), rng.normal(1, 2, 9)
        ours = levene_test([a, b, c], center=center)
        ref = stats.levene(a, b, c, center=center)
        assert ours.statistic == pytest.approx(ref.statistic, rel=1e-10)
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8)

    def test_p_value_is_f_tail(self):
        rng = Rng(12)
        result = levene_test([rng.normal(0, 1, 10), rng.normal(0, 2, 10)])
        d1, d2, w = result.df_between, result.df_within, result.statistic
        assert result.p_value == pytest.approx(special.betainc(d2 / 2, d1 / 2, d2 / (d2 + d1 * w)), rel=1e-10)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError, match="center"):
            levene_test([[1, 2], [3, 4]], center="trimmed")
        with pytest.raises(ValueError, match="2 groups"):
            levene_test([[1, 2, 3]])
        with pytest.raises(ValueError, match="2 observations"):
            levene_test([[1.0], [2.0, 3.0]])


class TestAggregate:
    def test_single_seed_std_undefined(self):
        report = aggregate([_record("sat_enq", 0, 100.0)])
        row = report.row("sat_enq")
        assert row.std is None and row.variance is None
        assert {"std", "variance"} <= set(row.undefined)

    def test_seed_order_does_not_matter(self):
        records = [_record("dqn", s, r) for s, r in enumerate([10.0, 200.0, 35.0, 500.0])]
        records += [_record("sat_enq", s, r) for s, r in enumerate([480.0, 500.0, 495.0, 500.0])]
        forward = aggregate(records, reference="dqn")
        backward = aggregate(list(reversed(records)), reference="dqn")
        assert forward.model_dump() == backward.model_dump()

    def test_statistics(self):
        records = [_record("dqn", s, r, failed=r < 250) for s, r in enumerate([10.0, 200.0, 300.0, 500.0])]
        records += [_record("sat_enq", s, r) for s, r in enumerate([480.0, 500.0, 495.0, 500.0])]
        report = aggregate(records, reference="dqn")
        dqn, sat = report.row("dqn"), report.row("sat_enq")
        assert dqn.failure_rate == 50.0
        assert dqn.variance == pytest.approx(np.var([10.0, 200.0, 300.0, 500.0], ddof=1))
        assert dqn.levene_p is None
        assert sat.levene_p == pytest.approx(levene_test([[480.0, 500.0, 495.0, 500.0],
                                                         [10.0, 200.0, 300.0, 500.0]]).p_value)
        assert sat.levene_center == "median"
        assert [p.episode for p in report.curves["sat_enq__cartpole"]] == [1, 2]

    def test_curves_truncate_to_shortest(self):
        a = _record("dqn", 0, 1.0).model_copy(update={"train_returns": [1.0, 2.0, 3.0]})
        b = _record("dqn", 1, 1.0).model_copy(update={"train_returns": [3.0, 4.0]})
        points = aggregate([a, b]).curves["dqn__cartpole"]
        assert [p.mean for p in points] == [2.0, 3.0]

    def test_curves_segment_by_phase(self):
        a = _record("sat_enq", 0, 1.0).model_copy(update={
            "train_returns": [1.0, 2.0, 3.0, 10.0, 20.0],
            "train_phases": ["phase1", "phase1", "phase1", "polish", "polish"]})
        b = _record("sat_enq", 1, 1.0).model_copy(update={
            "train_returns": [3.0, 4.0, 30.0, 40.0, 50.0],
            "train_phases": ["phase1", "phase1", "polish", "polish", "polish"]})
        points = aggregate([a, b]).curves["sat_enq__cartpole"]
        assert [(p.episode, p.phase, p.mean) for p in points] == [
            (1, "phase1", 2.0), (2, "phase1", 3.0), (3, "polish", 20.0), (4, "polish", 30.0)]

    def test_unlabelled_returns_are_train(self):
        points = aggregate([_record("dqn", 0, 5.0)]).curves["dqn__cartpole"]
        assert {p.phase for p in points} == {"train"}
        assert all(p.std is None for p in points)

    def test_phase_labels_must_match_returns(self):
        record = _record("sat_enq", 0, 1.0).model_copy(update={"train_phases": ["phase1"]})
        with pytest.raises(ValueError, match="phase labels"):
            _phase_series(record)


class TestRobustness:
    def test_zero_noise_ratio_is_one(self):
        policy = MlpParams.initialize([4, 8, 2], Rng(0))
        result = robustness_eval(policy, EnvSpec(name="cartpole", max_steps=50),
                                 NoiseConfig(action_noise_prob=0.0), 5, Rng(1))
        assert result.ratio == 1.0

    def test_nonpositive_clean_return(self):
        policy = MlpParams.initialize([6, 8, 3], Rng(0))
        result = robustness_eval(policy, EnvSpec(name="acrobot", max_steps=20),
                                 NoiseConfig(action_noise_prob=0.1), 3, Rng(1))
        assert result.clean_mean < 0
        assert result.ratio is None and not result.ratio_defined

    def test_untrained_policy_ratio_near_one(self):
        # zero network: every Q-value ties, so the greedy action never depends on the state
        policy = MlpParams.zeros([4, 8, 2])
        result = robustness_eval(policy, EnvSpec(name="cartpole", max_steps=200),
                                 NoiseConfig(action_noise_prob=0.1), 200, Rng(2))
        assert result.clean_mean > 0
        assert result.ratio == pytest.approx(1.0, abs=0.15)


class TestOutputs:
    def test_empty_report_writes_header(self, tmp_path):
        emit_outputs(AggregateReport(), tmp_path, formats=["csv"])
        frame = pd.read_csv(tmp_path / "summary.csv")
        assert list(frame.columns) == SUMMARY_COLUMNS
        assert len(frame) == 0

    def test_summary_round_trip(self, tmp_path):
        rows = [
            AggregateRow(algorithm="sat_enq", env="cartpole", seeds=10, mean=487.123456789, std=4.2,
                         variance=17.64, failure_rate=0.0, levene_p=0.0123, time=12.5, params_ratio=2.0973,
                         success_rate=0.9, levene_w=7.5, levene_center="median", noisy_ratio=0.97),
            AggregateRow(algorithm="dqn", env="cartpole", seeds=10, mean=214.5, std=180.0, variance=32400.0,
                         failure_rate=50.0, time=3.25, success_rate=0.3),
        ]
        emit_outputs(AggregateReport(rows=rows), tmp_path, formats=["csv"])
        back = read_summary_csv(tmp_path / "summary.csv")
        columns = set(SUMMARY_COLUMNS)
        assert [r.model_dump(include=columns) for r in back] == [r.model_dump(include=columns) for r in rows]

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            emit_outputs(AggregateReport(), tmp_path, formats=["xlsx"])


class TestExperimentConfig:
    def test_field_path_on_bad_override(self):
        with pytest.raises(ConfigError) as err:
            parse_experiment_config({"defaults": {"k": 0}})
        assert err.value.field_path == "variants[sat_enq].k"

    def test_field_path_on_top_level(self):
        with pytest.raises(ConfigError) as err:
            parse_experiment_config({"levene_center": "mode"})
        assert err.value.field_path == "levene_center"

    def test_duplicate_seeds(self):
        with pytest.raises(ConfigError, match="Duplicate seeds"):
            parse_experiment_config({"seeds": [0, 0]})

    def test_duplicate_labels(self):
        with pytest.raises(ConfigError, match="share label"):
            parse_experiment_config({"variants": [{"algorithm": "dqn"}, {"algorithm": "dqn"}]})

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="Invalid JSON"):
            load_experiment_config(path)

    def test_shipped_document_loads(self):
        cfg = load_experiment_config(Path(__file__).resolve().parent.parent / "experiment_config.json")
        assert {v.display_label for v in cfg.variants} == {"sat_enq", "dqn", "double_dqn"}
        assert cfg.reference_label == "dqn"


class TestTargets:
    @pytest.mark.parametrize("tag", sorted(TARGETS))
    def test_presets_validate(self, tag):
        cfg = parse_experiment_config(target_config(tag).model_dump())
        assert cfg.target == tag
        assert len(cfg.run_configs()) == len(cfg.variants) * 10

    def test_ablation_switches(self):
        cells = {c.display_label: c for c in target_config("ablation_single_learner").run_configs()}
        assert cells["sat_enq_single_learner"].k == 1
        cells = {c.display_label: c for c in target_config("ablation_no_satisficing").run_configs()}
        assert cells["sat_enq_no_satisficing"].sat.clip_targets is False
        labels = {v.display_label for v in target_config("ablation_margin").variants}
        assert "sat_enq_m0.5" in labels and "sat_enq_m5" in labels

    def test_slip_sweep_envs(self):
        tags = {c.env.tag() for c in target_config("slip_sweep").run_configs()}
        assert tags == {"gridworld-slip0.1", "gridworld-slip0.2", "gridworld-slip0.3"}

    def test_unknown_target(self):
        with pytest.raises(ConfigError, match="Unknown target"):
            target_config("table9")


class TestAcceptance:
    def _report(self, sat_var, dqn_var, levene_p, dqn_fail, ratio=1.2):
        return AggregateReport(rows=[
            AggregateRow(algorithm="sat_enq", env="cartpole", seeds=10, mean=490.0, variance=sat_var,
                         failure_rate=0.0, levene_p=levene_p, params_ratio=ratio),
            AggregateRow(algorithm="dqn", env="cartpole", seeds=10, mean=250.0, variance=dqn_var,
                         failure_rate=dqn_fail),
        ])

    def test_cartpole_pass(self):
        checks = evaluate_acceptance("table2", self._report(10.0, 5000.0, 0.001, 40.0), [])
        assert [c.name for c in checks] == ["cartpole_stability", "parameter_overhead"]
        assert all(c.passed for c in checks)

    def test_cartpole_fail(self):
        checks = evaluate_acceptance("table2", self._report(10.0, 15.0, 0.2, 10.0, ratio=2.1), [])
        assert not any(c.passed for c in checks)

    def test_missing_rows(self):
        checks = evaluate_acceptance("table1", AggregateReport(), [])
        assert checks[0].name == "gridworld_success" and not checks[0].passed

    def test_acrobot_limitation(self):
        records = [_record("sat_enq", s, -500.0, env="acrobot") for s in range(4)]
        records += [_record("double_dqn", s, r, env="acrobot") for s, r in enumerate([-120.0, -200.0, -500.0, -90.0])]
        (check,) = evaluate_acceptance("table5", aggregate(records), records)
        assert check.passed

    def test_untargeted(self):
        assert evaluate_acceptance("slip_sweep", AggregateReport(), []) == []


class TestSuite:
    def _experiment(self, tiny_run):
        defaults = tiny_run.model_dump(mode="json", exclude={"algorithm", "label", "seed"})
        return ExperimentConfig(seeds=[0, 1], defaults=defaults,
                                variants=[VariantSpec(algorithm="dqn"), VariantSpec(algorithm="sat_enq")])

    def test_resume_skips_completed_cells(self, tmp_path, tiny_run, monkeypatch):
        exp = self._experiment(tiny_run)
        first = run_suite(exp, output_dir=tmp_path, workers=1)
        assert first.executed == 4 and first.skipped == 0
        assert len(list((tmp_path / "runs").glob("*.json"))) == 4
        assert (tmp_path / "summary.csv").exists()
        assert {r.algorithm for r in first.report.rows} == {"dqn", "sat_enq"}
        checkpoints = sorted((tmp_path / "checkpoints").glob("*.json"))
        assert len(checkpoints) == 2 and all(p.name.startswith("sat_enq__") for p in checkpoints)
        doc = load_checkpoint(checkpoints[0])
        assert doc["schema_version"] == 1
        assert len(doc["learners"]) == tiny_run.k
        sat_records = [r for r in first.records if r.algorithm == "sat_enq"]
        assert {doc["episodes"]} <= {r.phase1_episodes for r in sat_records}

        def _boom(cfg):
            raise AssertionError("completed cell was re-executed")

        monkeypatch.setattr(suite_module, "execute_run", _boom)
        second = run_suite(exp, output_dir=tmp_path, workers=1)
        assert second.executed == 0 and second.skipped == 4
        assert [r.model_dump() for r in second.records] == [r.model_dump() for r in first.records]

    def test_crash_becomes_failure_record(self, tmp_path, tiny_run, monkeypatch):
        def _crash(cfg):
            raise FloatingPointError("diverged")

        monkeypatch.setattr(suite_module, "train_algorithm", _crash)
        result = run_suite(self._experiment(tiny_run), output_dir=tmp_path, workers=1)
        assert all(r.failed and "diverged" in r.error for r in result.records)
        assert list((tmp_path / "policies").glob("*.json")) == []

    def test_cli_report_and_plot_data(self, tmp_path, tiny_run, capsys):
        run_suite(self._experiment(tiny_run), output_dir=tmp_path, workers=1)
        (tmp_path / "summary.csv").unlink()
        assert satenq.main(["report", "--dir", str(tmp_path)]) == 0
        assert "sat_enq" in capsys.readouterr().out
        assert len(pd.read_csv(tmp_path / "summary.csv")) == 2
        assert satenq.main(["plot-data", "--dir", str(tmp_path)]) == 0
        curve = pd.read_csv(tmp_path / "curves" / "dqn__cartpole.csv")
        assert list(curve.columns) == ["episode", "phase", "mean", "std"]
        assert curve["episode"].tolist() == list(range(1, len(curve) + 1))
        points = read_curve_csv(tmp_path / "curves" / "sat_enq__cartpole.csv")
        phases = [p.phase for p in points]
        assert phases[0] == "phase1" and set(phases) <= {"phase1", "polish"}
        assert phases == sorted(phases, key=["phase1", "polish"].index)

    def test_launcher_passes_arguments(self, tmp_path, tiny_run, monkeypatch, capsys):
        run_suite(self._experiment(tiny_run), output_dir=tmp_path, workers=1)
        monkeypatch.setattr(sys, "argv", ["start.py", "report", "--dir", str(tmp_path)])
        with pytest.raises(SystemExit) as exit_info:
            runpy.run_path(str(Path(__file__).resolve().parent.parent / "start.py"), run_name="__main__")
        assert exit_info.value.code == 0
        assert "sat_enq" in capsys.readouterr().out

    def test_cli_config_error_exit_code(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"defaults": {"k": 0}}))
        assert satenq.main(["suite", "--config", str(path), "--output-dir", str(tmp_path)]) == 2
