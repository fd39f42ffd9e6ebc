import json
import os
import shutil

import pytest

from asbench import cli
from asbench.config import BenchConfig, load_config, write_config
from asbench.pipeline import Pipeline, StaleCacheError, planned_runs, read_digest, run_pipeline

from conftest import MINI, mini_config


def _snapshot(out):
    # MANIFEST is rewritten on every run
    return {n: os.path.getmtime(os.path.join(out, n)) for n in os.listdir(out) if n != "MANIFEST"}


# config -----------------------------------------------------------------------


def test_default_config_plans_full_experiment():
    assert planned_runs(BenchConfig()) == (54_000, 180_000)
    assert BenchConfig().budget == 5000


def test_ini_round_trip_and_fraction_values(tmp_path):
    path = tmp_path / "c.ini"
    config = load_config(None, {"dim": "3", "lio_test_fraction": "1/4", "bootstrap": "no"})
    write_config(config, path)
    again = load_config(path)
    assert again == config and again.digest() == config.digest()
    assert again.lio_test_fraction == 0.25 and again.bootstrap is False


def test_digest_ignores_output_dir_and_jobs():
    a = BenchConfig()
    assert a.digest() == load_config(None, {"output_dir": "x", "n_jobs": 4}).digest()
    assert a.digest() != load_config(None, {"master_seed": 1}).digest()
    b = load_config(None, {"n_estimators": 7})
    assert a.stage_digest("runs-train") == b.stage_digest("runs-train")
    assert a.stage_digest("report") != b.stage_digest("report")
    c = load_config(None, {"truth_repetitions": 5})
    assert a.stage_digest("runs-train") == c.stage_digest("runs-train")
    assert a.stage_digest("targets-truth-rank") != c.stage_digest("targets-truth-rank")


def test_config_rejects_bad_values(tmp_path):
    with pytest.raises(ValueError):
        load_config(None, {"no_such_key": 1})
    with pytest.raises(ValueError):
        load_config(None, {"lio_test_fraction": "1.5"})
    with pytest.raises(ValueError):
        load_config(None, {"algorithms": "GA,SA"})
    bad = tmp_path / "bad.ini"
    bad.write_text("[suite]\nwidth = 3\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config(bad)


# pipeline ---------------------------------------------------------------------


def test_mini_run_writes_all_artifacts(mini_run):
    config, report = mini_run
    out = config.output_dir
    for name in ("runs.csv", "runs-truth.csv", "features-ela.csv", "features-noninf.csv", "features-class.csv",
                 "features-scale.csv", "targets-train-rank.csv", "targets-truth-precision.csv", "report.json",
                 "MANIFEST", "plotdata-fig1.csv", "plotdata-fig2.csv", "plotdata-fig3.csv", "report-folds.csv"):
        assert os.path.exists(os.path.join(out, name)), name
    manifest = json.load(open(os.path.join(out, "MANIFEST")))
    assert (manifest["training_runs"], manifest["truth_runs"]) == planned_runs(config)
    assert report["config_digest"] == config.digest()
    assert {c["number"] for c in report["acceptance"]} == set(range(1, 7))
    assert len(report["leakage"]["LPO"]["folds"]) == 24
    assert read_digest(os.path.join(out, "runs.csv")) == config.stage_digest("runs-train")


def test_rerun_is_byte_identical(mini_run, tmp_path):
    config, _ = mini_run
    other = mini_config(tmp_path)
    run_pipeline(other, progress=False)
    for name in ("report.json", "runs.csv", "features-ela.csv", "targets-truth-rank.csv"):
        a = open(os.path.join(config.output_dir, name), "rb").read()
        b = open(os.path.join(tmp_path, name), "rb").read()
        assert a == b, name


def test_cache_reuse_and_partial_recompute(mini_run, tmp_path):
    config, _ = mini_run
    out = tmp_path / "copy"
    shutil.copytree(config.output_dir, out)
    c = mini_config(out)
    before = _snapshot(out)
    run_pipeline(c, progress=False, no_recompute=True)
    assert _snapshot(out) == before

    os.remove(out / "features-ela.csv")
    with pytest.raises(StaleCacheError, match="missing"):
        run_pipeline(c, progress=False, no_recompute=True)
    pipe = Pipeline(c, progress=False)
    pipe.run()
    assert sorted(pipe.recomputed) == ["features-ela.csv", "report.json"]
    assert open(out / "report.json").read() == open(os.path.join(config.output_dir, "report.json")).read()


def test_changed_config_invalidates_downstream(mini_run, tmp_path):
    config, _ = mini_run
    out = tmp_path / "copy"
    shutil.copytree(config.output_dir, out)
    c = mini_config(out, n_estimators=3)
    with pytest.raises(StaleCacheError, match="stale"):
        run_pipeline(c, progress=False, no_recompute=True)


# cli --------------------------------------------------------------------------


def test_cli_suite_list(tmp_path, capsys):
    assert cli.main(["suite", "list", "--instances", "2", "--classes", "1,2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "class_id,instance_id,dim,f_opt,f_range_estimate"
    assert len(lines) == 5


def test_cli_portfolio_targets_features(tmp_path):
    runs = tmp_path / "runs.csv"
    assert cli.main(["portfolio", "run", "--instances", "1", "--classes", "1,3", "--budget-per-dim", "40",
                     "--reps", "2", "--out", str(runs)]) == 0
    tgt = tmp_path / "t.csv"
    assert cli.main(["targets", "build", "--kind", "rank", "--runs", str(runs), "--out", str(tgt)]) == 0
    from asbench.targets import TargetTable

    table = TargetTable.from_csv(tgt)
    assert table.keys == [(1, 1), (3, 1)]
    feats = tmp_path / "f.csv"
    assert cli.main(["features", "extract", "--set", "scale", "--instances", "1", "--classes", "2",
                     "--samples-per-dim", "20", "--out", str(feats)]) == 0
    assert "f_scale" in open(feats).read()


def test_cli_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["portfolio", "run"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus"])
    assert exc.value.code == 1


def test_cli_runtime_errors_exit_1(tmp_path):
    assert cli.main(["targets", "build", "--kind", "rank", "--runs", str(tmp_path / "none.csv"),
                     "--out", str(tmp_path / "x.csv")]) == 1
    assert cli.main(["run", "--out-dir", str(tmp_path), "--set", "oops"]) == 1


def test_cli_run_no_recompute_on_cached_dir(mini_run, capsys):
    config, _ = mini_run
    args = ["run", "--out-dir", config.output_dir, "--no-recompute"]
    for k, v in MINI.items():
        args += ["--set", f"{k}={v}"]
    assert cli.main(args) == 0
    assert "leakage audit" in capsys.readouterr().out


def test_cli_report_check_exit_codes(mini_run, tmp_path, capsys):
    config, report = mini_run
    path = os.path.join(config.output_dir, "report.json")
    assert cli.main(["report", path]) == 0
    code = cli.main(["report", path, "--check"])
    out = capsys.readouterr().out
    assert out.count("criterion ") == 10
    assert code == (0 if "[FAIL]" not in out else 2)

    good = dict(report)
    good["acceptance"] = []
    fake = tmp_path / "r.json"
    fake.write_text(json.dumps(good))
    assert cli.main(["report", str(fake)]) == 0


def test_cli_report_malformed(tmp_path, caplog):
    bad = tmp_path / "r.json"
    bad.write_text('{"config_digest": "x",\n  "leakage": [1, 2,,]}')
    assert cli.main(["report", str(bad)]) == 1
    assert "line 2, column" in caplog.text
    other = tmp_path / "o.json"
    other.write_text("[1, 2]")
    assert cli.main(["report", str(other)]) == 1
