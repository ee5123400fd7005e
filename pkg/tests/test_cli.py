import json
import subprocess
import sys

import numpy as np
import pytest

from ddpm1d.cli import main, parse_config, write_csv
from ddpm1d.errors import ConfigError
from ddpm1d.experiment import ExperimentConfig, SummaryRow, TrialResult, run_trial

TINY = {
    "steps": 50,
    "epochs": 5,
    "samples_per_epoch": 64,
    "batch_size": 32,
    "trials": 2,
    "gens_per_trial": 5,
    "base_seed": 9,
}

def write_tiny_config(tmp_path, **extra):
    data = dict(TINY)
    data.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path

def test_empty_config_gives_reference_defaults(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    cfg = parse_config(path)
    assert cfg == ExperimentConfig()
    assert cfg.epochs == 3000
    assert cfg.samples_per_epoch == 1000
    assert cfg.batch_size == 64
    assert cfg.learning_rate == 1e-3
    assert cfg.steps == 500
    assert cfg.x0 == 7.0
    assert cfg.trials == 100

def test_no_config_file_same_as_empty():
    assert parse_config(None) == ExperimentConfig()

def test_flag_overrides_file(tmp_path):
    path = write_tiny_config(tmp_path, trials=100)
    cfg = parse_config(path, {"trials": 5})
    assert cfg.trials == 5

def test_none_overrides_are_ignored(tmp_path):
    path = write_tiny_config(tmp_path)
    cfg = parse_config(path, {"trials": None})
    assert cfg.trials == TINY["trials"]

def test_out_of_range_value_names_key(tmp_path):
    path = write_tiny_config(tmp_path, beta_end=1.5)
    with pytest.raises(ConfigError, match="beta"):
        parse_config(path)

def test_unknown_key_named(tmp_path):
    path = write_tiny_config(tmp_path, warmup=10)
    with pytest.raises(ConfigError, match="warmup"):
        parse_config(path)

def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.json")

def test_invalid_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        parse_config(path)

def test_normalize_mixture_key(tmp_path):
    path = write_tiny_config(
        tmp_path,
        noise={"family": "mixture", "mix_prob": 0.5, "big_variance": 100.0},
        normalize_mixture=True,
    )
    cfg = parse_config(path)
    assert cfg.noise.normalize_to_unit

def test_write_csv_schema_and_order(tmp_path):
    r = TrialResult(0, 9, 0.125, 0.0625, False)
    rows = [("table2", "gaussian", r), ("table2", "mix0.9", r), ("table2", "mix0.5", r)]
    summaries = [
        ("table2", SummaryRow("gaussian", 0.05, 0.01, 1, 0)),
        ("table2", SummaryRow("mix0.9", 0.08, 0.01, 1, 0)),
        ("table2", SummaryRow("mix0.5", 0.18, 0.02, 1, 0)),
    ]
    trials_path, summary_path = write_csv(rows, summaries, tmp_path)
    trial_lines = trials_path.read_text().splitlines()
    assert trial_lines[0] == "experiment,distribution,trial,seed,final_loss,gen_error,diverged"
    assert trial_lines[1] == "table2,gaussian,0,9,0.125,0.0625,false"
    summary_lines = summary_path.read_text().splitlines()
    assert summary_lines[0] == "experiment,distribution,n_trials,n_diverged,mean_error,std_error"
    assert [line.split(",")[1] for line in summary_lines[1:]] == ["gaussian", "mix0.9", "mix0.5"]

def test_write_csv_nine_significant_digits(tmp_path):
    r = TrialResult(0, 0, 1.0 / 3.0, 2.0 / 3.0, False)
    trials_path, _ = write_csv([("single", "gaussian", r)], [], tmp_path)
    row = trials_path.read_text().splitlines()[1]
    assert "0.333333333" in row
    assert "0.666666667" in row

def test_check_command_prints_constants(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    assert "beta[1]    = 0.0001" in out
    assert "beta[500]  = 0.02" in out
    value = float(out.split("sqrt(alpha_bar[500]) =")[1].strip().splitlines()[0])
    assert value == pytest.approx(0.0797038945, rel=1e-8)

def test_check_with_flags(capsys):
    assert main(["check", "--beta-start", "0.5", "--beta-end", "0.5", "--steps", "1"]) == 0
    out = capsys.readouterr().out
    assert "sqrt(alpha_bar[1])" in out

def test_run_single_tiny(tmp_path, capsys):
    config = write_tiny_config(tmp_path)
    out_dir = tmp_path / "out"
    code = main(["run", "--config", str(config), "--out", str(out_dir), "--quiet"])
    assert code == 0
    trials = (out_dir / "trials.csv").read_text().splitlines()
    assert len(trials) == 1 + TINY["trials"]
    assert trials[1].startswith("single,gaussian,0,9,")
    summary = (out_dir / "summary.csv").read_text().splitlines()
    assert len(summary) == 2
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["worker_count"] >= 1
    assert manifest["artifact_version"]

def test_manifest_round_trips_to_identical_config(tmp_path):
    config = write_tiny_config(
        tmp_path, noise={"family": "mixture", "mix_prob": 0.5, "big_variance": 100.0}
    )
    out_dir = tmp_path / "out"
    assert main(["run", "--config", str(config), "--out", str(out_dir), "--quiet"]) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    echo_path = tmp_path / "echo.json"
    echo_path.write_text(json.dumps(manifest["config_echo"]))
    assert parse_config(echo_path) == parse_config(config)

def test_rerun_is_byte_identical(tmp_path):
    config = write_tiny_config(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(config), "--out", str(out_a), "--quiet"]) == 0
    assert main(["run", "--config", str(config), "--out", str(out_b), "--quiet"]) == 0
    assert (out_a / "trials.csv").read_bytes() == (out_b / "trials.csv").read_bytes()
    assert (out_a / "summary.csv").read_bytes() == (out_b / "summary.csv").read_bytes()

def test_dump_weights_matches_trial_zero(tmp_path):
    config = write_tiny_config(tmp_path)
    out_dir = tmp_path / "out"
    dump = tmp_path / "weights.json"
    code = main(["run", "--config", str(config), "--out", str(out_dir),
                 "--dump-weights", str(dump), "--quiet"])
    assert code == 0
    weights = json.loads(dump.read_text())
    assert len(weights) == 129
    cfg = parse_config(config)
    _, params = run_trial(cfg, 0)
    assert np.array_equal(np.array(weights), params.theta)

def test_cli_seed_flag_changes_results(tmp_path):
    config = write_tiny_config(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    main(["run", "--config", str(config), "--out", str(out_a), "--quiet"])
    main(["run", "--config", str(config), "--out", str(out_b), "--seed", "123", "--quiet"])
    assert (out_a / "trials.csv").read_text() != (out_b / "trials.csv").read_text()

def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 1

def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["train"]) == 1

def test_bad_config_exit_code(tmp_path, capsys):
    path = write_tiny_config(tmp_path, warmup=3)
    assert main(["run", "--config", str(path), "--quiet"]) == 1
    assert "warmup" in capsys.readouterr().err

def test_module_invocation_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "ddpm1d", "check"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "sqrt(alpha_bar[500])" in proc.stdout

def test_selftest_all_properties_pass():
    proc = subprocess.run(
        [sys.executable, "-m", "ddpm1d", "selftest"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "FAIL" not in proc.stdout
    assert proc.stdout.count("PASS") >= 6
