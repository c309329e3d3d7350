"""Command-line behavior: sub-commands, outputs, exit codes and configuration precedence."""
import argparse
import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from impatience import __version__
from impatience.core.errors import ConfigurationError
from impatience.deps import get_context, system_for
from impatience.main import main
from impatience.schemas.experiment import ExperimentSpec
from impatience.simulation.export import read_csv


def _csv_block(output: str) -> dict[str, float]:
    lines = output.splitlines()
    start = lines.index("quantity,value")
    return {name: float(value) for name, value in (line.split(",") for line in lines[start + 1 :] if line)}


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == f"impatience {__version__}"


def test_estimate_prints_closed_forms(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["estimate", "--k", "10", "--mu", "2", "--patience", "2", "--elapsed", "2", "--format", "csv"]) == 0
    output = capsys.readouterr().out
    assert output.startswith("# schema_version=1\n")
    values = _csv_block(output)
    assert values["mean_wait"] == 5.0
    assert values["jockey_wait"] == pytest.approx(9 / 4)
    assert values["switch_fail"] == 1.0
    assert values["switch_success"] == 0.0
    assert values["renege_fail_probability"] == 0.0
    assert values["pmf_4"] == 0.0


def test_estimate_median_patience(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["estimate", "--k", "1", "--mu", "1", "--patience", "0.6931471805599453", "--format", "both"]) == 0
    values = _csv_block(capsys.readouterr().out)
    assert values["renege_probability"] == pytest.approx(0.5)


def test_estimate_rejects_unbounded_target() -> None:
    assert main(["estimate", "--k", "3", "--mu", "1", "--lambda-tar", "2"]) == 1


def test_usage_errors_exit_one(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["simulate", "--bogus"]) == 1
    assert main([]) == 1
    assert "impatience" in capsys.readouterr().err


def test_missing_config_exits_one(tmp_path: Path) -> None:
    assert main(["--config", str(tmp_path / "missing.json"), "version"]) == 0
    assert main(["--config", str(tmp_path / "missing.json"), "--output-dir", str(tmp_path), "simulate"]) == 1


def test_invalid_values_exit_one(tmp_path: Path) -> None:
    assert main(["--output-dir", str(tmp_path), "simulate", "--replications", "0"]) == 1
    assert main(["--output-dir", str(tmp_path), "simulate", "--feed", "learned"]) == 1


def _simulate(out: Path, *extra: str) -> int:
    return main(
        [
            "--output-dir",
            str(out),
            "--seed",
            "7",
            "simulate",
            "--lambdas",
            "3",
            "9",
            "--replications",
            "2",
            "--horizon",
            "30",
            *extra,
        ]
    )


def test_simulate_is_byte_reproducible(tmp_path: Path) -> None:
    first, second = tmp_path / "a", tmp_path / "b"
    assert _simulate(first, "--feed", "markov", "--feed", "baseline", "--traces") == 0
    assert _simulate(second, "--feed", "markov", "--feed", "baseline", "--traces") == 0
    for name in ("metrics.csv", "backlog_curve.csv", "comparison.csv", "summary.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert (first / "traces" / "markov_lambda3_rep0.csv").read_bytes() == (
        second / "traces" / "markov_lambda3_rep0.csv"
    ).read_bytes()


def test_simulate_outputs(tmp_path: Path) -> None:
    assert _simulate(tmp_path, "--feed", "markov", "--feed", "baseline") == 0
    header, rows = read_csv(tmp_path / "metrics.csv")
    assert header[:4] == ["feed", "lambda", "replication", "queue"]
    assert len(rows) == 2 * 2 * 2 * 2
    _, comparison = read_csv(tmp_path / "comparison.csv")
    assert [(row[0], row[1]) for row in comparison] == [
        ("3.0", "markov"),
        ("3.0", "baseline"),
        ("9.0", "markov"),
        ("9.0", "baseline"),
    ]
    assert all(row[-1] == "" for row in comparison)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 7
    assert summary["feeds"]["baseline"]["jockey_events"] == 0
    assert summary["feeds"]["markov"]["runs"] == 4
    assert not (tmp_path / "traces").exists()


def test_feeds_share_arrival_streams(tmp_path: Path) -> None:
    assert _simulate(tmp_path / "one", "--feed", "baseline") == 0
    assert _simulate(tmp_path / "two", "--feed", "markov", "--feed", "baseline") == 0
    _, alone = read_csv(tmp_path / "one" / "metrics.csv")
    _, paired = read_csv(tmp_path / "two" / "metrics.csv")
    assert alone == [row for row in paired if row[0] == "baseline"]


def test_train_then_simulate_learned(tmp_path: Path) -> None:
    assert main(["--output-dir", str(tmp_path), "--seed", "3", "train", "--episodes", "2", "--epochs", "5"]) == 0
    checkpoint = tmp_path / "checkpoint.json"
    assert json.loads(checkpoint.read_text())["episode"] == 2
    _, losses = read_csv(tmp_path / "losses.csv")
    assert [row[0] for row in losses] == ["0", "1"]

    resumed = [
        "--output-dir", str(tmp_path), "--seed", "3", "train", "--episodes", "2", "--epochs", "5",
        "--resume", str(checkpoint),
    ]
    assert main(resumed) == 0
    assert json.loads(checkpoint.read_text())["episode"] == 4
    _, losses = read_csv(tmp_path / "losses.csv")
    assert [row[0] for row in losses] == ["0", "1", "2", "3"]

    out = tmp_path / "sim"
    args = [
        "--output-dir", str(out), "simulate", "--feed", "learned", "--feed", "markov",
        "--checkpoint", str(checkpoint), "--lambdas", "5", "--replications", "1", "--horizon", "15",
    ]
    assert main(args) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["feeds"]) == {"learned", "markov"}


def test_asymptotics_report(tmp_path: Path) -> None:
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"sweep": {"chernoff_reps": 20000, "error_reps": 1000, "replications": 1000}}))
    out = tmp_path / "markov"
    assert main(["--config", str(config), "--output-dir", str(out), "asymptotics"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema_version"] == 1
    assert [check["name"] for check in report["checks"]] == [
        "backlog_sweep",
        "sublinear_error",
        "decision_agreement",
        "chernoff",
    ]
    assert all(check["passed"] for check in report["checks"])
    for name in ("sweep.csv", "sublinear.csv", "agreement.csv", "chernoff.csv"):
        assert (out / name).exists()


def test_asymptotics_flags_the_zero_estimator(tmp_path: Path) -> None:
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"sweep": {"chernoff_reps": 2000, "error_reps": 500, "replications": 500}}))
    out = tmp_path / "zero"
    assert main(["--config", str(config), "--output-dir", str(out), "asymptotics", "--feed", "debug-zero"]) == 2
    checks = {check["name"]: check["passed"] for check in json.loads((out / "report.json").read_text())["checks"]}
    assert not checks["sublinear_error"]
    assert not checks["decision_agreement"]


def _namespace(**values: object) -> argparse.Namespace:
    defaults = {"config": None, "output_dir": None, "seed": None, "workers": None}
    defaults.update(values)
    return argparse.Namespace(**defaults)


def test_seed_precedence(tmp_path: Path) -> None:
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"system": {"seed": 11}}))
    assert get_context(_namespace()).seed == 42
    assert get_context(_namespace(config=str(config))).seed == 11
    context = get_context(_namespace(config=str(config), seed=5))
    assert context.seed == 5
    assert context.spec.system.seed == 5
    assert context.spec.trainer.seed == 5


def test_experiment_documents(tmp_path: Path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigurationError):
        ExperimentSpec.load(broken)
    with pytest.raises(ValidationError):
        ExperimentSpec.model_validate({"unknown": 1})
    spec = ExperimentSpec().override("simulation", horizon=50.0, warmup=None)
    assert spec.simulation.horizon == 50.0
    assert spec.simulation.warmup_time == pytest.approx(5.0)
    with pytest.raises(ValidationError):
        ExperimentSpec().override("simulation", warmup=500.0)


def test_system_for_rederives_rates() -> None:
    base = ExperimentSpec().system
    config = system_for(base, 9.0, 1.0)
    assert config.lambda_i == pytest.approx(4.5)
    assert config.mu_i == pytest.approx(2.75)
    assert config.mu_j == pytest.approx(1.75)
