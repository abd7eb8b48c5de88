import json

import pandas as pd
import pytest
from click.testing import CliRunner

from app.experiment_manager import CSV_COLUMNS
from main import pararm

CONFIG = {
    "experiment": "cli",
    "setting": "fixed_confidence",
    "instance": {"kind": "linear_gap", "n": 4, "delta2": 0.05},
    "scaling": {"kind": "power", "q": 0.5},
    "delta": 0.1,
    "deviation_scale": 0.2,
    "algorithms": [{"name": "apr"}, {"name": "batch_racing", "batch_size": 4}],
    "replications": 2,
    "base_seed": 0,
}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "cli.json"
    path.write_text(json.dumps(CONFIG))
    return str(path)


def test_run_writes_results_and_summary(config_path, tmp_path):
    out, summary, traces = tmp_path / "rows.csv", tmp_path / "summary.csv", tmp_path / "traces"
    result = CliRunner().invoke(pararm, ["run", "--config", config_path, "--out", str(out),
                                         "--summary", str(summary), "--trace-dir", str(traces)])
    assert result.exit_code == 0, result.output
    rows = pd.read_csv(out)
    assert list(rows.columns) == CSV_COLUMNS
    assert len(rows) == 4
    assert len(pd.read_csv(summary)) == 2
    assert len(list(traces.iterdir())) == 4 + 2


def test_run_is_reproducible(config_path, tmp_path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        CliRunner().invoke(pararm, ["run", "--config", config_path, "--out", str(out), "--workers", "2"])
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_run_rejects_sweeps(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({**CONFIG, "sweep": {"scaling.q": [0.5, 0.9]}}))
    result = CliRunner().invoke(pararm, ["run", "--config", str(path), "--out", str(tmp_path / "x.csv")])
    assert result.exit_code != 0
    assert "sweep" in result.output


def test_sweep_runs_every_point(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({**CONFIG, "sweep": {"scaling.q": [0.5, 0.9]}}))
    out = tmp_path / "sweep.csv"
    result = CliRunner().invoke(pararm, ["sweep", "--config", str(path), "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = pd.read_csv(out)
    assert len(rows) == 8
    assert rows["experiment"].nunique() == 2


def test_sweep_list(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({**CONFIG, "sweep": {"scaling.q": [0.5, 0.9]}}))
    result = CliRunner().invoke(pararm, ["sweep", "--config", str(path), "--list"])
    assert result.exit_code == 0
    assert '"q": 0.9' in result.output


def test_analyze_prints_report(config_path):
    result = CliRunner().invoke(pararm, ["analyze", "--config", config_path])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output[result.output.index("{"):])
    assert report["n"] == 4
    assert len(report["nbar"]) == 3


def test_bad_config_exits_nonzero(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**CONFIG, "algorithms": [{"name": "ucbe", "deadline": 5}]}))
    result = CliRunner().invoke(pararm, ["run", "--config", str(path)])
    assert result.exit_code != 0


def test_recipes_listed():
    result = CliRunner().invoke(pararm, ["recipes"])
    assert result.exit_code == 0
    assert "apr_success" in result.output.split()
