import csv
import json

import pytest

from qssim.experiment_config import load_config
from qssim.harness import detection_curve, run_trials
from qssim.report import CSV_COLUMNS, ReportIOError, transcript_path, write_report


def _run(tmp_path, name, **overrides):
    overrides.setdefault("trials", 4)
    config = load_config(overrides=overrides)
    stats, records = run_trials(config)
    path = str(tmp_path / name)
    write_report(
        stats,
        records,
        config.output_format,
        path,
        config_echo=config.to_dict(),
        save_transcripts=config.save_transcripts,
    )
    return path


def test_json_report_is_reproducible(tmp_path):
    first = _run(tmp_path, "a.json", attack="eve", seed=9)
    second = _run(tmp_path, "b.json", attack="eve", seed=9)
    with open(first) as f, open(second) as g:
        text = f.read()
        assert text == g.read()
    document = json.loads(text)
    assert list(document)[:3] == ["command", "version", "config"]
    assert document["config"]["seed"] == 9
    assert document["stats"]["epsilon_r"]["method"] == "wilson"
    assert len(document["trials"]) == 4


def test_csv_report(tmp_path):
    path = _run(tmp_path, "report.csv", format="csv")
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 5
    assert rows[1][:3] == ["0", "original", "none"]
    assert rows[1][3] == "0.0"


def test_transcript_sidecar(tmp_path):
    path = _run(tmp_path, "t.json", trials=2, save_transcripts=True)
    with open(transcript_path(path)) as f:
        transcripts = json.load(f)
    assert list(transcripts) == ["0", "1"]
    assert len(transcripts["0"]) == 200
    assert transcripts["0"][0]["index"] == 0


def test_table_report(tmp_path):
    config = load_config(overrides={"trials": 100})
    rows = detection_curve(config, [4], [1])
    path = str(tmp_path / "detect.csv")
    write_report(None, (), "csv", path, rows=rows)
    with open(path) as f:
        header = f.readline().strip().split(",")
    assert header[:3] == ["n", "depth", "exact"]


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ReportIOError) as error:
        write_report(None, (), "json", str(blocker / "report.json"), rows=[])
    assert str(blocker / "report.json") in str(error.value)
