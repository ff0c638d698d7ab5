from __future__ import annotations

import json
import os

import pandas as pd
import pytest

from transmap import artifacts as A
from transmap.cli import main
from transmap.config import PipelineConfig
from transmap.corpus.wos import format_wos_export
from transmap.errors import EXIT_CONFIG, EXIT_INPUT, EXIT_OK, EXIT_STAGE
from transmap.manifest import digest_file
from transmap.pipeline import STAGES, run_pipeline
from transmap.sim.utils import liposome_like_corpus


@pytest.fixture
def sample_export(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TRANSMAP_LOG", raising=False)
    path = tmp_path / "savedrecs.txt"
    path.write_bytes(format_wos_export(liposome_like_corpus()))
    return str(path)


def _without_timings(manifest):
    d = manifest.to_dict()
    d.pop("stage_timings")
    return d


def test_run_writes_every_artifact(sample_export, tmp_path):
    out = str(tmp_path / "run")
    manifest = run_pipeline(PipelineConfig(), [sample_export], out)
    for name in (A.CORPUS, A.SELECTION, A.NETWORK, A.PARTITION, A.ANNOTATIONS, A.REPORT, A.MANIFEST):
        assert os.path.exists(os.path.join(out, name))
    for name in ("map.graphml", "map.dot", "map.json", "scores.csv"):
        assert name in manifest.outputs
    assert list(manifest.inputs) == ["savedrecs.txt"]
    assert set(manifest.stage_timings) == set(STAGES)
    assert manifest.clinical_categories["E02"] == "Therapeutics"
    on_disk = json.loads(open(os.path.join(out, A.MANIFEST), encoding="utf-8").read())
    assert on_disk["outputs"] == manifest.to_dict()["outputs"]
    report = open(os.path.join(out, A.REPORT), encoding="utf-8").read()
    assert "- 6 (20.0%) selected; coverage 62.1%" in report


def test_runs_are_reproducible(sample_export, tmp_path):
    first = run_pipeline(PipelineConfig(), [sample_export], str(tmp_path / "one"))
    second = run_pipeline(PipelineConfig(), [sample_export], str(tmp_path / "two"))
    assert _without_timings(first) == _without_timings(second)


def test_cli_stages_match_the_one_shot_run(sample_export, tmp_path):
    manifest = run_pipeline(PipelineConfig(), [sample_export], str(tmp_path / "oneshot"))
    run = tmp_path / "chained"
    corpus, selection = str(run / A.CORPUS), str(run / A.SELECTION)
    network = str(run / A.NETWORK)
    assert main(["ingest", sample_export, "-o", corpus]) == EXIT_OK
    assert main(["select", corpus, "-o", selection]) == EXIT_OK
    assert main(["graph", corpus, selection, "-o", network, "--report", str(tmp_path / "hist.csv")]) == EXIT_OK
    assert main(["cluster", network, "-o", str(run / A.PARTITION)]) == EXIT_OK
    assert main(["annotate", corpus, "-o", str(run / A.ANNOTATIONS)]) == EXIT_OK
    assert main(["report", str(run)]) == EXIT_OK
    for name, digest in manifest.outputs.items():
        assert digest_file(str(run / name)) == digest, name
    assert pd.read_csv(tmp_path / "hist.csv").to_dict("records") == [{"size": 6, "count": 1}]


def test_cli_exit_codes(sample_export, tmp_path, capsys):
    corpus = str(tmp_path / "corpus.json")
    assert main(["ingest", sample_export, "-o", corpus]) == EXIT_OK
    assert main(["select", corpus, "--fraction", "0", "-o", str(tmp_path / "s.json")]) == EXIT_CONFIG
    assert main(["ingest", str(tmp_path / "missing.txt"), "-o", corpus]) == EXIT_INPUT
    assert main(["report", str(tmp_path / "nowhere")]) == EXIT_INPUT
    with pytest.raises(SystemExit) as e:
        main(["--help"])
    assert e.value.code == 0
    err = capsys.readouterr().err
    assert "MissingInputFile" in err


def test_cli_reports_the_failing_stage(sample_export, tmp_path, capsys):
    query = tmp_path / "query.yaml"
    query.write_text("title:\n  - zebrafish*\n", encoding="utf-8")
    code = main(["run", sample_export, "--query", str(query), "-o", str(tmp_path / "run")])
    assert code == EXIT_STAGE
    assert "stage 'ingest' failed" in capsys.readouterr().err


@pytest.mark.parametrize(
    "stage, body",
    [
        ("graph", b"{not json"),
        ("graph", b"{}"),
        ("graph", b"[1, 2]"),
        ("cluster", b'{"nodes": [{"id": "a"}], "edges": [{"source": "a", "target": "b"}]}'),
        ("cluster", b'{"nodes": 3}'),
    ],
)
def test_cli_rejects_malformed_artifacts(sample_export, tmp_path, capsys, stage, body):
    corpus = str(tmp_path / "corpus.json")
    assert main(["ingest", sample_export, "-o", corpus]) == EXIT_OK
    bad = tmp_path / "bad.json"
    bad.write_bytes(body)
    argv = ["graph", corpus, str(bad)] if stage == "graph" else ["cluster", str(bad)]
    assert main(argv + ["-o", str(tmp_path / "out.json")]) == EXIT_INPUT
    assert str(bad) in capsys.readouterr().err


def test_report_names_a_corrupt_artifact(sample_export, tmp_path, capsys):
    out = tmp_path / "run"
    run_pipeline(PipelineConfig(), [sample_export], str(out))
    (out / A.PARTITION).write_text('{"assignment": {"x": 3}}', encoding="utf-8")
    assert main(["report", str(out)]) == EXIT_INPUT
    assert A.PARTITION in capsys.readouterr().err


def test_config_file_and_telemetry(sample_export, tmp_path):
    cfg_path = tmp_path / "pipeline.yaml"
    cfg_path.write_text("selection:\n  tie_policy: truncate\nreport:\n  formats: [dot]\n", encoding="utf-8")
    out = tmp_path / "run"
    code = main(["run", sample_export, "-c", str(cfg_path), "--telemetry-dir", str(tmp_path / "tel"), "-o", str(out)])
    assert code == EXIT_OK
    assert (out / "map.dot").exists() and not (out / "map.graphml").exists()
    manifest = json.loads((out / A.MANIFEST).read_text(encoding="utf-8"))
    assert manifest["config"]["selection"]["tie_policy"] == "truncate"
    stages = pd.read_csv(tmp_path / "tel" / "stages.csv")
    assert stages["stage"].tolist() == list(STAGES)
    assert stages["run_id"].nunique() == 1
