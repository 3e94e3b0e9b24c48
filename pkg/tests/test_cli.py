import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from thumbcap.cli import cli
from thumbcap.featstore import read_features
from thumbcap.records import load_records, write_records
from thumbcap.training import load_checkpoint

from conftest import (
    FIXTURES,
    REPO_FIXTURES,
    make_caption_record,
    make_eval_record,
    sine,
    write_wav,
)

MOCK_DIR = str(FIXTURES / "mock_endpoint")


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args), obj=None, catch_exceptions=False)


def make_manifest(path, ids_genres):
    with open(path, "w", encoding="utf-8") as fh:
        for yid, genre in ids_genres:
            fh.write(json.dumps({"youtube_id": yid, "genre": genre}) + "\n")


@pytest.fixture
def workspace(tmp_path):
    """Dataset JSONL plus matching WAVs for six clips."""
    records = [make_caption_record(i) for i in range(1, 7)]
    for rec in records:
        rec.validate()
    dataset = tmp_path / "dataset.jsonl"
    write_records(dataset, records)
    audio_dir = tmp_path / "audio"
    audio_dir.mkdir()
    for k, rec in enumerate(records):
        write_wav(audio_dir / f"{rec.youtube_id}.wav",
                  sine(200 + 60 * k, seconds=0.3))
    return tmp_path, dataset, audio_dir, records


def featurized(runner, workspace):
    tmp_path, dataset, audio_dir, records = workspace
    out_text = tmp_path / "text.tcfv"
    out_audio = tmp_path / "audio.tcfv"
    result = invoke(runner, "featurize", "--dataset", str(dataset),
                    "--audio-dir", str(audio_dir),
                    "--out-text", str(out_text), "--out-audio", str(out_audio))
    assert result.exit_code == 0, result.output
    return out_text, out_audio


def trained(runner, workspace):
    tmp_path, dataset, _, _ = workspace
    out_text, out_audio = featurized(runner, workspace)
    ckpt = tmp_path / "model.tckp"
    result = invoke(runner, "train", "--text", str(out_text),
                    "--audio", str(out_audio), "--out", str(ckpt),
                    "--epochs", "2", "--batch-size", "4", "--embed-dim", "8",
                    "--hidden-dim", "0")
    assert result.exit_code == 0, result.output
    return ckpt, out_text, out_audio, dataset


def test_help_screens(runner):
    assert invoke(runner, "--help").exit_code == 0
    for cmd in ("caption", "featurize", "train", "eval", "search", "serve",
                "humeval-report", "stats", "split"):
        result = invoke(runner, cmd, "--help")
        assert result.exit_code == 0, cmd


def test_caption_from_mock(runner, tmp_path):
    manifest = tmp_path / "manifest.jsonl"
    make_manifest(manifest, [("vid00000001", "lofi"), ("vid00000002", "jazz"),
                             ("vid00000099", "rock")])  # 99 falls back to default
    out = tmp_path / "captions.jsonl"
    result = invoke(runner, "caption", "--input", str(manifest),
                    "--out", str(out), "--mock", MOCK_DIR)
    assert result.exit_code == 0, result.output
    assert "wrote 3 records" in result.output
    records = load_records(out, "caption")
    assert [r.youtube_id for r in records] == ["vid00000001", "vid00000002",
                                               "vid00000099"]
    assert records[0].genre == "lofi"
    assert records[0].caption  # summary section extracted
    for rec in records:
        rec.validate()


def test_caption_strict_vs_lenient(runner, tmp_path):
    manifest = tmp_path / "manifest.jsonl"
    make_manifest(manifest, [("vid00000001", "lofi"), ("notanid", "jazz")])
    out = tmp_path / "captions.jsonl"
    lenient = invoke(runner, "caption", "--input", str(manifest),
                     "--out", str(out), "--mock", MOCK_DIR)
    assert lenient.exit_code == 0
    assert "warning: notanid" in lenient.output
    assert len(load_records(out, "caption")) == 1

    strict = invoke(runner, "caption", "--input", str(manifest),
                    "--out", str(out), "--mock", MOCK_DIR, "--strict")
    assert strict.exit_code == 1


def test_featurize_writes_aligned_stores(runner, workspace):
    out_text, out_audio = featurized(runner, workspace)
    text_ids, text = read_features(out_text)
    audio_ids, audio = read_features(out_audio)
    assert text_ids == audio_ids
    assert text.shape[0] == audio.shape[0] == 6
    assert audio.shape[1] == 192  # 64 mel bands x mean/std/delta


def test_featurize_missing_wav(runner, workspace):
    tmp_path, dataset, audio_dir, records = workspace
    (audio_dir / f"{records[2].youtube_id}.wav").unlink()
    args = ("featurize", "--dataset", str(dataset), "--audio-dir", str(audio_dir),
            "--out-text", str(tmp_path / "t.tcfv"),
            "--out-audio", str(tmp_path / "a.tcfv"))
    hard = invoke(runner, *args)
    assert hard.exit_code == 1
    soft = invoke(runner, *args, "--allow-missing")
    assert soft.exit_code == 0
    ids, _ = read_features(tmp_path / "t.tcfv")
    assert len(ids) == 5


def test_train_writes_checkpoint_and_history(runner, workspace):
    ckpt, out_text, out_audio, _ = trained(runner, workspace)
    params = load_checkpoint(ckpt)
    assert params.embed_dim == 8
    csv = Path(f"{ckpt}.loss.csv")
    assert csv.is_file()
    lines = csv.read_text().splitlines()
    assert lines[0] == "step,epoch,loss"
    assert len(lines) > 1


def test_train_rejects_corrupt_store(runner, tmp_path):
    bad = tmp_path / "bad.tcfv"
    bad.write_bytes(b"not a feature store at all")
    result = invoke(runner, "train", "--text", str(bad), "--audio", str(bad),
                    "--out", str(tmp_path / "m.tckp"))
    assert result.exit_code == 1
    assert "error:" in result.output


def test_eval_live_model(runner, workspace, tmp_path):
    ckpt, out_text, out_audio, dataset = trained(runner, workspace)
    json_out = tmp_path / "report.json"
    result = invoke(runner, "eval", "--checkpoint", str(ckpt),
                    "--text", str(out_text), "--audio", str(out_audio),
                    "--dataset", str(dataset), "--json-out", str(json_out))
    assert result.exit_code == 0, result.output
    assert "macro avg" in result.output
    payload = json.loads(json_out.read_text())
    assert payload["pooling"] == "global"
    assert payload["macro"]["genre"] == "macro"


def test_eval_requires_inputs(runner):
    result = invoke(runner, "eval")
    assert result.exit_code == 2


def test_eval_published_fixtures(runner):
    result = invoke(runner, "eval", "--fixtures",
                    str(REPO_FIXTURES / "table5_rows.json"))
    assert result.exit_code == 0, result.output
    last = result.output.strip().splitlines()[-1]
    assert last.startswith("macro avg")
    for value in ("7.7", "26.9", "43.4", "13.3"):
        assert value in last


def test_search_outputs_ranked_lines(runner, workspace):
    ckpt, out_text, out_audio, dataset = trained(runner, workspace)
    result = invoke(runner, "search", "--checkpoint", str(ckpt),
                    "--audio", str(out_audio), "--dataset", str(dataset),
                    "--query", "a track for quiet evenings", "-k", "3")
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].lstrip().startswith("1. vid")
    assert lines[1].lstrip().startswith("2. vid")


def test_search_genre_filter_no_results(runner, workspace):
    ckpt, out_text, out_audio, dataset = trained(runner, workspace)
    result = invoke(runner, "search", "--checkpoint", str(ckpt),
                    "--audio", str(out_audio), "--dataset", str(dataset),
                    "--query", "anything", "--genre", "edm")
    assert result.exit_code == 0
    assert "no results" in result.output


def test_humeval_report_fixture_log(runner):
    result = invoke(runner, "humeval-report", "--fixtures",
                    str(REPO_FIXTURES / "table3_ratings.jsonl"))
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0].split() == ["method", "situation", "time/season", "emotion",
                                "total", "all", "2s"]
    by_method = {line.split()[0]: line for line in lines[2:]}
    assert "81.5" in by_method["musiccaps"] and "1.5" in by_method["musiccaps"]
    assert "170.5" in by_method["gpt_baseline"] and "13" in by_method["gpt_baseline"]
    assert "230.5" in by_method["proposed"] and "23.5" in by_method["proposed"]


def test_humeval_report_json_out(runner, tmp_path):
    json_out = tmp_path / "humeval.json"
    result = invoke(runner, "humeval-report", "--ratings",
                    str(REPO_FIXTURES / "table3_ratings.jsonl"),
                    "--json-out", str(json_out))
    assert result.exit_code == 0
    rows = json.loads(json_out.read_text())
    totals = {r["method"]: r["total"] for r in rows}
    assert totals == {"musiccaps": 81.5, "gpt_baseline": 170.5, "proposed": 230.5}


def test_humeval_report_needs_a_log(runner):
    assert invoke(runner, "humeval-report").exit_code == 2


def test_stats(runner, workspace):
    _, dataset, _, _ = workspace
    result = invoke(runner, "stats", "--dataset", str(dataset))
    assert result.exit_code == 0
    assert "records: 6" in result.output
    assert "house" in result.output


def test_split_command(runner, tmp_path):
    records = [make_caption_record(i) for i in range(1, 21)]
    dataset = tmp_path / "dataset.jsonl"
    write_records(dataset, records)
    evals = [make_eval_record(i, scores=(2, 2, 2)) for i in (1, 2)]
    evals += [make_eval_record(3, scores=(2, 1, 2))]
    eval_path = tmp_path / "eval.jsonl"
    write_records(eval_path, evals)
    prefix = str(tmp_path / "split")
    result = invoke(runner, "split", "--dataset", str(dataset),
                    "--eval", str(eval_path), "--validation-count", "4",
                    "--out-prefix", prefix, "--seed", "5")
    assert result.exit_code == 0, result.output
    train = load_records(f"{prefix}.train.jsonl", "caption")
    val = load_records(f"{prefix}.validation.jsonl", "caption")
    test = load_records(f"{prefix}.test.jsonl", "caption")
    assert len(val) == 4
    # all-2s only: item 3 (2,1,2) is evaluated but not perfect
    assert {r.youtube_id for r in test} == {"vid00000001", "vid00000002"}
    evaluated = {r.youtube_id for r in evals}
    assert not ({r.youtube_id for r in train} & evaluated)
    assert len(train) + len(val) == 20 - len(evaluated)


def test_config_file_drives_training(runner, workspace, tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(
        {"train": {"epochs": 1, "embed_dim": 4, "hidden_dim": 0,
                   "batch_size": 4}}))
    out_text, out_audio = featurized(runner, workspace)
    ckpt = tmp_path / "m.tckp"
    result = invoke(runner, "--config", str(cfg_path), "train",
                    "--text", str(out_text), "--audio", str(out_audio),
                    "--out", str(ckpt))
    assert result.exit_code == 0, result.output
    assert load_checkpoint(ckpt).embed_dim == 4
