import json

import pytest

from thumbcap.config import AppConfig, load_config


def test_defaults():
    cfg = load_config(env={})
    assert cfg.seed == 42
    assert cfg.endpoint.base_url == "http://127.0.0.1:8089"
    assert cfg.serve.port == 8080
    assert cfg.train.optimizer == "adam"
    assert cfg.audio_featurizer.sample_rate == 16000


def test_file_overrides_nested_fields(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "seed": 7,
        "dataset": "other.jsonl",
        "endpoint": {"base_url": "http://10.0.0.5:9999", "max_attempts": 2},
        "train": {"epochs": 3, "optimizer": "sgd"},
        "serve": {"port": 9001},
    }))
    cfg = load_config(path, env={})
    assert cfg.seed == 7
    assert cfg.dataset == "other.jsonl"
    assert cfg.endpoint.base_url == "http://10.0.0.5:9999"
    assert cfg.endpoint.max_attempts == 2
    assert cfg.endpoint.model_id == "llava-v1.5-13b"  # untouched sibling
    assert cfg.train.epochs == 3
    assert cfg.train.optimizer == "sgd"
    assert cfg.serve.port == 9001


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"sedd": 7}))
    with pytest.raises(ValueError):
        load_config(path, env={})
    path.write_text(json.dumps({"train": {"epoochs": 3}}))
    with pytest.raises(ValueError):
        load_config(path, env={})


def test_invalid_nested_value_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"train": {"optimizer": "adagrad"}}))
    with pytest.raises(ValueError):
        load_config(path, env={})


def test_env_overrides_beat_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 7, "serve": {"port": 9001}}))
    cfg = load_config(path, env={
        "THUMBCAP_SEED": "11",
        "THUMBCAP_PORT": "9002",
        "THUMBCAP_ENDPOINT": "http://mock:1234",
        "THUMBCAP_DATASET": "envset.jsonl",
    })
    assert cfg.seed == 11
    assert cfg.serve.port == 9002
    assert cfg.endpoint.base_url == "http://mock:1234"
    assert cfg.dataset == "envset.jsonl"


def test_irrelevant_env_ignored():
    cfg = load_config(env={"HOME": "/root", "THUMBCAP_UNKNOWN": "x"})
    assert cfg == AppConfig()


def test_log_path_creates_dir(tmp_path):
    cfg = AppConfig(log_dir=str(tmp_path / "logs"))
    p = cfg.log_path("queries.jsonl")
    assert p.parent.is_dir()
    assert p.name == "queries.jsonl"
