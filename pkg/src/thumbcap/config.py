"""Application configuration: JSON file plus environment overrides.

One top-level seed feeds every stochastic component (split per subsystem via
rng.derive_seed). Paths are kept as given; relative paths resolve against the
working directory of the command.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .audiofeat import AudioFeaturizerConfig
from .textfeat import TextFeaturizerConfig
from .training import TrainConfig


@dataclass
class EndpointConfig:
    base_url: str = "http://127.0.0.1:8089"
    model_id: str = "llava-v1.5-13b"
    baseline_model_id: str = "gpt-3.5-turbo"
    timeout: float = 60.0
    max_attempts: int = 4
    backoff_base: float = 0.5
    concurrency: int = 4
    mock_dir: Optional[str] = None


@dataclass
class ServeConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    static_dir: Optional[str] = None
    humeval_items: Optional[str] = None
    humeval_seed: int = 0


@dataclass
class AppConfig:
    seed: int = 42
    dataset: str = "data/dataset.jsonl"
    text_features: str = "data/text_features.tcfv"
    audio_features: str = "data/audio_features.tcfv"
    checkpoint: str = "data/model.tckp"
    log_dir: str = "logs"
    endpoint: EndpointConfig = field(default_factory=EndpointConfig)
    text_featurizer: TextFeaturizerConfig = field(default_factory=TextFeaturizerConfig)
    audio_featurizer: AudioFeaturizerConfig = field(default_factory=AudioFeaturizerConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    serve: ServeConfig = field(default_factory=ServeConfig)

    def log_path(self, name: str) -> Path:
        d = Path(self.log_dir)
        d.mkdir(parents=True, exist_ok=True)
        return d / name


_ENV_OVERRIDES = {
    "THUMBCAP_SEED": ("seed", int),
    "THUMBCAP_DATASET": ("dataset", str),
    "THUMBCAP_TEXT_FEATURES": ("text_features", str),
    "THUMBCAP_AUDIO_FEATURES": ("audio_features", str),
    "THUMBCAP_CHECKPOINT": ("checkpoint", str),
    "THUMBCAP_LOG_DIR": ("log_dir", str),
    "THUMBCAP_ENDPOINT": ("endpoint.base_url", str),
    "THUMBCAP_HOST": ("serve.host", str),
    "THUMBCAP_PORT": ("serve.port", int),
    "THUMBCAP_STATIC_DIR": ("serve.static_dir", str),
}


def _merge(obj, overrides: dict):
    """Replace dataclass fields from a plain dict, recursing into nested ones."""
    known = {f.name: f for f in fields(obj)}
    updates = {}
    for key, value in overrides.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r} for {type(obj).__name__}")
        current = getattr(obj, key)
        if dataclasses.is_dataclass(current) and isinstance(value, dict):
            updates[key] = _merge(current, value)
        else:
            updates[key] = value
    return replace(obj, **updates)


def load_config(path=None, env: Optional[dict] = None) -> AppConfig:
    """Defaults, then the JSON file (if given), then environment overrides."""
    cfg = AppConfig()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = _merge(cfg, json.load(fh))
    env = os.environ if env is None else env
    for var, (dotted, cast) in _ENV_OVERRIDES.items():
        if var not in env:
            continue
        value = cast(env[var])
        head, _, tail = dotted.partition(".")
        if tail:
            setattr(getattr(cfg, head), tail, value)
        else:
            setattr(cfg, head, value)
    return cfg
