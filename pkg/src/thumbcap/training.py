"""Training loop and checkpoint serialization for the dual-encoder model.

Optimization is plain minibatch SGD or Adam over the analytic gradients from
model.loss_and_gradients. Shuffling is seeded per epoch so runs are exactly
reproducible. Checkpoints are a small little-endian binary format (magic
"TCKP") holding the parameter blocks in a fixed order with log_temperature
last.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import kernels
from .errors import (
    CorruptCheckpoint,
    DimensionMismatch,
    InsufficientData,
    NonFiniteLoss,
    VersionMismatch,
)
from .model import (
    Batch,
    Gradients,
    ModelParams,
    SideParams,
    clamp_temperature,
    init_params,
    loss_and_gradients,
)

CHECKPOINT_MAGIC = b"TCKP"
CHECKPOINT_VERSION = 1
_CKPT_HEADER = struct.Struct("<4sIIIII")  # magic, version, text/audio/embed/hidden dims


@dataclass
class TrainConfig:
    embed_dim: int = 128
    hidden_dim: int = 512
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # adam | sgd
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 42

    def __post_init__(self):
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must not be negative")


@dataclass
class TrainResult:
    params: ModelParams
    loss_history: List[Tuple[int, int, float]]  # (step, epoch, loss)
    final_loss: float


class _Adam:
    def __init__(self, params: ModelParams, cfg: TrainConfig):
        self.cfg = cfg
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        for name, arr in params.blocks():
            self.m[name] = np.zeros_like(arr)
            self.v[name] = np.zeros_like(arr)
        self.m_t = 0.0
        self.v_t = 0.0
        self.t = 0

    def step(self, params: ModelParams, grads: Gradients):
        cfg = self.cfg
        self.t += 1
        bc1 = 1.0 - cfg.beta1 ** self.t
        bc2 = 1.0 - cfg.beta2 ** self.t
        gmap = dict(grads.blocks())
        for name, arr in params.blocks():
            kernels.adam_update(
                arr.reshape(-1), gmap[name].reshape(-1),
                self.m[name].reshape(-1), self.v[name].reshape(-1),
                cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps, bc1, bc2,
            )
        g = grads.log_temperature
        self.m_t = cfg.beta1 * self.m_t + (1.0 - cfg.beta1) * g
        self.v_t = cfg.beta2 * self.v_t + (1.0 - cfg.beta2) * g * g
        params.log_temperature -= cfg.learning_rate * (
            (self.m_t / bc1) / (np.sqrt(self.v_t / bc2) + cfg.adam_eps)
        )


class _SGD:
    def __init__(self, params: ModelParams, cfg: TrainConfig):
        self.lr = cfg.learning_rate

    def step(self, params: ModelParams, grads: Gradients):
        gmap = dict(grads.blocks())
        for name, arr in params.blocks():
            arr -= self.lr * gmap[name]
        params.log_temperature -= self.lr * grads.log_temperature


def train(
    text_features: np.ndarray,
    audio_features: np.ndarray,
    config: TrainConfig,
    params: Optional[ModelParams] = None,
    on_epoch: Optional[Callable[[int, float], None]] = None,
) -> TrainResult:
    """Fit projection heads on aligned feature rows (row i of each side match).

    Raises InsufficientData when there are fewer than two pairs, NonFiniteLoss
    if the loss or any gradient degenerates mid-run.
    """
    text_features = np.asarray(text_features, dtype=np.float64)
    audio_features = np.asarray(audio_features, dtype=np.float64)
    n = text_features.shape[0]
    if audio_features.shape[0] != n:
        raise DimensionMismatch("text/audio row counts differ")
    if n < 2:
        raise InsufficientData(f"need at least 2 aligned pairs, got {n}")

    if params is None:
        params = init_params(
            text_dim=text_features.shape[1],
            audio_dim=audio_features.shape[1],
            embed_dim=config.embed_dim,
            hidden_dim=config.hidden_dim,
            seed=config.seed,
        )
    opt = _Adam(params, config) if config.optimizer == "adam" else _SGD(params, config)

    shuffle_rng = np.random.default_rng(config.seed + 1)
    history: List[Tuple[int, int, float]] = []
    step = 0
    last = float("nan")
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            if idx.size < 2:
                continue  # singleton tail has no in-batch negatives
            batch = Batch(text_features=text_features[idx],
                          audio_features=audio_features[idx])
            loss, grads = loss_and_gradients(params, batch)
            opt.step(params, grads)
            clamp_temperature(params)
            step += 1
            history.append((step, epoch, loss))
            epoch_losses.append(loss)
        if not epoch_losses:
            raise InsufficientData("no batch of size >= 2 could be formed")
        last = float(np.mean(epoch_losses))
        if not np.isfinite(last):
            raise NonFiniteLoss(f"epoch {epoch} mean loss = {last}")
        if on_epoch is not None:
            on_epoch(epoch, last)
    params.assert_finite()
    return TrainResult(params=params, loss_history=history, final_loss=last)


def write_loss_history(path, history) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,epoch,loss\n")
        for step, epoch, loss in history:
            fh.write(f"{step},{epoch},{loss:.10g}\n")


def save_checkpoint(path, params: ModelParams) -> None:
    """Binary dump: header, float64 parameter blocks in order, log_temperature."""
    params.assert_finite()
    with open(path, "wb") as fh:
        fh.write(_CKPT_HEADER.pack(
            CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
            params.text_dim, params.audio_dim, params.embed_dim, params.hidden_dim,
        ))
        for _, arr in params.blocks():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        fh.write(struct.pack("<d", params.log_temperature))


def _expected_payload(text_dim: int, audio_dim: int, embed_dim: int, hidden_dim: int) -> int:
    def side(in_dim: int) -> int:
        if hidden_dim:
            return hidden_dim * in_dim + hidden_dim + embed_dim * hidden_dim + embed_dim
        return embed_dim * in_dim + embed_dim

    return 8 * (side(text_dim) + side(audio_dim) + 1)


def load_checkpoint(path) -> ModelParams:
    raw = Path(path).read_bytes()
    if len(raw) < _CKPT_HEADER.size:
        raise CorruptCheckpoint("file shorter than header")
    magic, version, text_dim, audio_dim, embed_dim, hidden_dim = _CKPT_HEADER.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise CorruptCheckpoint(f"bad magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise VersionMismatch(f"checkpoint version {version}, expected {CHECKPOINT_VERSION}")
    if min(text_dim, audio_dim, embed_dim) < 1:
        raise CorruptCheckpoint("non-positive dimension in header")
    payload = raw[_CKPT_HEADER.size:]
    if len(payload) != _expected_payload(text_dim, audio_dim, embed_dim, hidden_dim):
        raise CorruptCheckpoint(
            f"payload is {len(payload)} bytes, expected "
            f"{_expected_payload(text_dim, audio_dim, embed_dim, hidden_dim)}")

    off = 0

    def take(shape) -> np.ndarray:
        nonlocal off
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=off)
        off += 8 * count
        return arr.astype(np.float64).reshape(shape)

    def side(in_dim: int) -> SideParams:
        if hidden_dim:
            return SideParams(
                hidden_w=take((hidden_dim, in_dim)),
                hidden_b=take((hidden_dim,)),
                out_w=take((embed_dim, hidden_dim)),
                out_b=take((embed_dim,)),
            )
        return SideParams(out_w=take((embed_dim, in_dim)), out_b=take((embed_dim,)))

    text = side(text_dim)
    audio = side(audio_dim)
    (log_temperature,) = struct.unpack_from("<d", payload, off)
    params = ModelParams(text=text, audio=audio, log_temperature=float(log_temperature))
    try:
        params.assert_finite()
    except NonFiniteLoss as exc:
        raise CorruptCheckpoint(str(exc)) from exc
    return params
