"""Dual projection heads with symmetric contrastive loss and analytic gradients.

Each side maps raw features through an optional tanh hidden layer and a linear
output layer, then L2-normalizes. Matched text/audio rows are pulled together
by cross-entropy over the scaled similarity matrix, averaged over both
retrieval directions; the logit scale exp(log_temperature) is learned.
All math is float64 and the gradients are derived by hand (chain rule through
the normalization, the linear layers, and the temperature), so they can be
held to finite-difference checks at tight tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, NonFiniteGradient, NonFiniteLoss

NORM_EPS = 1e-12
SCALE_MIN = 1.0
SCALE_MAX = 100.0
INIT_LOG_TEMPERATURE = float(np.log(1.0 / 0.07))

SIDES = ("text", "audio")


@dataclass
class SideParams:
    """One projection head: optional (hidden_w, hidden_b) then (out_w, out_b)."""

    out_w: np.ndarray  # (embed_dim, in_dim) or (embed_dim, hidden_dim)
    out_b: np.ndarray  # (embed_dim,)
    hidden_w: Optional[np.ndarray] = None  # (hidden_dim, in_dim)
    hidden_b: Optional[np.ndarray] = None

    @property
    def in_dim(self) -> int:
        return self.hidden_w.shape[1] if self.hidden_w is not None else self.out_w.shape[1]

    def blocks(self) -> List[Tuple[str, np.ndarray]]:
        out = []
        if self.hidden_w is not None:
            out += [("hidden_w", self.hidden_w), ("hidden_b", self.hidden_b)]
        out += [("out_w", self.out_w), ("out_b", self.out_b)]
        return out


@dataclass
class ModelParams:
    text: SideParams
    audio: SideParams
    log_temperature: float = INIT_LOG_TEMPERATURE

    @property
    def embed_dim(self) -> int:
        return self.text.out_w.shape[0]

    @property
    def text_dim(self) -> int:
        return self.text.in_dim

    @property
    def audio_dim(self) -> int:
        return self.audio.in_dim

    @property
    def hidden_dim(self) -> int:
        return 0 if self.text.hidden_w is None else self.text.hidden_w.shape[0]

    @property
    def logit_scale(self) -> float:
        return float(np.exp(self.log_temperature))

    def side(self, name: str) -> SideParams:
        if name not in SIDES:
            raise ValueError(f"unknown side {name!r}")
        return self.text if name == "text" else self.audio

    def blocks(self) -> List[Tuple[str, np.ndarray]]:
        """All parameter arrays in checkpoint order (log_temperature excluded)."""
        out = []
        for side in SIDES:
            out += [(f"{side}.{k}", arr) for k, arr in self.side(side).blocks()]
        return out

    def copy(self) -> "ModelParams":
        def cp(sp: SideParams) -> SideParams:
            return SideParams(
                out_w=sp.out_w.copy(),
                out_b=sp.out_b.copy(),
                hidden_w=None if sp.hidden_w is None else sp.hidden_w.copy(),
                hidden_b=None if sp.hidden_b is None else sp.hidden_b.copy(),
            )

        return ModelParams(text=cp(self.text), audio=cp(self.audio),
                           log_temperature=self.log_temperature)

    def assert_finite(self):
        if not np.isfinite(self.log_temperature):
            raise NonFiniteLoss("log_temperature is not finite")
        for name, arr in self.blocks():
            if not np.all(np.isfinite(arr)):
                raise NonFiniteLoss(f"parameter block {name} is not finite")


@dataclass
class Batch:
    text_features: np.ndarray  # (N, text_dim)
    audio_features: np.ndarray  # (N, audio_dim)
    ids: List[str] = field(default_factory=list)

    def __post_init__(self):
        n = self.text_features.shape[0]
        if n < 2:
            raise ValueError("batch needs N >= 2 for in-batch negatives")
        if self.audio_features.shape[0] != n:
            raise ValueError("text/audio row counts differ")

    @property
    def n(self) -> int:
        return self.text_features.shape[0]


def init_params(
    text_dim: int,
    audio_dim: int,
    embed_dim: int,
    hidden_dim: int = 0,
    seed: int = 0,
) -> ModelParams:
    """Gaussian init scaled by 1/sqrt(fan_in); biases zero."""
    rng = np.random.default_rng(seed)

    def side(in_dim: int) -> SideParams:
        if hidden_dim:
            return SideParams(
                hidden_w=rng.normal(0.0, 1.0 / np.sqrt(in_dim), (hidden_dim, in_dim)),
                hidden_b=np.zeros(hidden_dim),
                out_w=rng.normal(0.0, 1.0 / np.sqrt(hidden_dim), (embed_dim, hidden_dim)),
                out_b=np.zeros(embed_dim),
            )
        return SideParams(
            out_w=rng.normal(0.0, 1.0 / np.sqrt(in_dim), (embed_dim, in_dim)),
            out_b=np.zeros(embed_dim),
        )

    return ModelParams(text=side(text_dim), audio=side(audio_dim))


def _normalize_rows(Z: np.ndarray):
    """L2-normalize rows; rows with norm < NORM_EPS map to the first basis vector."""
    sq = np.einsum("ij,ij->i", Z, Z)
    degenerate = sq < NORM_EPS * NORM_EPS
    norms = np.sqrt(np.where(degenerate, 1.0, sq))
    E = Z / norms[:, None]
    if degenerate.any():
        E[degenerate] = 0.0
        E[degenerate, 0] = 1.0
    return E, norms, degenerate


def _forward_side(sp: SideParams, X: np.ndarray) -> Dict[str, np.ndarray]:
    if X.shape[1] != sp.in_dim:
        raise DimensionMismatch(f"features have dim {X.shape[1]}, head expects {sp.in_dim}")
    cache: Dict[str, np.ndarray] = {"X": X}
    if sp.hidden_w is not None:
        H = np.tanh(X @ sp.hidden_w.T + sp.hidden_b)
        cache["H"] = H
        Z = H @ sp.out_w.T + sp.out_b
    else:
        Z = X @ sp.out_w.T + sp.out_b
    E, norms, degenerate = _normalize_rows(Z)
    cache.update(E=E, norms=norms, degenerate=degenerate)
    return cache


def embed(params: ModelParams, features: np.ndarray, side: str) -> np.ndarray:
    """Unit-norm embeddings (rows) for raw feature rows of the given side."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    return _forward_side(params.side(side), features)["E"]


def _logits_and_caches(params: ModelParams, batch: Batch):
    ct = _forward_side(params.text, np.asarray(batch.text_features, dtype=np.float64))
    ca = _forward_side(params.audio, np.asarray(batch.audio_features, dtype=np.float64))
    scale = np.exp(params.log_temperature)
    S = scale * (ca["E"] @ ct["E"].T)  # S[i, j] = scale * <audio_i, text_j>
    return S, scale, ct, ca


def _softmax_terms(S: np.ndarray):
    """Row/col softmax matrices and per-direction cross-entropy terms."""
    mr = S.max(axis=1, keepdims=True)
    er = np.exp(S - mr)
    row_softmax = er / er.sum(axis=1, keepdims=True)
    lse_rows = mr[:, 0] + np.log(er.sum(axis=1))
    mc = S.max(axis=0, keepdims=True)
    ec = np.exp(S - mc)
    col_softmax = ec / ec.sum(axis=0, keepdims=True)
    lse_cols = mc[0] + np.log(ec.sum(axis=0))
    diag = np.diag(S)
    return row_softmax, col_softmax, lse_rows - diag, lse_cols - diag


def contrastive_loss(params: ModelParams, batch: Batch) -> Tuple[float, np.ndarray]:
    """(loss, logits). Loss is the mean of the two directional CE means."""
    S, _, _, _ = _logits_and_caches(params, batch)
    _, _, ce_rows, ce_cols = _softmax_terms(S)
    loss = 0.5 * (ce_rows.mean() + ce_cols.mean())
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"loss = {loss}")
    return float(loss), S


def _backward_norm(dE: np.ndarray, cache) -> np.ndarray:
    E, norms, degenerate = cache["E"], cache["norms"], cache["degenerate"]
    dot = np.einsum("ij,ij->i", E, dE)
    dZ = (dE - E * dot[:, None]) / norms[:, None]
    if degenerate.any():
        dZ[degenerate] = 0.0  # locally constant at the guarded point
    return dZ


def _backward_side(sp: SideParams, cache, dZ: np.ndarray) -> Dict[str, np.ndarray]:
    grads: Dict[str, np.ndarray] = {}
    if sp.hidden_w is not None:
        H = cache["H"]
        grads["out_w"] = dZ.T @ H
        grads["out_b"] = dZ.sum(axis=0)
        dU = (dZ @ sp.out_w) * (1.0 - H * H)
        grads["hidden_w"] = dU.T @ cache["X"]
        grads["hidden_b"] = dU.sum(axis=0)
    else:
        grads["out_w"] = dZ.T @ cache["X"]
        grads["out_b"] = dZ.sum(axis=0)
    return grads


@dataclass
class Gradients:
    text: Dict[str, np.ndarray]
    audio: Dict[str, np.ndarray]
    log_temperature: float

    def blocks(self) -> List[Tuple[str, np.ndarray]]:
        out = []
        for side in SIDES:
            d = getattr(self, side)
            for k in ("hidden_w", "hidden_b", "out_w", "out_b"):
                if k in d:
                    out.append((f"{side}.{k}", d[k]))
        return out


def loss_and_gradients(params: ModelParams, batch: Batch) -> Tuple[float, Gradients]:
    S, scale, ct, ca = _logits_and_caches(params, batch)
    row_softmax, col_softmax, ce_rows, ce_cols = _softmax_terms(S)
    loss = 0.5 * (ce_rows.mean() + ce_cols.mean())
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"loss = {loss}")

    n = batch.n
    eye = np.eye(n)
    dS = ((row_softmax - eye) + (col_softmax - eye)) / (2.0 * n)
    # S = scale * M with dS/d(log_temperature) = S itself
    d_log_temperature = float((dS * S).sum())
    dEa = scale * (dS @ ct["E"])
    dEt = scale * (dS.T @ ca["E"])
    grads = Gradients(
        text=_backward_side(params.text, ct, _backward_norm(dEt, ct)),
        audio=_backward_side(params.audio, ca, _backward_norm(dEa, ca)),
        log_temperature=d_log_temperature,
    )
    for name, arr in grads.blocks():
        if not np.all(np.isfinite(arr)):
            raise NonFiniteGradient(f"gradient block {name} is not finite")
    if not np.isfinite(d_log_temperature):
        raise NonFiniteGradient("log_temperature gradient is not finite")
    return float(loss), grads


def gradients(params: ModelParams, batch: Batch) -> Gradients:
    return loss_and_gradients(params, batch)[1]


def clamp_temperature(params: ModelParams) -> None:
    """Keep the logit scale within [SCALE_MIN, SCALE_MAX] after an update."""
    lo, hi = np.log(SCALE_MIN), np.log(SCALE_MAX)
    params.log_temperature = float(min(max(params.log_temperature, lo), hi))
