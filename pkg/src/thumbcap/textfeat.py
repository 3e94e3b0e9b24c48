"""Hashed bag-of-words text features.

Deterministic stand-in for a learned text encoder: lowercase, strip
punctuation, split on whitespace, then signed feature hashing (the hash sign
reduces collision bias). Output feeds the trainable text projection head.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import List

import numpy as np

from . import kernels

_PUNCT = re.compile(r"[^\w\s]", re.UNICODE)

DEFAULT_TEXT_DIM = 4096
DEFAULT_HASH_SEED = 0x7C_AB_5EED


@dataclass(frozen=True)
class TextFeaturizerConfig:
    dim: int = DEFAULT_TEXT_DIM
    hash_seed: int = DEFAULT_HASH_SEED
    tf_weighting: str = "raw"  # raw | log1p
    lowercase: bool = True

    def __post_init__(self):
        if self.dim < 64 or self.dim & (self.dim - 1) != 0:
            raise ValueError(f"dim must be a power of two >= 64, got {self.dim}")
        if self.tf_weighting not in ("raw", "log1p"):
            raise ValueError(f"unknown tf_weighting {self.tf_weighting!r}")


def tokenize(text: str, lowercase: bool = True) -> List[str]:
    if lowercase:
        text = text.lower()
    return _PUNCT.sub(" ", text).split()


def featurize_text(caption: str, cfg: TextFeaturizerConfig) -> np.ndarray:
    """Hash token counts into a signed cfg.dim vector. Empty text -> zeros."""
    vec = np.zeros(cfg.dim, dtype=np.float64)
    counts = Counter(tokenize(caption, cfg.lowercase))
    if not counts:
        return vec
    # sorted token order keeps bucket accumulation order canonical, so the
    # output is bit-identical under any permutation of the input words
    items = sorted(counts.items())
    tokens = [tok.encode("utf-8") for tok, _ in items]
    if cfg.tf_weighting == "raw":
        weights = np.array([float(tf) for _, tf in items])
    else:
        weights = np.array([math.log1p(tf) for _, tf in items])
    kernels.hash_scatter(vec, tokens, weights, cfg.hash_seed)
    return vec


def bucket_of(token: str, cfg: TextFeaturizerConfig) -> tuple[int, float]:
    """(bucket index, sign) a token hashes to — handy for tests and debugging."""
    h = kernels.token_hash(token.encode("utf-8"), cfg.hash_seed)
    return int(h & (cfg.dim - 1)), (1.0 if (h >> 63) == 0 else -1.0)
