"""Pure-python/numpy reference implementations of the hot kernels.

The compiled twin (_ckern.pyx) must agree bit-for-bit: integer kernels are
exact by construction, and float kernels keep the same per-element operation
order (the extension is built with FMA contraction disabled for this reason).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

_MASK = (1 << 64) - 1


def token_hash(data: bytes, seed: int) -> int:
    """FNV-1a of the token bytes, avalanche-mixed with the seed. Returns uint64."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & _MASK
    z = (h ^ seed) & _MASK
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def hash_scatter(out: np.ndarray, tokens: Sequence[bytes], weights: np.ndarray, seed: int) -> None:
    """Accumulate signed, hashed token weights into ``out`` (len power of two)."""
    mask = out.shape[0] - 1
    for i, tok in enumerate(tokens):
        h = token_hash(tok, seed)
        sign = 1.0 if (h >> 63) == 0 else -1.0
        out[h & mask] += sign * weights[i]


def rank_from_sims(sims: np.ndarray, correct_pos: int) -> int:
    """1-based rank of position ``correct_pos`` under descending similarity.

    Ties break by index order: an equal-similarity item earlier in the index
    outranks the correct one.
    """
    sc = sims[correct_pos]
    greater = int(np.count_nonzero(sims > sc))
    equal_before = int(np.count_nonzero(sims[:correct_pos] == sc))
    return 1 + greater + equal_before


def adam_update(
    p: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    lr: float,
    beta1: float,
    beta2: float,
    eps: float,
    bc1: float,
    bc2: float,
) -> None:
    """One fused Adam step, in place. bc1/bc2 are the bias-correction divisors."""
    omb1 = 1.0 - beta1
    omb2 = 1.0 - beta2
    m *= beta1
    m += omb1 * g
    v *= beta2
    v += omb2 * (g * g)
    p -= lr * ((m / bc1) / (np.sqrt(v / bc2) + eps))
