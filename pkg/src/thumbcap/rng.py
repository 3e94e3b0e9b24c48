"""Seeded 64-bit PRNG used wherever reproducibility across implementations matters.

SplitMix64 (Steele et al.) drives dataset split sampling and per-item
presentation orders; it is a documented, portable generator so the same seed
yields the same split on any platform. All randomness in the package derives
from one master seed via ``derive_seed``.
"""
from __future__ import annotations

from typing import Iterable, List, Sequence, TypeVar

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix of a 64-bit word."""
    z = (z + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & _MASK
    return h


def derive_seed(master: int, label: str) -> int:
    """Deterministically split one master seed into per-subsystem seeds."""
    return mix64(fnv1a64(label.encode("utf-8")) ^ mix64(master))


class SplitMix64:
    """Minimal SplitMix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform int in [0, n). Modulo bias is ~n/2**64, negligible here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, xs: List[T]) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.below(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    def sample_indices(self, n: int, k: int) -> List[int]:
        """k distinct indices from range(n), in draw order (partial Fisher-Yates)."""
        if k > n:
            raise ValueError(f"cannot sample {k} from {n}")
        pool = list(range(n))
        out = []
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
            out.append(pool[i])
        return out


def seeded_permutation(items: Sequence[T], key: int) -> List[T]:
    """Permutation of ``items`` fully determined by ``key``."""
    out = list(items)
    SplitMix64(key).shuffle(out)
    return out
