"""Log-mel statistics features for 30-second clips.

Deterministic stand-in for a learned audio encoder: magnitude STFT with a
periodic Hann window, HTK-style triangular mel filterbank spanning 0..Nyquist,
log(1+x) compression, then per-band mean / std / delta-mean over frames.
Output layout is [means | stds | delta_means], mel_bands each.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import EmptyAudio, NonFiniteSamples

STATS = ("mean", "std", "delta_mean")


@dataclass(frozen=True)
class AudioFeaturizerConfig:
    sample_rate: int = 16000
    window: int = 1024
    hop: int = 512
    mel_bands: int = 64
    clip_seconds: float = 30.0

    def __post_init__(self):
        if self.hop > self.window:
            raise ValueError("hop must not exceed window")
        if self.mel_bands < 8:
            raise ValueError("mel_bands must be >= 8")
        if self.clip_samples < self.window:
            raise ValueError("clip shorter than one window")

    @property
    def clip_samples(self) -> int:
        return int(round(self.sample_rate * self.clip_seconds))

    @property
    def dim(self) -> int:
        return self.mel_bands * len(STATS)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def _filterbank_cached(mel_bands: int, window: int, sample_rate: int):
    nyquist = sample_rate / 2.0
    edges_hz = mel_to_hz(np.linspace(hz_to_mel(0.0), hz_to_mel(nyquist), mel_bands + 2))
    bins = np.fft.rfftfreq(window, d=1.0 / sample_rate)
    fb = np.zeros((mel_bands, bins.size))
    for k in range(mel_bands):
        lo, center, hi = edges_hz[k], edges_hz[k + 1], edges_hz[k + 2]
        rise = (bins - lo) / (center - lo)
        fall = (hi - bins) / (hi - center)
        fb[k] = np.maximum(0.0, np.minimum(rise, fall))
    fb.setflags(write=False)
    centers = edges_hz[1:-1].copy()
    centers.setflags(write=False)
    return fb, centers


def mel_filterbank(cfg: AudioFeaturizerConfig) -> Tuple[np.ndarray, np.ndarray]:
    """(filterbank matrix (bands, rfft bins), band center frequencies in Hz)."""
    return _filterbank_cached(cfg.mel_bands, cfg.window, cfg.sample_rate)


def _fit_to_clip(pcm: np.ndarray, clip_samples: int) -> np.ndarray:
    """Center-crop long input, zero-pad short input, to exactly clip_samples."""
    n = pcm.size
    if n == clip_samples:
        return pcm
    if n > clip_samples:
        start = (n - clip_samples) // 2
        return pcm[start:start + clip_samples]
    out = np.zeros(clip_samples, dtype=np.float64)
    out[:n] = pcm
    return out


def log_mel(pcm: np.ndarray, cfg: AudioFeaturizerConfig) -> np.ndarray:
    """(frames, mel_bands) log(1 + mel magnitude) matrix."""
    x = _fit_to_clip(np.asarray(pcm, dtype=np.float64), cfg.clip_samples)
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(cfg.window) / cfg.window)
    frames = np.lib.stride_tricks.sliding_window_view(x, cfg.window)[:: cfg.hop]
    mags = np.abs(np.fft.rfft(frames * window, axis=1))
    fb, _ = mel_filterbank(cfg)
    return np.log1p(mags @ fb.T)


def featurize_audio(pcm: np.ndarray, cfg: AudioFeaturizerConfig) -> np.ndarray:
    """Per-band [mean | std | delta-mean] over the clip's log-mel frames."""
    pcm = np.asarray(pcm, dtype=np.float64)
    if pcm.size == 0:
        raise EmptyAudio("no samples")
    if not np.all(np.isfinite(pcm)):
        raise NonFiniteSamples("input contains non-finite samples")
    lm = log_mel(pcm, cfg)
    means = lm.mean(axis=0)
    stds = lm.std(axis=0)
    if lm.shape[0] > 1:
        delta_means = np.diff(lm, axis=0).mean(axis=0)
    else:
        delta_means = np.zeros(cfg.mel_bands)
    return np.concatenate([means, stds, delta_means])
