"""RIFF/WAVE decoding: 16-bit PCM or 32-bit float, mono or stereo.

Hand-parsed rather than stdlib ``wave`` because we need float32 support and
precise error classes. Stereo is averaged to mono, samples land in [-1, 1],
and resampling (when asked for) is linear interpolation — determinism over
fidelity, since downstream features are statistical summaries anyway.
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .errors import CorruptHeader, UnsupportedFormat

_FMT_PCM = 1
_FMT_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


def resample_linear(samples: np.ndarray, src_rate: int, dst_rate: int) -> np.ndarray:
    """Linear-interpolation resampling to round(n * dst/src) samples."""
    if src_rate == dst_rate or samples.size == 0:
        return samples
    n_out = int(round(samples.size * dst_rate / src_rate))
    positions = np.arange(n_out, dtype=np.float64) * (src_rate / dst_rate)
    return np.interp(positions, np.arange(samples.size, dtype=np.float64), samples)


def decode_wav(
    path: Union[str, Path], target_rate: Optional[int] = None
) -> Tuple[np.ndarray, int]:
    """Read a WAV file to (mono float64 samples in [-1,1], sample rate).

    If target_rate is given and differs from the file rate, the result is
    resampled and the returned rate equals target_rate.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise CorruptHeader(f"{path}: fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < size:
                raise CorruptHeader(f"{path}: data chunk truncated")
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise CorruptHeader(f"{path}: missing fmt or data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format == _FMT_EXTENSIBLE:
        raise UnsupportedFormat(f"{path}: WAVE_FORMAT_EXTENSIBLE not supported")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{path}: {channels} channels (need 1 or 2)")
    if audio_format == _FMT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == _FMT_FLOAT and bits == 32:
        raw = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedFormat(
            f"{path}: format={audio_format} bits={bits} (need PCM16 or float32)"
        )

    if channels == 2:
        if raw.size % 2:
            raise CorruptHeader(f"{path}: odd sample count for stereo data")
        raw = raw.reshape(-1, 2).mean(axis=1)

    if target_rate is not None and target_rate != sample_rate:
        raw = resample_linear(raw, sample_rate, target_rate)
        sample_rate = target_rate
    return raw, sample_rate
