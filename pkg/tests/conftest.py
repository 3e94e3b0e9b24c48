"""Shared fixtures: a WAV writer independent of the package reader, tiny
dataset builders, and paths to the committed fixture corpora."""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import pytest

from thumbcap.records import CaptionRecord, EvaluationRecord, write_records

FIXTURES = Path(__file__).parent / "fixtures"
REPO_FIXTURES = Path(__file__).parent.parent / "fixtures"

GENRE_CYCLE = ("house", "jazz", "lofi", "rock")


def write_wav(path, samples, rate=16000, fmt="pcm16", channels=1):
    """Write a RIFF/WAVE file by hand (the oracle for the reader).

    samples: float array in [-1, 1]; for stereo, shape (n, 2).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if channels == 2 and samples.ndim == 1:
        samples = np.stack([samples, samples], axis=1)
    interleaved = samples.reshape(-1)
    if fmt == "pcm16":
        audio_format, bits = 1, 16
        payload = struct.pack(f"<{interleaved.size}h",
                              *np.clip(np.round(interleaved * 32767), -32768, 32767)
                              .astype(np.int64).tolist())
    elif fmt == "float32":
        audio_format, bits = 3, 32
        payload = interleaved.astype("<f4").tobytes()
    else:
        raise ValueError(fmt)
    block_align = channels * bits // 8
    fmt_chunk = struct.pack("<HHIIHH", audio_format, channels, rate,
                            rate * block_align, block_align, bits)
    body = (b"WAVE"
            + b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
            + b"data" + struct.pack("<I", len(payload)) + payload)
    if len(payload) % 2:
        body += b"\x00"
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    return path


def sine(freq, seconds=1.0, rate=16000, amp=0.5):
    t = np.arange(int(rate * seconds)) / rate
    return amp * np.sin(2 * np.pi * freq * t)


def make_caption_record(i: int, genre=None) -> CaptionRecord:
    caption = f"A track number {i} for quiet evenings in genre test {i}."
    return CaptionRecord(
        youtube_id=f"vid{i:08d}",
        url=f"https://www.youtube.com/watch?v=vid{i:08d}",
        genre=genre or GENRE_CYCLE[i % len(GENRE_CYCLE)],
        caption=caption,
        sentence=f"1. Artwork notes.\n5. {caption}",
    ).validate()


def make_eval_record(i: int, scores=(2, 2, 2), genre=None) -> EvaluationRecord:
    return EvaluationRecord(
        base=make_caption_record(i, genre=genre),
        situation=scores[0], time_season=scores[1], emotion=scores[2],
    ).validate()


@pytest.fixture
def tiny_dataset(tmp_path):
    """12 caption records written as JSONL; returns (path, records)."""
    records = [make_caption_record(i) for i in range(1, 13)]
    path = tmp_path / "dataset.jsonl"
    write_records(path, records)
    return path, records


@pytest.fixture
def aligned_features():
    """64 perfectly aligned feature pairs (same matrix both sides)."""
    rng = np.random.default_rng(7)
    return rng.normal(size=(64, 32))


def load_expected_parses():
    with open(FIXTURES / "lvlm_outputs" / "expected.json", encoding="utf-8") as fh:
        return json.load(fh)
