"""Caption and evaluation records with JSONL persistence.

A caption record is one music clip: id, URL, genre, the extracted caption and
the full multi-section generation text. Evaluation records add the three
human scores. Files are UTF-8 JSONL, one record per line, snake_case fields;
writing is canonical (fixed field order, compact separators) so identical
records serialize to identical bytes.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, Literal, Sequence, Union

from .errors import InvariantViolation, ParseError
from .genres import canonicalize_genre

_YT_ID = re.compile(r"^[A-Za-z0-9_-]{11}$")
_WS = re.compile(r"\s+")

VALID_SCORES = (0, 1, 2)

CAPTION_FIELDS = ("youtube_id", "url", "genre", "caption", "sentence")
SCORE_FIELDS = ("situation", "time_season", "emotion")


def norm_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and strip."""
    return _WS.sub(" ", text).strip()


def is_valid_youtube_id(value: str) -> bool:
    return bool(_YT_ID.match(value))


@dataclass(frozen=True)
class CaptionRecord:
    """One clip. ``validate`` canonicalizes the genre in place and must be
    called before a record is trusted (loaders do this automatically)."""

    youtube_id: str
    url: str
    genre: str
    caption: str
    sentence: str

    def validate(self, line: int = 0) -> "CaptionRecord":
        try:
            object.__setattr__(self, "genre", canonicalize_genre(self.genre))
        except Exception as exc:
            raise InvariantViolation(line, "genre", str(exc)) from exc
        if not self.youtube_id:
            raise InvariantViolation(line, "youtube_id", "empty")
        if not self.url:
            raise InvariantViolation(line, "url", "empty")
        if not self.caption.strip():
            raise InvariantViolation(line, "caption", "empty")
        if norm_ws(self.caption) not in norm_ws(self.sentence):
            raise InvariantViolation(line, "caption", "not contained in sentence")
        return self

    def to_json_dict(self) -> dict:
        return {f: getattr(self, f) for f in CAPTION_FIELDS}


@dataclass(frozen=True)
class EvaluationRecord:
    base: CaptionRecord
    situation: int
    time_season: int
    emotion: int

    @property
    def youtube_id(self) -> str:
        return self.base.youtube_id

    @property
    def genre(self) -> str:
        return self.base.genre

    @property
    def all_2s(self) -> bool:
        return self.situation == 2 and self.time_season == 2 and self.emotion == 2

    def validate(self, line: int = 0) -> "EvaluationRecord":
        self.base.validate(line)
        for field in SCORE_FIELDS:
            value = getattr(self, field)
            if not isinstance(value, int) or isinstance(value, bool) or value not in VALID_SCORES:
                raise InvariantViolation(line, field, f"score must be one of {VALID_SCORES}")
        return self

    def to_json_dict(self) -> dict:
        d = self.base.to_json_dict()
        for f in SCORE_FIELDS:
            d[f] = getattr(self, f)
        return d


Record = Union[CaptionRecord, EvaluationRecord]


def _record_from_dict(obj: dict, kind: str, line: int) -> Record:
    required = CAPTION_FIELDS + (SCORE_FIELDS if kind == "evaluation" else ())
    for f in required:
        if f not in obj:
            raise ParseError(line, f"missing field {f!r}")
    str_fields = {f: obj[f] for f in CAPTION_FIELDS}
    for f, v in str_fields.items():
        if not isinstance(v, str):
            raise ParseError(line, f"field {f!r} must be a string")
    base = CaptionRecord(**str_fields)
    if kind == "caption":
        return base.validate(line)
    scores = {}
    for f in SCORE_FIELDS:
        v = obj[f]
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(line, f"field {f!r} must be an integer")
        scores[f] = v
    return EvaluationRecord(base=base, **scores).validate(line)


def iter_records(path: Union[str, Path], kind: Literal["caption", "evaluation"]) -> Iterator[Record]:
    """Stream records from a JSONL file, validating each line."""
    if kind not in ("caption", "evaluation"):
        raise ValueError(f"unknown record kind {kind!r}")
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ParseError(line_no, "line is not a JSON object")
            rec = _record_from_dict(obj, kind, line_no)
            yid = rec.youtube_id
            if yid in seen_ids:
                raise InvariantViolation(line_no, "youtube_id", f"duplicate {yid!r}")
            seen_ids.add(yid)
            yield rec


def load_records(path: Union[str, Path], kind: Literal["caption", "evaluation"]) -> List[Record]:
    return list(iter_records(path, kind))


def write_records(path: Union[str, Path], records: Iterable[Record]) -> int:
    """Write records as canonical JSONL. Returns the number of lines written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict(), ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n


def caption_length_stats(records: Sequence[Record]) -> dict:
    """Mean/min/max caption length in characters (a reporting statistic)."""
    if not records:
        return {"count": 0, "mean": 0.0, "min": 0, "max": 0}
    caption = lambda r: r.caption if isinstance(r, CaptionRecord) else r.base.caption  # noqa: E731
    lengths = [len(caption(r)) for r in records]
    return {
        "count": len(lengths),
        "mean": sum(lengths) / len(lengths),
        "min": min(lengths),
        "max": max(lengths),
    }
