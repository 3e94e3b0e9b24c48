"""Blinded human evaluation: randomized presentation and score aggregation.

Each rated item gets three scores in {0,1,2} (situation, time/season,
emotion). Aggregation is fully crossed: every evaluator must rate every item
of a method, per-item scores are averaged over evaluators, and perspective
totals sum those means over items. The "all 2s" count is the mean over
evaluators of how many items that evaluator gave a perfect 2/2/2.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import DuplicateRating, IncompleteRatings, OutOfRange
from .rng import SplitMix64, derive_seed
from .records import norm_ws

METHODS = ("musiccaps", "gpt_baseline", "proposed")
PERSPECTIVES = ("situation", "time_season", "emotion")
SCORE_LABELS = {2: "positive", 1: "neutral", 0: "negative"}


def score_label(score: int) -> str:
    if isinstance(score, bool) or score not in SCORE_LABELS:
        raise OutOfRange(f"score must be 0, 1 or 2, got {score!r}")
    return SCORE_LABELS[score]


def _check_score(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value not in (0, 1, 2):
        raise OutOfRange(f"{name} must be an integer in 0..2, got {value!r}")
    return value


@dataclass(frozen=True)
class Rating:
    item_id: str
    method: str
    evaluator_id: str
    situation: int
    time_season: int
    emotion: int
    timestamp: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not norm_ws(self.item_id):
            raise ValueError("item_id must be non-empty")
        if not norm_ws(self.evaluator_id):
            raise ValueError("evaluator_id must be non-empty")
        for p in PERSPECTIVES:
            _check_score(p, getattr(self, p))

    @property
    def all_2s(self) -> bool:
        return self.situation == 2 and self.time_season == 2 and self.emotion == 2

    def to_json(self) -> Dict[str, object]:
        return {
            "item_id": self.item_id,
            "method": self.method,
            "evaluator_id": self.evaluator_id,
            "situation": self.situation,
            "time_season": self.time_season,
            "emotion": self.emotion,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, obj: Dict[str, object]) -> "Rating":
        return cls(
            item_id=str(obj["item_id"]),
            method=str(obj["method"]),
            evaluator_id=str(obj["evaluator_id"]),
            situation=obj["situation"],
            time_season=obj["time_season"],
            emotion=obj["emotion"],
            timestamp=float(obj.get("timestamp", 0.0)),
        )


def presentation_order(item_id: str, methods: Sequence[str], seed: int) -> List[str]:
    """Deterministic per-(item, seed) shuffle of the methods for blinding.

    The stream seed mixes the item id into the session seed, so the same
    session presents different items in independent orders.
    """
    methods = list(methods)
    if len(methods) < 2:
        raise ValueError("need at least 2 methods to randomize")
    rng = SplitMix64(derive_seed(seed, f"presentation:{item_id}"))
    rng.shuffle(methods)
    return methods


@dataclass
class MethodReport:
    method: str
    n_items: int
    n_evaluators: int
    situation_total: float
    time_season_total: float
    emotion_total: float
    all_2s_count: float

    @property
    def total(self) -> float:
        return self.situation_total + self.time_season_total + self.emotion_total

    def to_dict(self) -> Dict[str, object]:
        return {
            "method": self.method,
            "n_items": self.n_items,
            "n_evaluators": self.n_evaluators,
            "situation": self.situation_total,
            "time_season": self.time_season_total,
            "emotion": self.emotion_total,
            "total": self.total,
            "all_2s": self.all_2s_count,
        }


def aggregate(ratings: Iterable[Rating], method: str) -> MethodReport:
    """Cross-evaluator report for one method.

    Requires a fully crossed matrix: every evaluator present in the method's
    ratings must have rated every item. Duplicate (item, evaluator) pairs and
    holes are hard errors; order of the input list never matters.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    cells: Dict[Tuple[str, str], Rating] = {}
    items: Set[str] = set()
    evaluators: Set[str] = set()
    for r in ratings:
        if r.method != method:
            continue
        key = (r.item_id, r.evaluator_id)
        if key in cells:
            raise DuplicateRating(
                f"item {r.item_id!r} already rated by {r.evaluator_id!r} for {method}")
        cells[key] = r
        items.add(r.item_id)
        evaluators.add(r.evaluator_id)
    if not cells:
        raise IncompleteRatings(method=method)
    for item in sorted(items):
        for ev in sorted(evaluators):
            if (item, ev) not in cells:
                raise IncompleteRatings(item, ev, method)

    n_ev = len(evaluators)
    totals = {p: 0.0 for p in PERSPECTIVES}
    for item in items:
        for p in PERSPECTIVES:
            mean = sum(getattr(cells[(item, ev)], p) for ev in evaluators) / n_ev
            totals[p] += mean
    all2 = sum(
        sum(1 for item in items if cells[(item, ev)].all_2s) for ev in evaluators
    ) / n_ev
    return MethodReport(
        method=method,
        n_items=len(items),
        n_evaluators=n_ev,
        situation_total=totals["situation"],
        time_season_total=totals["time_season"],
        emotion_total=totals["emotion"],
        all_2s_count=all2,
    )


def aggregate_all(ratings: Sequence[Rating]) -> List[MethodReport]:
    present = [m for m in METHODS if any(r.method == m for r in ratings)]
    return [aggregate(ratings, m) for m in present]


def render_reports(reports: Sequence[MethodReport]) -> str:
    headers = ("method", "situation", "time/season", "emotion", "total", "all 2s")
    rows = [
        (r.method, f"{r.situation_total:g}", f"{r.time_season_total:g}",
         f"{r.emotion_total:g}", f"{r.total:g}", f"{r.all_2s_count:g}")
        for r in reports
    ]
    widths = [max(len(headers[c]), *(len(row[c]) for row in rows)) if rows else len(headers[c])
              for c in range(len(headers))]

    def fmt(cells) -> str:
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first] + rest)

    lines = [fmt(headers), "-" * len(fmt(headers))]
    lines += [fmt(row) for row in rows]
    return "\n".join(lines)


def append_ratings(path, ratings: Iterable[Rating]) -> None:
    """Append ratings to a JSONL log, one fsync-free atomic line per rating."""
    with open(path, "a", encoding="utf-8") as fh:
        for r in ratings:
            fh.write(json.dumps(r.to_json(), ensure_ascii=False,
                                separators=(",", ":")) + "\n")


def load_ratings(path) -> List[Rating]:
    out: List[Rating] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Rating.from_json(json.loads(line)))
    return out


def now_rating(item_id: str, method: str, evaluator_id: str,
               situation: int, time_season: int, emotion: int) -> Rating:
    return Rating(item_id=item_id, method=method, evaluator_id=evaluator_id,
                  situation=situation, time_season=time_season, emotion=emotion,
                  timestamp=time.time())
