"""HTTP service: retrieval search, dataset browsing, result ratings, and
blinded human-evaluation sessions.

State is an immutable model/index plus append-only JSONL logs; reports are
always recomputed from the logs, never kept as mutable counters. Humeval
sessions live in memory, keyed by opaque ids, and serialize their own mutation
through a per-session lock. Method identities never leave the server during a
session: clients see slot labels only.
"""
from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from . import humeval as he
from . import retrieval
from .errors import IncompleteRatings, UnknownGenre
from .genres import canonicalize_genre
from .lvlm import thumbnail_url, watch_url
from .model import ModelParams
from .records import CaptionRecord
from .textfeat import TextFeaturizerConfig, featurize_text

GRADES = ("excellent", "good", "fair", "poor")
SLOT_LABELS = ("A", "B", "C", "D", "E", "F")
DEFAULT_K = 9


@dataclass
class HumevalSession:
    session_id: str
    evaluator_id: str
    items: List[str]
    orders: Dict[str, List[str]]  # item_id -> method order (slot A first)
    cursor: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.items)

    def current_item(self) -> str:
        return self.items[self.cursor]


@dataclass
class ServiceState:
    """Everything the endpoints read; built once at startup."""

    params: Optional[ModelParams] = None
    index: Optional[retrieval.EmbeddingIndex] = None
    text_config: Optional[TextFeaturizerConfig] = None
    records: Dict[str, CaptionRecord] = field(default_factory=dict)
    # item_id -> {method: caption}; feeds humeval sessions
    caption_sets: Dict[str, Dict[str, str]] = field(default_factory=dict)
    query_log: Optional[Path] = None
    ratings_log: Optional[Path] = None
    humeval_log: Optional[Path] = None
    humeval_seed: int = 0
    static_dir: Optional[Path] = None

    known_queries: set = field(default_factory=set)
    sessions: Dict[str, HumevalSession] = field(default_factory=dict)
    _io_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def search_ready(self) -> bool:
        return (self.params is not None and self.index is not None
                and self.text_config is not None)

    def replay_logs(self):
        """Recover known query ids so rating POSTs survive a restart."""
        if self.query_log and self.query_log.is_file():
            with open(self.query_log, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self.known_queries.add(json.loads(line)["query_id"])

    def append_jsonl(self, path: Path, obj: dict):
        with self._io_lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")

    def append_humeval(self, ratings: Sequence[he.Rating]):
        with self._io_lock:
            self.humeval_log.parent.mkdir(parents=True, exist_ok=True)
            he.append_ratings(self.humeval_log, ratings)


def load_caption_sets(path) -> Dict[str, Dict[str, str]]:
    """JSONL rows {"youtube_id": ..., "captions": {method: caption}}."""
    out: Dict[str, Dict[str, str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            caps = {m: str(c) for m, c in row["captions"].items()}
            unknown = set(caps) - set(he.METHODS)
            if unknown:
                raise ValueError(f"unknown methods in caption set: {sorted(unknown)}")
            out[str(row["youtube_id"])] = caps
    return out


def _bad(status: int, message: str):
    raise HTTPException(status_code=status, detail=message)


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="thumbcap service")
    app.state.service = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    state.replay_logs()

    @app.post("/api/search")
    def search(body: dict):
        if not state.search_ready:
            _bad(503, "search index not loaded")
        query = str(body.get("query", "")).strip()
        if not query:
            _bad(400, "query must be non-empty")
        k = body.get("k", DEFAULT_K)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            _bad(400, "k must be a positive integer")
        genre = body.get("genre")
        if genre is not None:
            try:
                genre = canonicalize_genre(str(genre))
            except UnknownGenre as exc:
                _bad(400, str(exc))
        feats = featurize_text(query, state.text_config)
        hits = retrieval.search(state.params, state.index, feats, k=k,
                                genre_filter=genre)
        query_id = uuid.uuid4().hex
        results = []
        for rank, hit in enumerate(hits, start=1):
            rec = state.records.get(hit.youtube_id)
            results.append({
                "rank": rank,
                "youtube_id": hit.youtube_id,
                "url": rec.url if rec else watch_url(hit.youtube_id),
                "genre": hit.genre if hit.genre else (rec.genre if rec else None),
                "caption": rec.caption if rec else None,
                "thumbnail_url": thumbnail_url(hit.youtube_id),
                "similarity": hit.score,
            })
        state.known_queries.add(query_id)
        if state.query_log:
            state.append_jsonl(state.query_log, {
                "query_id": query_id, "query": query, "k": k, "genre": genre,
                "results": [r["youtube_id"] for r in results],
                "timestamp": time.time(),
            })
        return {"query_id": query_id, "query": query, "results": results}

    @app.post("/api/ratings")
    def post_rating(body: dict):
        query_id = str(body.get("query_id", ""))
        if query_id not in state.known_queries:
            _bad(404, f"unknown query_id {query_id!r}")
        grade = body.get("grade")
        if grade not in GRADES:
            _bad(422, f"grade must be one of {list(GRADES)}")
        youtube_id = str(body.get("youtube_id", ""))
        if not youtube_id:
            _bad(422, "youtube_id required")
        row = {
            "query_id": query_id,
            "youtube_id": youtube_id,
            "grade": grade,
            "rater_id": str(body.get("rater_id", "anonymous")),
            "timestamp": time.time(),
        }
        if state.ratings_log:
            state.append_jsonl(state.ratings_log, row)
        return {"recorded": True, "rating": row}

    @app.get("/api/ratings/summary")
    def ratings_summary():
        # last write wins per (query_id, youtube_id, rater_id)
        latest: Dict[tuple, str] = {}
        if state.ratings_log and state.ratings_log.is_file():
            with open(state.ratings_log, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    row = json.loads(line)
                    key = (row["query_id"], row["youtube_id"], row["rater_id"])
                    latest[key] = row["grade"]
        counts = {g: 0 for g in GRADES}
        for grade in latest.values():
            counts[grade] += 1
        return {"counts": counts, "total": len(latest)}

    @app.get("/api/items/{youtube_id}")
    def get_item(youtube_id: str):
        rec = state.records.get(youtube_id)
        if rec is None:
            _bad(404, f"unknown item {youtube_id!r}")
        return {
            "youtube_id": rec.youtube_id,
            "url": rec.url,
            "genre": rec.genre,
            "caption": rec.caption,
            "sentence": rec.sentence,
            "thumbnail_url": thumbnail_url(rec.youtube_id),
        }

    @app.post("/api/humeval/sessions")
    def create_session(body: dict):
        evaluator_id = str(body.get("evaluator_id", "")).strip()
        if not evaluator_id:
            _bad(422, "evaluator_id required")
        items = body.get("items")
        if items is None:
            items = sorted(state.caption_sets)
        else:
            items = [str(i) for i in items]
            missing = [i for i in items if i not in state.caption_sets]
            if missing:
                _bad(404, f"no caption sets for items {missing}")
        if not items:
            _bad(503, "no humeval items loaded")
        seed = body.get("seed", state.humeval_seed)
        if not isinstance(seed, int) or isinstance(seed, bool):
            _bad(422, "seed must be an integer")
        orders = {
            item: he.presentation_order(item, sorted(state.caption_sets[item]), seed)
            for item in items
        }
        sid = uuid.uuid4().hex
        state.sessions[sid] = HumevalSession(
            session_id=sid, evaluator_id=evaluator_id, items=items, orders=orders)
        return {"session_id": sid, "n_items": len(items)}

    def _session(session_id: str) -> HumevalSession:
        sess = state.sessions.get(session_id)
        if sess is None:
            _bad(404, f"unknown session {session_id!r}")
        return sess

    @app.get("/api/humeval/sessions/{session_id}")
    def session_status(session_id: str):
        sess = _session(session_id)
        return {
            "session_id": sess.session_id,
            "evaluator_id": sess.evaluator_id,
            "n_items": len(sess.items),
            "cursor": sess.cursor,
            "exhausted": sess.exhausted,
        }

    @app.get("/api/humeval/sessions/{session_id}/next")
    def next_item(session_id: str):
        sess = _session(session_id)
        with sess.lock:
            if sess.exhausted:
                return Response(status_code=204)
            item = sess.current_item()
            order = sess.orders[item]
            captions = [
                {"slot": SLOT_LABELS[i],
                 "caption": state.caption_sets[item][method]}
                for i, method in enumerate(order)
            ]
        return {
            "item_id": item,
            "index": sess.cursor,
            "n_items": len(sess.items),
            "captions": captions,
            "watch_url": watch_url(item),
            "thumbnail_url": thumbnail_url(item),
        }

    @app.post("/api/humeval/sessions/{session_id}/scores")
    def post_scores(session_id: str, body: dict):
        sess = _session(session_id)
        with sess.lock:
            if sess.exhausted:
                _bad(409, "session already exhausted")
            item = sess.current_item()
            if str(body.get("item_id", "")) != item:
                _bad(409, f"expected scores for item {item!r}")
            order = sess.orders[item]
            slots = {SLOT_LABELS[i]: m for i, m in enumerate(order)}
            scores = body.get("scores")
            if not isinstance(scores, dict) or set(scores) != set(slots):
                _bad(422, f"scores must cover exactly slots {sorted(slots)}")
            ratings = []
            for slot, method in slots.items():
                cell = scores[slot]
                if not isinstance(cell, dict):
                    _bad(422, f"slot {slot}: scores must be an object")
                try:
                    ratings.append(he.now_rating(
                        item_id=item, method=method, evaluator_id=sess.evaluator_id,
                        situation=cell.get("situation"),
                        time_season=cell.get("time_season"),
                        emotion=cell.get("emotion"),
                    ))
                except Exception as exc:
                    _bad(422, f"slot {slot}: {exc}")
            if state.humeval_log:
                state.append_humeval(ratings)
            sess.cursor += 1
            remaining = len(sess.items) - sess.cursor
        return {"recorded": len(ratings), "remaining": remaining}

    @app.get("/api/humeval/report")
    def humeval_report():
        ratings = []
        if state.humeval_log and state.humeval_log.is_file():
            ratings = he.load_ratings(state.humeval_log)
        reports = []
        incomplete = []
        for method in he.METHODS:
            if not any(r.method == method for r in ratings):
                continue
            try:
                reports.append(he.aggregate(ratings, method).to_dict())
            except IncompleteRatings as exc:
                incomplete.append({"method": method, "reason": str(exc)})
        return {"methods": reports, "incomplete": incomplete}

    if state.static_dir and Path(state.static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(state.static_dir), html=True),
                  name="ui")

    return app
