"""Text-to-audio retrieval: index, ranking metrics, and per-genre reports.

Ranks use a deterministic tie-break: a candidate scoring equal to the correct
item counts against it only when it precedes the correct item in index order,
so rank = 1 + #higher + #equal-before. Recall@K is reported in percent and
the median rank of an even-length list is the mean of the two middle values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyIndex, EmptyRanks, UnknownId
from .model import ModelParams, embed

RECALL_KS = (1, 5, 10)


@dataclass
class EmbeddingIndex:
    """Unit-norm audio embeddings with aligned ids and optional genres."""

    ids: List[str]
    embeddings: np.ndarray  # (n, embed_dim)
    genres: Optional[List[str]] = None

    def __post_init__(self):
        if len(self.ids) == 0:
            raise EmptyIndex("index needs at least one item")
        if self.embeddings.shape[0] != len(self.ids):
            raise DimensionMismatch("ids/embeddings row counts differ")
        if self.genres is not None and len(self.genres) != len(self.ids):
            raise DimensionMismatch("ids/genres counts differ")
        self._pos = {yid: i for i, yid in enumerate(self.ids)}
        if len(self._pos) != len(self.ids):
            raise ValueError("duplicate ids in index")

    def __len__(self) -> int:
        return len(self.ids)

    def position(self, youtube_id: str) -> int:
        try:
            return self._pos[youtube_id]
        except KeyError:
            raise UnknownId(youtube_id) from None

    def subset(self, keep: Sequence[int]) -> "EmbeddingIndex":
        keep = list(keep)
        return EmbeddingIndex(
            ids=[self.ids[i] for i in keep],
            embeddings=self.embeddings[keep],
            genres=None if self.genres is None else [self.genres[i] for i in keep],
        )


def build_index(
    params: ModelParams,
    ids: Sequence[str],
    audio_features: np.ndarray,
    genres: Optional[Sequence[str]] = None,
) -> EmbeddingIndex:
    E = embed(params, audio_features, "audio")
    return EmbeddingIndex(ids=list(ids), embeddings=E,
                          genres=None if genres is None else list(genres))


def rank_of_correct(sims: np.ndarray, correct_pos: int) -> int:
    """1-based rank of the item at correct_pos under descending score order."""
    sims = np.ascontiguousarray(sims, dtype=np.float64)
    if not 0 <= correct_pos < sims.shape[0]:
        raise IndexError(f"correct_pos {correct_pos} out of range for {sims.shape[0]} scores")
    return kernels.rank_from_sims(sims, correct_pos)


def recall_at_k(ranks: Sequence[int], k: int) -> float:
    """Percentage of queries whose correct item ranks within the top k."""
    ranks = list(ranks)
    if not ranks:
        raise EmptyRanks("no ranks to aggregate")
    hits = sum(1 for r in ranks if r <= k)
    return 100.0 * hits / len(ranks)


def median_rank(ranks: Sequence[int]) -> float:
    ranks = sorted(ranks)
    if not ranks:
        raise EmptyRanks("no ranks to aggregate")
    n = len(ranks)
    mid = n // 2
    if n % 2:
        return float(ranks[mid])
    return 0.5 * (ranks[mid - 1] + ranks[mid])


@dataclass
class GenreMetrics:
    genre: str
    n: int
    recall_at_1: float
    recall_at_5: float
    recall_at_10: float
    med_rank: float

    def row(self) -> Dict[str, object]:
        return {
            "genre": self.genre,
            "n": self.n,
            "r1": round(self.recall_at_1, 4),
            "r5": round(self.recall_at_5, 4),
            "r10": round(self.recall_at_10, 4),
            "medr": round(self.med_rank, 4),
        }


@dataclass
class RetrievalReport:
    per_genre: List[GenreMetrics]
    macro: GenreMetrics
    pooling: str  # "global" or "per-genre"

    def to_dict(self) -> Dict[str, object]:
        return {
            "pooling": self.pooling,
            "per_genre": [m.row() for m in self.per_genre],
            "macro": self.macro.row(),
        }

    def render(self) -> str:
        headers = ("genre", "n", "R@1", "R@5", "R@10", "MedR")
        rows = [
            (m.genre, str(m.n), f"{m.recall_at_1:.1f}", f"{m.recall_at_5:.1f}",
             f"{m.recall_at_10:.1f}", f"{m.med_rank:.1f}")
            for m in self.per_genre
        ]
        m = self.macro
        rows.append(("macro avg", str(m.n), f"{m.recall_at_1:.1f}", f"{m.recall_at_5:.1f}",
                     f"{m.recall_at_10:.1f}", f"{m.med_rank:.1f}"))
        widths = [max(len(headers[c]), *(len(r[c]) for r in rows)) for c in range(len(headers))]

        def fmt(cells) -> str:
            first = cells[0].ljust(widths[0])
            rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
            return "  ".join([first] + rest)

        sep = "-" * len(fmt(headers))
        lines = [fmt(headers), sep]
        lines += [fmt(r) for r in rows[:-1]]
        lines += [sep, fmt(rows[-1])]
        return "\n".join(lines)


def _metrics(genre: str, ranks: Sequence[int]) -> GenreMetrics:
    return GenreMetrics(
        genre=genre,
        n=len(ranks),
        recall_at_1=recall_at_k(ranks, 1),
        recall_at_5=recall_at_k(ranks, 5),
        recall_at_10=recall_at_k(ranks, 10),
        med_rank=median_rank(ranks),
    )


def macro_average(per_genre: Sequence[GenreMetrics]) -> GenreMetrics:
    """Unweighted mean over genre rows; n is the total query count."""
    if not per_genre:
        raise EmptyRanks("no genre rows to average")
    k = len(per_genre)
    return GenreMetrics(
        genre="macro",
        n=sum(m.n for m in per_genre),
        recall_at_1=sum(m.recall_at_1 for m in per_genre) / k,
        recall_at_5=sum(m.recall_at_5 for m in per_genre) / k,
        recall_at_10=sum(m.recall_at_10 for m in per_genre) / k,
        med_rank=sum(m.med_rank for m in per_genre) / k,
    )


def query_ranks(
    params: ModelParams,
    index: EmbeddingIndex,
    query_ids: Sequence[str],
    text_features: np.ndarray,
) -> List[int]:
    """Rank of each query's own audio among all index items."""
    Q = embed(params, text_features, "text")
    sims = Q @ index.embeddings.T
    return [
        rank_of_correct(sims[i], index.position(qid))
        for i, qid in enumerate(query_ids)
    ]


def evaluate(
    params: ModelParams,
    index: EmbeddingIndex,
    query_ids: Sequence[str],
    text_features: np.ndarray,
    genres: Sequence[str],
    per_genre_pool: bool = False,
) -> RetrievalReport:
    """Per-genre retrieval metrics plus their unweighted macro average.

    With the default global pool every query ranks against the whole index;
    with per_genre_pool each query only ranks against items of its own genre.
    """
    if len(query_ids) != len(genres):
        raise DimensionMismatch("query_ids/genres counts differ")
    by_genre: Dict[str, List[int]] = {}
    for i, g in enumerate(genres):
        by_genre.setdefault(g, []).append(i)

    per: List[GenreMetrics] = []
    if per_genre_pool:
        if index.genres is None:
            raise ValueError("per-genre pooling needs index genres")
        for g in sorted(by_genre):
            qidx = by_genre[g]
            sub = index.subset([i for i, ig in enumerate(index.genres) if ig == g])
            ranks = query_ranks(params, sub, [query_ids[i] for i in qidx],
                                text_features[qidx])
            per.append(_metrics(g, ranks))
    else:
        all_ranks = query_ranks(params, index, query_ids, text_features)
        for g in sorted(by_genre):
            per.append(_metrics(g, [all_ranks[i] for i in by_genre[g]]))
    return RetrievalReport(per_genre=per, macro=macro_average(per),
                           pooling="per-genre" if per_genre_pool else "global")


@dataclass
class SearchHit:
    youtube_id: str
    score: float
    genre: Optional[str] = None


def search(
    params: ModelParams,
    index: EmbeddingIndex,
    text_features: np.ndarray,
    k: int = 9,
    genre_filter: Optional[str] = None,
) -> List[SearchHit]:
    """Top-k audio items for one text feature row, best first.

    Ties are broken by index order, matching rank_of_correct.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    idx = index
    if genre_filter is not None:
        if index.genres is None:
            raise ValueError("genre filter needs index genres")
        keep = [i for i, g in enumerate(index.genres) if g == genre_filter]
        if not keep:
            return []
        idx = index.subset(keep)
    q = embed(params, np.atleast_2d(text_features), "text")[0]
    sims = idx.embeddings @ q
    # stable sort on negated scores keeps index order within ties
    order = np.argsort(-sims, kind="stable")[:k]
    return [
        SearchHit(
            youtube_id=idx.ids[i],
            score=float(sims[i]),
            genre=None if idx.genres is None else idx.genres[i],
        )
        for i in order
    ]
