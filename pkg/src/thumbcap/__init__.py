"""thumbcap: music caption dataset tooling and cross-modal retrieval workbench.

Pipeline: thumbnail image -> five-section caption via an external
vision-language endpoint -> hashed text features + mel audio features ->
dual-encoder contrastive training -> text-to-audio retrieval, with a blinded
human-evaluation protocol on top.
"""
from .errors import ThumbcapError
from .genres import GENRES, canonicalize_genre
from .kernels import BACKEND, compiled_available
from .records import CaptionRecord, EvaluationRecord, load_records, write_records
from .model import Batch, ModelParams, contrastive_loss, embed, init_params
from .training import TrainConfig, load_checkpoint, save_checkpoint, train
from .retrieval import (
    EmbeddingIndex,
    build_index,
    evaluate,
    median_rank,
    rank_of_correct,
    recall_at_k,
    search,
)
from .humeval import Rating, aggregate, presentation_order, score_label

__version__ = "0.1.0"

__all__ = [
    "ThumbcapError",
    "GENRES",
    "canonicalize_genre",
    "BACKEND",
    "compiled_available",
    "CaptionRecord",
    "EvaluationRecord",
    "load_records",
    "write_records",
    "Batch",
    "ModelParams",
    "contrastive_loss",
    "embed",
    "init_params",
    "TrainConfig",
    "train",
    "save_checkpoint",
    "load_checkpoint",
    "EmbeddingIndex",
    "build_index",
    "evaluate",
    "search",
    "rank_of_correct",
    "recall_at_k",
    "median_rank",
    "Rating",
    "aggregate",
    "presentation_order",
    "score_label",
    "__version__",
]
