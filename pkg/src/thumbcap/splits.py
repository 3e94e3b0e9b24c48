"""Dataset splits and per-genre counts.

Validation is sampled from train without replacement using the documented
SplitMix64 partial shuffle, so the same seed yields the same split anywhere.
Ids appearing in the evaluation set are excluded from train before sampling,
keeping the three splits disjoint by youtube_id.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence

from .errors import InsufficientRecords
from .records import CaptionRecord, EvaluationRecord
from .rng import SplitMix64, derive_seed


@dataclass
class DatasetSplit:
    train: List[CaptionRecord] = field(default_factory=list)
    validation: List[CaptionRecord] = field(default_factory=list)
    test: List[EvaluationRecord] = field(default_factory=list)

    def id_sets(self):
        return (
            {r.youtube_id for r in self.train},
            {r.youtube_id for r in self.validation},
            {r.youtube_id for r in self.test},
        )


def make_split(
    records: Sequence[CaptionRecord],
    eval_records: Sequence[EvaluationRecord],
    validation_count: int,
    seed: int,
    all_2s_only: bool = True,
) -> DatasetSplit:
    """Carve train/validation/test out of caption + evaluation records.

    All evaluated ids leave the train pool (not only the all-2s ones), then
    ``validation_count`` records are drawn from what remains.
    """
    eval_ids = {r.youtube_id for r in eval_records}
    pool = [r for r in records if r.youtube_id not in eval_ids]
    if validation_count > len(pool):
        raise InsufficientRecords(
            f"validation_count={validation_count} exceeds {len(pool)} eligible records"
        )
    rng = SplitMix64(derive_seed(seed, "dataset-split"))
    chosen = rng.sample_indices(len(pool), validation_count)
    chosen_set = set(chosen)
    validation = [pool[i] for i in chosen]
    train = [r for i, r in enumerate(pool) if i not in chosen_set]
    test = [r for r in eval_records if r.all_2s] if all_2s_only else list(eval_records)
    return DatasetSplit(train=train, validation=validation, test=test)


def genre_counts(records: Iterable) -> Dict[str, int]:
    """Count records per genre. Works on any iterable of records."""
    counts: Counter = Counter()
    for rec in records:
        counts[rec.genre] += 1
    return dict(counts)
