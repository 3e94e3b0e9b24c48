"""Exception types raised across the package.

Everything derives from ThumbcapError so callers (and the CLI) can catch one
base class and map it to a nonzero exit.
"""
from __future__ import annotations


class ThumbcapError(Exception):
    """Base class for all package errors."""


# --- dataset / records ---

class UnknownGenre(ThumbcapError):
    def __init__(self, raw: str):
        super().__init__(f"unknown genre: {raw!r}")
        self.raw = raw


class ParseError(ThumbcapError):
    """A line of an input file could not be parsed."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvariantViolation(ThumbcapError):
    """A record parsed but violated a type invariant."""

    def __init__(self, line: int, field: str, reason: str = ""):
        msg = f"line {line}: invalid {field}" + (f": {reason}" if reason else "")
        super().__init__(msg)
        self.line = line
        self.field = field


class InsufficientRecords(ThumbcapError):
    pass


# --- caption generation ---

class MalformedId(ThumbcapError):
    pass


class EndpointUnreachable(ThumbcapError):
    pass


class RateLimited(ThumbcapError):
    def __init__(self, retry_after: float | None = None):
        super().__init__(f"rate limited (retry_after={retry_after})")
        self.retry_after = retry_after


class MalformedResponse(ThumbcapError):
    pass


class MissingSection(ThumbcapError):
    def __init__(self, n: int):
        super().__init__(f"section {n} missing from generation output")
        self.n = n


class TooManySections(ThumbcapError):
    pass


# --- human evaluation ---

class OutOfRange(ThumbcapError):
    pass


class IncompleteRatings(ThumbcapError):
    """The rating matrix for a method is not fully crossed."""

    def __init__(self, item_id: str = "", evaluator_id: str = "", method: str = ""):
        parts = []
        if item_id:
            parts.append(f"item {item_id!r} is missing a rating")
        if evaluator_id:
            parts.append(f"from evaluator {evaluator_id!r}")
        if method:
            parts.append(f"for method {method}")
        super().__init__(" ".join(parts) if parts else "no ratings found")
        self.item_id = item_id
        self.evaluator_id = evaluator_id
        self.method = method


class DuplicateRating(ThumbcapError):
    pass


# --- audio / features ---

class EmptyAudio(ThumbcapError):
    pass


class NonFiniteSamples(ThumbcapError):
    pass


class UnsupportedFormat(ThumbcapError):
    pass


class CorruptHeader(ThumbcapError):
    pass


class CorruptFeatureFile(ThumbcapError):
    pass


# --- model / training ---

class DimensionMismatch(ThumbcapError):
    pass


class NonFiniteLoss(ThumbcapError):
    pass


class NonFiniteGradient(ThumbcapError):
    pass


class InsufficientData(ThumbcapError):
    pass


class VersionMismatch(ThumbcapError):
    pass


class CorruptCheckpoint(ThumbcapError):
    pass


# --- retrieval ---

class MissingFeatures(ThumbcapError):
    def __init__(self, youtube_id: str):
        super().__init__(f"no features for {youtube_id!r}")
        self.youtube_id = youtube_id


class UnknownId(ThumbcapError):
    pass


class EmptyRanks(ThumbcapError):
    pass


class EmptyIndex(ThumbcapError):
    pass
