"""Genre registry and canonicalization.

Fifteen genres are registered. Alias handling reconciles spelling variants
("hip hop" vs "hiphop", "big room" vs "bigroom") on top of case and
whitespace folding; anything else is an error rather than a pass-through.
"""
from __future__ import annotations

import re

from .errors import UnknownGenre

GENRES = (
    "house",
    "edm",
    "classic",
    "chill",
    "lofi",
    "nightcore",
    "anime",
    "pop",
    "rock",
    "instrumental",
    "tropical house",
    "jazz",
    "r&b",
    "hiphop",
    "bigroom",
)

_ALIASES = {
    "hip hop": "hiphop",
    "big room": "bigroom",
}

_GENRE_SET = frozenset(GENRES)
_WS = re.compile(r"\s+")


def canonicalize_genre(raw: str) -> str:
    """Fold case/whitespace and resolve known aliases to a registry member."""
    if not raw or not raw.strip():
        raise UnknownGenre(raw)
    folded = _WS.sub(" ", raw.strip().lower())
    folded = _ALIASES.get(folded, folded)
    if folded not in _GENRE_SET:
        raise UnknownGenre(raw)
    return folded
