"""Parse numbered five-section generations into structured fields.

The marker grammar is deliberately small: a section heading is a line starting
with "1."/"1)", "Section 1:", or a bold "**1.**" variant (any of these may
carry trailing text on the same line). Anything else is treated as body text;
outputs that do not yield exactly five sections in order fail loudly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import MissingSection, TooManySections
from .records import CaptionRecord

N_SECTIONS = 5

# one regex per accepted marker style; group 1 is the section number,
# group 2 whatever follows the marker on the same line
_MARKERS = [
    re.compile(r"^\s*\**\s*(\d+)\s*[.)]\s*\**[:\s]*(.*)$"),
    re.compile(r"^\s*\**\s*section\s+(\d+)\s*[:.)]\s*\**\s*(.*)$", re.IGNORECASE),
]


def _match_marker(line: str) -> Optional[Tuple[int, str]]:
    for rx in _MARKERS:
        m = rx.match(line)
        if m:
            return int(m.group(1)), m.group(2).strip()
    return None


@dataclass(frozen=True)
class ParsedGeneration:
    sections: Tuple[str, ...]
    raw: str

    def __post_init__(self):
        if len(self.sections) != N_SECTIONS:
            raise ValueError(f"expected {N_SECTIONS} sections, got {len(self.sections)}")

    @property
    def caption(self) -> str:
        return self.sections[N_SECTIONS - 1]


def parse_sections(raw: str) -> ParsedGeneration:
    """Split a generation on numbered headings into exactly five sections.

    Headings must appear in increasing order 1..5; a heading numbered above 5
    (or a second pass through any number) raises TooManySections, an absent or
    empty section raises MissingSection(n).
    """
    bodies: List[List[str]] = []
    expected = 1
    current: Optional[List[str]] = None
    for line in raw.splitlines():
        hit = _match_marker(line)
        if hit is not None:
            num, rest = hit
            if num > N_SECTIONS or num < expected:
                raise TooManySections(
                    f"unexpected section marker {num} (wanted {expected})")
            if num != expected:
                raise MissingSection(expected)
            current = [rest] if rest else []
            bodies.append(current)
            expected += 1
        elif current is not None:
            current.append(line)
        # text before the first marker (chatty preamble) is dropped

    if len(bodies) < N_SECTIONS:
        raise MissingSection(len(bodies) + 1)
    sections = tuple("\n".join(b).strip() for b in bodies)
    for i, body in enumerate(sections, start=1):
        if not body:
            raise MissingSection(i)
    return ParsedGeneration(sections=sections, raw=raw)


def to_caption_record(parsed: ParsedGeneration, youtube_id: str, url: str,
                      genre: str) -> CaptionRecord:
    """Caption is the summary section; sentence keeps the full raw output."""
    return CaptionRecord(
        youtube_id=youtube_id,
        url=url,
        genre=genre,
        caption=parsed.caption,
        sentence=parsed.raw,
    )
