"""Five-section caption prompt construction.

The template enumerates fixed roles in a fixed order: describe the artwork,
the listening situation, times of day and seasons, the emotions evoked, and a
one-sentence summary of sections 2 through 4. Construction fails on any
reordering or omission so a rendered prompt is always well-formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple


class SectionRole(Enum):
    IMAGE = "image"
    SITUATION = "situation"
    TIME_SEASON = "time_season"
    EMOTION = "emotion"
    SUMMARY = "summary"


CANONICAL_ORDER: Tuple[SectionRole, ...] = (
    SectionRole.IMAGE,
    SectionRole.SITUATION,
    SectionRole.TIME_SEASON,
    SectionRole.EMOTION,
    SectionRole.SUMMARY,
)


@dataclass(frozen=True)
class SectionSpec:
    role: SectionRole
    instruction: str

    def __post_init__(self):
        if not self.instruction.strip():
            raise ValueError(f"empty instruction for section {self.role.value}")


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str
    section_specs: Tuple[SectionSpec, ...]

    def __post_init__(self):
        roles = tuple(s.role for s in self.section_specs)
        if roles != CANONICAL_ORDER:
            raise ValueError(
                "template must have exactly five sections in canonical order, got "
                f"{[r.value for r in roles]}")


DEFAULT_PREAMBLE = (
    "You are given the cover image of a music track. Write a music caption "
    "that focuses on non-musical aspects. Answer in five numbered sections, "
    "each on its own lines, formatted exactly as '1.' through '5.':"
)

DEFAULT_TEMPLATE = PromptTemplate(
    preamble=DEFAULT_PREAMBLE,
    section_specs=(
        SectionSpec(SectionRole.IMAGE,
                    "Describe the mood and visual features of the image itself."),
        SectionSpec(SectionRole.SITUATION,
                    "Describe the situation, scenario, and setting in which one "
                    "would prefer to listen to this music."),
        SectionSpec(SectionRole.TIME_SEASON,
                    "Describe the times of day and the seasons ideal for "
                    "listening to this music."),
        SectionSpec(SectionRole.EMOTION,
                    "Describe the emotions experienced while listening to this "
                    "music."),
        SectionSpec(SectionRole.SUMMARY,
                    "Write one summarizing sentence that encapsulates the "
                    "aspects detailed in sections 2, 3, and 4. Do not mention "
                    "the image."),
    ),
)


def render_prompt(template: PromptTemplate = DEFAULT_TEMPLATE) -> str:
    lines = [template.preamble, ""]
    for i, spec in enumerate(template.section_specs, start=1):
        lines.append(f"{i}. {spec.instruction}")
    return "\n".join(lines)


def render_tag_prompt(tags: Sequence[str]) -> str:
    """Text-only baseline prompt: describe non-musical aspects from tags."""
    tags = [t.strip() for t in tags if t.strip()]
    if not tags:
        raise ValueError("need at least one tag")
    return (
        "The following tags describe a music track: "
        + ", ".join(tags)
        + ". Based on these tags, write a short caption describing the "
        "non-musical aspects of the track: the listening situation, the times "
        "of day or seasons that suit it, and the emotions it evokes."
    )
