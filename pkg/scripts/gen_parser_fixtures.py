"""Regenerate the parser fixture corpus under tests/fixtures/lvlm_outputs/.

Each well-formed fixture is assembled from five planted section bodies using
one marker style, so the expected parse is known by construction and stored
alongside in expected.json. Two malformed fixtures carry expected error names
instead.

Usage: python3 scripts/gen_parser_fixtures.py [out_dir]
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

BODIES_A = [
    "Warm sunset colors over a calm sea, soft grain and a lone silhouette.",
    "Best suited to a quiet evening drive along the coast after a long day.",
    "Late evening hours in early autumn fit this track well.",
    "It evokes a wistful, settled calm with a hint of longing.",
    "A mellow track for unwinding on autumn evenings, carrying a wistful calm.",
]

BODIES_B = [
    "Neon city lights reflecting off wet asphalt under a violet sky.",
    "Fits a late-night workout or an energetic drive through downtown.",
    "Midnight in the middle of summer suits this sound.",
    "Listening brings a surge of adrenaline and restless excitement.",
    "High-energy music for midnight summer drives full of adrenaline.",
]

BODIES_C = [
    "A hand-drawn cottage in snowfall, muted blues and soft lamplight.",
    "Ideal for reading indoors while snow piles up outside the window.",
    "Winter mornings and the first hours of daylight match its pace.",
    "It brings a cozy, sheltered feeling with gentle melancholy.",
    "A gentle winter-morning soundtrack for cozy hours spent indoors.",
]


def mark_dot(i, body):
    return f"{i}. {body}"


def mark_paren(i, body):
    return f"{i}) {body}"


def mark_section(i, body):
    return f"Section {i}: {body}"


def mark_section_dot(i, body):
    return f"Section {i}. {body}"


def mark_bold(i, body):
    return f"**{i}.** {body}"


def mark_bold_paren(i, body):
    return f"**{i})** {body}"


def inline(style, bodies, sep="\n"):
    return sep.join(style(i, b) for i, b in enumerate(bodies, 1)) + "\n"


def marker_then_body(style, bodies):
    parts = []
    for i, b in enumerate(bodies, 1):
        parts.append(style(i, ""))
        parts.append(b)
    return "\n".join(parts) + "\n"


def build() -> dict:
    fixtures = {}

    def ok(name, text, bodies):
        fixtures[name] = {"text": text, "sections": list(bodies)}

    ok("f01_dot.txt", inline(mark_dot, BODIES_A), BODIES_A)
    ok("f02_paren.txt", inline(mark_paren, BODIES_A), BODIES_A)
    ok("f03_section_colon.txt", inline(mark_section, BODIES_A), BODIES_A)
    ok("f04_bold.txt", inline(mark_bold, BODIES_B), BODIES_B)
    ok("f05_section_dot.txt", inline(mark_section_dot, BODIES_B), BODIES_B)
    ok("f06_bold_paren.txt", inline(mark_bold_paren, BODIES_C), BODIES_C)

    # multi-line bodies: two sentences split over lines
    multi = [b.replace(", ", ",\n", 1) for b in BODIES_A]
    ok("f07_multiline.txt", inline(mark_dot, multi), multi)

    # marker alone on its line, body following
    ok("f08_body_next_line.txt", marker_then_body(mark_dot, BODIES_B), BODIES_B)

    # chatty preamble before the first marker is dropped
    pre = "Sure! Here is the caption you asked for:\n\n" + inline(mark_dot, BODIES_C)
    ok("f09_preamble.txt", pre, BODIES_C)

    # blank lines between sections
    ok("f10_blank_lines.txt", inline(mark_dot, BODIES_A, sep="\n\n\n"), BODIES_A)

    # one marker style per section
    styles = [mark_dot, mark_paren, mark_section, mark_bold, mark_dot]
    mixed = "\n".join(s(i, b) for i, (s, b) in
                      enumerate(zip(styles, BODIES_B), 1)) + "\n"
    ok("f11_mixed_styles.txt", mixed, BODIES_B)

    # CRLF line endings
    ok("f12_crlf.txt", inline(mark_dot, BODIES_C).replace("\n", "\r\n"), BODIES_C)

    # trailing whitespace after bodies
    trailed = "\n".join(mark_dot(i, b) + "   " for i, b in
                        enumerate(BODIES_A, 1)) + "\n"
    ok("f13_trailing_ws.txt", trailed, BODIES_A)

    # indented markers
    indented = "\n".join("   " + mark_dot(i, b) for i, b in
                         enumerate(BODIES_B, 1)) + "\n"
    ok("f14_indented.txt", indented, BODIES_B)

    # digits inside bodies (not at line starts)
    digits = [
        "A poster with bold 80s typography and a chrome moon.",
        "Great for parties that run from 9pm until 2am.",
        "Weekends around 11pm in midsummer, when days stretch to 15 hours.",
        "It sparks euphoric, carefree energy, like turning the volume to 11.",
        "An 80s-flavored party track for euphoric midsummer nights.",
    ]
    ok("f15_digits_in_body.txt", inline(mark_dot, digits), digits)

    # unicode bodies
    uni = [
        "夕焼けの海辺を描いた、淡い色調のジャケット。",
        "一日の終わりに静かな部屋でくつろぎながら聴きたい。",
        "秋の夕方、日が沈む頃に合う。",
        "穏やかで少し切ない気持ちになる。",
        "秋の夕暮れに静かに聴きたい、穏やかで切ない一曲。",
    ]
    ok("f16_unicode.txt", inline(mark_dot, uni), uni)

    # numbered colon style "1.:" some models emit after bold strip
    colon = "\n".join(f"{i}.: {b}" for i, b in enumerate(BODIES_C, 1)) + "\n"
    ok("f17_dot_colon.txt", colon, BODIES_C)

    # longer multi-sentence, multi-line bodies
    long_bodies = [
        "A film-grain photograph of a rainy street.\nUmbrellas blur into "
        "streaks of color while headlights smear across the frame.",
        "Suits a slow walk home through light rain.\nAlso fits waiting in a "
        "quiet cafe while the storm passes.",
        "Rainy season evenings, especially in late spring.\nGray afternoons "
        "work just as well.",
        "A soft, reflective mood settles in.\nThere is comfort in it, and a "
        "mild ache of nostalgia.",
        "A reflective rainy-evening track for slow walks and cafe windows,"
        "\ncomforting and lightly nostalgic.",
    ]
    ok("f18_long_bodies.txt", inline(mark_dot, long_bodies), long_bodies)

    # malformed: only four sections
    fixtures["f19_only_four.txt"] = {
        "text": inline(mark_dot, BODIES_A[:4]),
        "error": "MissingSection",
        "n": 5,
    }
    # malformed: six sections
    six = BODIES_B + ["An extra section that should not exist."]
    fixtures["f20_six_sections.txt"] = {
        "text": inline(mark_dot, six),
        "error": "TooManySections",
    }
    return fixtures


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else \
        Path("tests/fixtures/lvlm_outputs")
    out_dir.mkdir(parents=True, exist_ok=True)
    fixtures = build()
    expected = {}
    for name, spec in sorted(fixtures.items()):
        (out_dir / name).write_text(spec["text"], encoding="utf-8")
        expected[name] = {k: v for k, v in spec.items() if k != "text"}
    with open(out_dir / "expected.json", "w", encoding="utf-8") as fh:
        json.dump(expected, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    print(f"wrote {len(fixtures)} fixtures + expected.json -> {out_dir}")


if __name__ == "__main__":
    main()
