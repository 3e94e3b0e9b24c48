import pytest

from thumbcap.prompts import (
    CANONICAL_ORDER,
    DEFAULT_TEMPLATE,
    PromptTemplate,
    SectionRole,
    SectionSpec,
    render_prompt,
    render_tag_prompt,
)


def test_default_template_is_canonical():
    assert tuple(s.role for s in DEFAULT_TEMPLATE.section_specs) == CANONICAL_ORDER
    assert len(DEFAULT_TEMPLATE.section_specs) == 5


def test_render_numbers_sections_one_to_five():
    text = render_prompt()
    for i in range(1, 6):
        assert f"\n{i}. " in "\n" + text
    assert text.startswith(DEFAULT_TEMPLATE.preamble)
    # deterministic
    assert render_prompt() == text


def test_section_instructions_appear_verbatim():
    text = render_prompt()
    for spec in DEFAULT_TEMPLATE.section_specs:
        assert spec.instruction in text


def test_summary_section_refers_to_middle_sections():
    summary = DEFAULT_TEMPLATE.section_specs[-1].instruction
    assert "2" in summary and "3" in summary and "4" in summary


def test_reordered_template_rejected():
    specs = list(DEFAULT_TEMPLATE.section_specs)
    specs[1], specs[2] = specs[2], specs[1]
    with pytest.raises(ValueError):
        PromptTemplate(preamble="p", section_specs=tuple(specs))


def test_missing_section_rejected():
    with pytest.raises(ValueError):
        PromptTemplate(preamble="p",
                       section_specs=DEFAULT_TEMPLATE.section_specs[:4])


def test_duplicate_role_rejected():
    specs = list(DEFAULT_TEMPLATE.section_specs[:4])
    specs.append(SectionSpec(SectionRole.EMOTION, "again"))
    with pytest.raises(ValueError):
        PromptTemplate(preamble="p", section_specs=tuple(specs))


def test_empty_instruction_rejected():
    with pytest.raises(ValueError):
        SectionSpec(SectionRole.IMAGE, "   ")


def test_tag_prompt_joins_tags():
    text = render_tag_prompt(["lofi", "piano", "rain"])
    assert "lofi, piano, rain" in text
    assert "situation" in text and "emotion" in text


def test_tag_prompt_strips_and_requires_tags():
    assert "jazz" in render_tag_prompt(["  jazz  "])
    with pytest.raises(ValueError):
        render_tag_prompt([])
    with pytest.raises(ValueError):
        render_tag_prompt(["  ", ""])
