import json

import pytest

from thumbcap.errors import InvariantViolation, ParseError
from thumbcap.records import (
    CaptionRecord,
    EvaluationRecord,
    caption_length_stats,
    is_valid_youtube_id,
    load_records,
    norm_ws,
    write_records,
)

from conftest import make_caption_record, make_eval_record


def test_norm_ws():
    assert norm_ws("  a\t b\n\nc ") == "a b c"
    assert norm_ws("") == ""


@pytest.mark.parametrize("value,ok", [
    ("0u5-WiBKam8", True),
    ("AAAAAAAAAAA", True),
    ("a_b-c_d-e_f", True),
    ("short", False),
    ("twelve chars", False),
    ("has spaces!", False),
    ("", False),
])
def test_is_valid_youtube_id(value, ok):
    assert is_valid_youtube_id(value) is ok


def test_validate_canonicalizes_genre():
    rec = CaptionRecord(youtube_id="vid00000001", url="u", genre="Hip Hop",
                        caption="c words", sentence="some c words here")
    rec.validate()
    assert rec.genre == "hiphop"


def test_validate_rejects_caption_not_in_sentence():
    rec = CaptionRecord(youtube_id="vid00000001", url="u", genre="jazz",
                        caption="not present", sentence="something else")
    with pytest.raises(InvariantViolation):
        rec.validate(line=3)


def test_caption_containment_is_whitespace_insensitive():
    rec = CaptionRecord(youtube_id="vid00000001", url="u", genre="jazz",
                        caption="a  calm\ttrack", sentence="5. a calm track.")
    rec.validate()  # must not raise


@pytest.mark.parametrize("field,value", [
    ("youtube_id", ""),
    ("url", ""),
    ("caption", "   "),
])
def test_validate_rejects_empty_fields(field, value):
    kwargs = dict(youtube_id="vid00000001", url="u", genre="jazz",
                  caption="cap", sentence="the cap text")
    kwargs[field] = value
    with pytest.raises(InvariantViolation) as exc:
        CaptionRecord(**kwargs).validate(line=7)
    assert exc.value.line == 7


@pytest.mark.parametrize("scores", [(3, 0, 0), (0, -1, 0), (0, 0, True)])
def test_evaluation_scores_validated(scores):
    with pytest.raises(InvariantViolation):
        make_eval_record(1, scores=scores)


def test_all_2s_property():
    assert make_eval_record(1, scores=(2, 2, 2)).all_2s
    assert not make_eval_record(1, scores=(2, 2, 1)).all_2s


def test_write_load_roundtrip(tmp_path):
    records = [make_caption_record(i) for i in range(1, 6)]
    path = tmp_path / "ds.jsonl"
    assert write_records(path, records) == 5
    loaded = load_records(path, "caption")
    assert loaded == records
    # canonical serialization: writing the loaded records is byte-identical
    path2 = tmp_path / "ds2.jsonl"
    write_records(path2, loaded)
    assert path.read_bytes() == path2.read_bytes()


def test_evaluation_roundtrip(tmp_path):
    records = [make_eval_record(i, scores=(2, 1, 0)) for i in range(1, 4)]
    path = tmp_path / "ev.jsonl"
    write_records(path, records)
    loaded = load_records(path, "evaluation")
    assert loaded == records
    assert all(isinstance(r, EvaluationRecord) for r in loaded)


def test_load_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.jsonl"
    good = json.dumps(make_caption_record(1).to_json_dict())
    path.write_text(good + "\n{not json}\n", encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        load_records(path, "caption")
    assert exc.value.line == 2


def test_load_rejects_missing_field(tmp_path):
    obj = make_caption_record(1).to_json_dict()
    del obj["caption"]
    path = tmp_path / "x.jsonl"
    path.write_text(json.dumps(obj) + "\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_records(path, "caption")


def test_load_rejects_duplicate_ids(tmp_path):
    rec = make_caption_record(1)
    path = tmp_path / "dup.jsonl"
    write_records(path, [rec, rec])
    with pytest.raises(InvariantViolation) as exc:
        load_records(path, "caption")
    assert exc.value.line == 2


def test_load_skips_blank_lines(tmp_path):
    rec = make_caption_record(1)
    path = tmp_path / "blank.jsonl"
    path.write_text("\n" + json.dumps(rec.to_json_dict()) + "\n\n", encoding="utf-8")
    assert load_records(path, "caption") == [rec]


def test_caption_length_stats():
    records = [make_caption_record(i) for i in range(1, 4)]
    s = caption_length_stats(records)
    lengths = [len(r.caption) for r in records]
    assert s["count"] == 3
    assert s["min"] == min(lengths) and s["max"] == max(lengths)
    assert s["mean"] == pytest.approx(sum(lengths) / 3)
    assert caption_length_stats([])["count"] == 0
