import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from segdiag.corpus import (
    ParseReport,
    Sentence,
    derive_labels,
    extract_spans,
    format_sentences,
    load_char_mapping,
    parse_lines,
    parse_segmented_file,
)
from segdiag.exceptions import ValidationError

words = st.text(alphabet="图书馆在节假日会关闭ab", min_size=1, max_size=4)


def test_fig1_sentence(tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("图书馆 在 节假日 会 关闭\n", encoding="utf-8")
    (sent,) = parse_segmented_file(f)
    assert [e - s for s, e in sent.bounds] == [3, 1, 3, 1, 2]
    assert sent.chars == "图书馆在节假日会关闭"


def test_single_token_line(tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("a", encoding="utf-8")
    (sent,) = parse_segmented_file(f)
    assert sent.words == ["a"]
    assert len(sent) == 1


def test_trailing_blank_line_and_crlf(tmp_path):
    raw = "a b\r\ncd  e\r\n　f\tg\r\n\r\n"
    f = tmp_path / "x.txt"
    f.write_bytes(raw.encode("utf-8"))
    report = ParseReport()
    got = parse_segmented_file(f, report=report)
    # hand-written splitter over the same bytes
    expected = []
    for line in raw.encode("utf-8").decode("utf-8").replace("\r\n", "\n").split("\n"):
        toks = line.split()
        if toks:
            expected.append(toks)
    assert [s.words for s in got] == expected
    assert len(got) == 3
    assert report.skipped_blank == 1


def test_whitespace_only_line_counted(tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("a\n   \nb\n", encoding="utf-8")
    report = ParseReport()
    assert len(parse_segmented_file(f, report=report)) == 2
    assert report.skipped_blank == 1
    assert report.warnings


def test_invalid_utf8_names_offset(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_bytes(b"ab c\n\xff\xfe")
    with pytest.raises(ValidationError, match="byte offset 5"):
        parse_segmented_file(f)


def test_missing_file_is_oserror(tmp_path):
    with pytest.raises(OSError):
        parse_segmented_file(tmp_path / "nope.txt")


def test_mapping_applied_at_load(tmp_path):
    m = tmp_path / "map.txt"
    m.write_text("圖 图\n書 书\n館 馆\n", encoding="utf-8")
    f = tmp_path / "x.txt"
    f.write_text("圖書館 在\n", encoding="utf-8")
    (sent,) = parse_segmented_file(f, load_char_mapping(m))
    assert sent.words == ["图书馆", "在"]


@pytest.mark.parametrize(
    "n, expected",
    [(1, "S"), (2, "BE"), (3, "BME"), (5, "BMMME")],
)
def test_derive_labels(n, expected):
    assert derive_labels(n) == expected


def test_derive_labels_five_by_definition():
    # enumerate the pattern position by position
    n = 5
    pattern = "".join("B" if i == 0 else "E" if i == n - 1 else "M" for i in range(n))
    assert derive_labels(n) == pattern


def test_derive_labels_rejects_zero():
    with pytest.raises(ValidationError):
        derive_labels(0)


@given(st.integers(1, 50))
def test_derive_labels_counts(n):
    tags = derive_labels(n)
    assert len(tags) == n
    assert (tags.count("B") == 1) == (n >= 2)
    assert (tags.count("E") == 1) == (n >= 2)
    assert (tags.count("S") == 1) == (n == 1)


def test_extract_spans_fig1():
    spans = extract_spans(Sentence.from_words(["图书馆", "在"]), 0)
    assert [(s.start, s.end, s.text, s.labels) for s in spans] == [
        (0, 3, "图书馆", "BME"),
        (3, 4, "在", "S"),
    ]


def test_extract_spans_all_single_chars_among_all_segmentations():
    chars = "abcd"
    segs = []
    # brute force over all 2^3 segmentations of a 4-char string
    for cuts in itertools.product([0, 1], repeat=len(chars) - 1):
        words, cur = [], chars[0]
        for c, cut in zip(chars[1:], cuts):
            if cut:
                words.append(cur)
                cur = c
            else:
                cur += c
        words.append(cur)
        segs.append(words)
    singles = [w for w in segs if all(len(x) == 1 for x in w)]
    assert len(segs) == 8 and len(singles) == 1
    spans = extract_spans(Sentence.from_words(singles[0]), 3)
    assert len(spans) == 4
    assert all(s.labels == "S" and s.sentence_index == 3 for s in spans)


def test_sentence_invariants():
    with pytest.raises(ValidationError):
        Sentence("abc", ((0, 1), (2, 3)))
    with pytest.raises(ValidationError):
        Sentence("abc", ((0, 1),))
    with pytest.raises(ValidationError):
        Sentence("", ())


@given(st.lists(st.lists(words, min_size=1, max_size=6), min_size=1, max_size=8))
def test_round_trip(raw):
    sents = [Sentence.from_words(ws) for ws in raw]
    again = parse_lines(format_sentences(sents).split("\n")[:-1])
    assert again == sents


@given(st.lists(words, min_size=1, max_size=8))
def test_spans_cover_characters(ws):
    sent = Sentence.from_words(ws)
    spans = extract_spans(sent, 0)
    assert sorted("".join(s.text for s in spans)) == sorted(sent.chars)
    assert [s.start for s in spans] == sorted(s.start for s in spans)
