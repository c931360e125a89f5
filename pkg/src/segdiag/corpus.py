"""Segmented-text corpora, BMES labels and word spans.

Input files are whitespace-segmented plain text, one sentence per line.
A "character" is a Unicode scalar value, i.e. one element of a Python ``str``.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .exceptions import ValidationError

logger = logging.getLogger(__name__)

TAGS = ("B", "M", "E", "S")


def derive_labels(word_length: int) -> str:
    """Return the canonical BMES tag string for a word of ``word_length`` chars.

    >>> derive_labels(3)
    'BME'
    >>> derive_labels(1)
    'S'
    """
    if word_length < 1:
        raise ValidationError(f"word length must be >= 1, got {word_length}")
    if word_length == 1:
        return "S"
    return "B" + "M" * (word_length - 2) + "E"


@dataclass(frozen=True)
class Sentence:
    """A character string with its gold segmentation.

    ``bounds`` holds one ``(start, end)`` half-open character range per word.
    """

    chars: str
    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValidationError("a sentence needs at least one word")
        pos = 0
        for start, end in self.bounds:
            if start != pos or end <= start:
                raise ValidationError(
                    f"word ranges must be non-empty and contiguous, got {self.bounds!r}"
                )
            pos = end
        if pos != len(self.chars):
            raise ValidationError(
                f"word ranges end at {pos} but sentence has {len(self.chars)} chars"
            )

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Sentence":
        words = list(words)
        bounds = []
        pos = 0
        for w in words:
            bounds.append((pos, pos + len(w)))
            pos += len(w)
        return cls("".join(words), tuple(bounds))

    @property
    def words(self) -> list[str]:
        return [self.chars[s:e] for s, e in self.bounds]

    def __len__(self) -> int:
        return len(self.chars)

    def to_line(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class Span:
    sentence_index: int
    start: int
    end: int
    text: str
    labels: str

    def __post_init__(self):
        if not (self.end - self.start == len(self.labels) == len(self.text)):
            raise ValidationError(f"inconsistent span {self!r}")

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.sentence_index, self.start, self.end)


@dataclass(frozen=True)
class Corpus:
    name: str
    train: tuple[Sentence, ...]
    test: tuple[Sentence, ...]
    dev: tuple[Sentence, ...] = ()


@dataclass
class ParseReport:
    path: str = ""
    lines: int = 0
    sentences: int = 0
    skipped_blank: int = 0
    warnings: list[str] = field(default_factory=list)


def extract_spans(sentence: Sentence, sentence_index: int) -> list[Span]:
    return [
        Span(sentence_index, s, e, sentence.chars[s:e], derive_labels(e - s))
        for s, e in sentence.bounds
    ]


def corpus_spans(sentences: Sequence[Sentence]) -> list[Span]:
    """All gold spans of a corpus, in sentence then position order."""
    out: list[Span] = []
    for i, sent in enumerate(sentences):
        out.extend(extract_spans(sent, i))
    return out


def load_char_mapping(path: str | os.PathLike) -> dict[str, str]:
    """Read a two-column ``source target`` character mapping file."""
    mapping: dict[str, str] = {}
    text = _decode(path)
    for lineno, line in enumerate(text.split("\n"), 1):
        cols = line.split()
        if not cols:
            continue
        if len(cols) != 2 or len(cols[0]) != 1 or len(cols[1]) != 1:
            raise ValidationError(f"{path}:{lineno}: expected two single characters")
        mapping[cols[0]] = cols[1]
    return mapping


def _decode(path: str | os.PathLike) -> str:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid UTF-8 at byte offset {exc.start}"
        ) from None


def parse_lines(
    lines: Iterable[str],
    mapping: Mapping[str, str] | None = None,
    report: ParseReport | None = None,
) -> list[Sentence]:
    table = str.maketrans(dict(mapping)) if mapping else None
    sentences = []
    for lineno, line in enumerate(lines, 1):
        if report is not None:
            report.lines += 1
        if line.endswith("\r"):
            line = line[:-1]
        words = line.split()
        if not words:
            if report is not None:
                report.skipped_blank += 1
                report.warnings.append(f"line {lineno}: blank line skipped")
            continue
        if table is not None:
            words = [w.translate(table) for w in words]
        sentences.append(Sentence.from_words(words))
    if report is not None:
        report.sentences += len(sentences)
    return sentences


def parse_segmented_file(
    path: str | os.PathLike,
    mapping: Mapping[str, str] | None = None,
    report: ParseReport | None = None,
) -> list[Sentence]:
    """Parse a UTF-8 whitespace-segmented file into sentences.

    Blank lines are skipped and counted in ``report``. Invalid UTF-8 raises
    :class:`ValidationError` naming the byte offset.
    """
    text = _decode(path)
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if report is None:
        report = ParseReport()
    report.path = os.fspath(path)
    sentences = parse_lines(lines, mapping, report)
    if report.skipped_blank:
        logger.warning("%s: skipped %d blank line(s)", path, report.skipped_blank)
    return sentences


def format_sentences(sentences: Iterable[Sentence]) -> str:
    return "".join(s.to_line() + "\n" for s in sentences)


def write_segmented_file(path: str | os.PathLike, sentences: Iterable[Sentence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_sentences(sentences))


def load_corpus(
    name: str,
    train: str | os.PathLike,
    test: str | os.PathLike,
    dev: str | os.PathLike | None = None,
    mapping: Mapping[str, str] | None = None,
) -> Corpus:
    return Corpus(
        name=name,
        train=tuple(parse_segmented_file(train, mapping)),
        test=tuple(parse_segmented_file(test, mapping)),
        dev=tuple(parse_segmented_file(dev, mapping)) if dev else (),
    )
