"""Per-word attributes computed against a training corpus.

Seven attributes describe each test word: word length, sentence length, OOV
density, word and character frequency, and word and character label
consistency.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import astuple, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import Sentence, Span, corpus_spans, derive_labels, extract_spans
from .exceptions import ValidationError
from .validation import check_aligned, check_sentences

ATTRIBUTES = ("wLen", "sLen", "oDen", "wFre", "cFre", "wCon", "cCon")
INTEGER_ATTRIBUTES = frozenset({"wLen", "sLen"})


@dataclass(frozen=True)
class TrainingStats:
    word_label_counts: Counter = field(default_factory=Counter)
    word_counts: Counter = field(default_factory=Counter)
    char_label_counts: Counter = field(default_factory=Counter)
    char_counts: Counter = field(default_factory=Counter)

    @property
    def total_word_tokens(self) -> int:
        return sum(self.word_counts.values())

    @property
    def total_char_tokens(self) -> int:
        return sum(self.char_counts.values())

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.word_counts)

    @classmethod
    def from_labeled_words(cls, pairs: Iterable[tuple[str, str]]) -> "TrainingStats":
        """Count ``(word, labels)`` occurrences, labels not necessarily canonical."""
        wl: Counter = Counter()
        w: Counter = Counter()
        cl: Counter = Counter()
        c: Counter = Counter()
        for word, labels in pairs:
            if len(word) != len(labels):
                raise ValidationError(f"label {labels!r} does not fit word {word!r}")
            wl[word, labels] += 1
            w[word] += 1
            for ch, tag in zip(word, labels):
                cl[ch, tag] += 1
                c[ch] += 1
        return cls(wl, w, cl, c)

    def __add__(self, other: "TrainingStats") -> "TrainingStats":
        return merge_training(self, other)


def build_training_stats(train: Sequence[Sentence]) -> TrainingStats:
    check_sentences(train, "training set")
    return TrainingStats.from_labeled_words(
        (s.text, s.labels) for s in corpus_spans(train)
    )


def merge_training(a: TrainingStats, b: TrainingStats) -> TrainingStats:
    """Pointwise sum of two sets of training counts."""
    return TrainingStats(
        a.word_label_counts + b.word_label_counts,
        a.word_counts + b.word_counts,
        a.char_label_counts + b.char_label_counts,
        a.char_counts + b.char_counts,
    )


def psi_word(word: str, labels: str, stats: TrainingStats) -> float:
    """Fraction of the word's training occurrences that carry ``labels``.

    Zero when the word never occurs in training.
    """
    total = stats.word_counts.get(word, 0)
    if total == 0:
        return 0.0
    return stats.word_label_counts.get((word, labels), 0) / total


def psi_char(char: str, tag: str, stats: TrainingStats) -> float:
    total = stats.char_counts.get(char, 0)
    if total == 0:
        return 0.0
    return stats.char_label_counts.get((char, tag), 0) / total


@dataclass(frozen=True)
class AttributeVector:
    wLen: int
    sLen: int
    oDen: float
    wFre: float
    cFre: float
    wCon: float
    cCon: float

    def __getitem__(self, name: str):
        return getattr(self, name)

    def as_tuple(self) -> tuple:
        return astuple(self)


def oov_density(sentence: Sentence, stats: TrainingStats) -> float:
    words = sentence.words
    return sum(w not in stats.word_counts for w in words) / len(words)


def attribute_vector(
    span: Span,
    sentence: Sentence,
    stats: TrainingStats,
    slen_unit: str = "char",
) -> AttributeVector:
    """Attributes of one word occurrence.

    Sentence-level attributes (``sLen``, ``oDen``) always come from the
    sentence's gold words, so a predicted span identical to a gold span gets
    identical attributes.
    """
    text = span.text
    total_words = stats.total_word_tokens
    total_chars = stats.total_char_tokens
    if slen_unit == "char":
        s_len = len(sentence.chars)
    elif slen_unit == "word":
        s_len = len(sentence.bounds)
    else:
        raise ValidationError(f"slen_unit must be 'char' or 'word', got {slen_unit!r}")
    w_fre = stats.word_counts.get(text, 0) / total_words if total_words else 0.0
    if total_chars:
        c_fre = sum(stats.char_counts.get(c, 0) for c in text) / (total_chars * len(text))
    else:
        c_fre = 0.0
    c_con = sum(psi_char(c, t, stats) for c, t in zip(text, span.labels)) / len(text)
    return AttributeVector(
        wLen=len(text),
        sLen=s_len,
        oDen=oov_density(sentence, stats),
        wFre=w_fre,
        cFre=c_fre,
        wCon=psi_word(text, span.labels, stats),
        cCon=c_con,
    )


class AttributeExtractor(TransformerMixin, BaseEstimator):
    """Fit training counts, then map sentences to per-word attribute rows.

    Parameters
    ----------
    slen_unit : {"char", "word"}
        Unit used for the sentence length attribute.

    Attributes
    ----------
    stats_ : TrainingStats
        Counts collected from the training sentences.
    """

    def __init__(self, slen_unit: str = "char"):
        self.slen_unit = slen_unit

    def fit(self, X: Sequence[Sentence], y=None):
        if self.slen_unit not in ("char", "word"):
            raise ValidationError(f"slen_unit must be 'char' or 'word', got {self.slen_unit!r}")
        self.stats_ = build_training_stats(X)
        return self

    def attribute_vectors(
        self,
        X: Sequence[Sentence],
        reference: Sequence[Sentence] | None = None,
    ) -> list[AttributeVector]:
        """One vector per word of ``X``.

        ``reference`` supplies the gold sentences for sentence-level
        attributes when ``X`` is a predicted segmentation.
        """
        check_is_fitted(self, "stats_")
        check_sentences(X, "input")
        if reference is None:
            reference = X
        else:
            check_aligned(reference, X)
        out = []
        for i, (sent, ref) in enumerate(zip(X, reference)):
            for span in extract_spans(sent, i):
                out.append(attribute_vector(span, ref, self.stats_, self.slen_unit))
        return out

    def transform(self, X: Sequence[Sentence]) -> np.ndarray:
        rows = [v.as_tuple() for v in self.attribute_vectors(X)]
        return np.asarray(rows, dtype=float).reshape(-1, len(ATTRIBUTES))

    def get_feature_names_out(self, input_features=None):
        return np.asarray(ATTRIBUTES, dtype=object)


__all__ = [
    "ATTRIBUTES",
    "AttributeExtractor",
    "AttributeVector",
    "TrainingStats",
    "attribute_vector",
    "build_training_stats",
    "derive_labels",
    "merge_training",
    "oov_density",
    "psi_char",
    "psi_word",
]
