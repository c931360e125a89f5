"""Forward maximum-matching segmenter used to generate predictions without external models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import Sentence
from .exceptions import ValidationError
from .validation import check_sentences


@dataclass(frozen=True)
class MatchDict:
    vocabulary: frozenset[str]
    max_word_len: int

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "MatchDict":
        vocab = frozenset(w for w in words if w)
        if not vocab:
            raise ValidationError("dictionary is empty")
        return cls(vocab, max(len(w) for w in vocab))


def segment_fmm(chars: str, dictionary: MatchDict) -> list[tuple[int, int]]:
    """Greedy left-to-right longest match; unmatched characters become single words."""
    if not chars:
        raise ValidationError("cannot segment an empty string")
    out = []
    i = 0
    n = len(chars)
    while i < n:
        end = i + 1
        for j in range(min(n, i + dictionary.max_word_len), i + 1, -1):
            if chars[i:j] in dictionary.vocabulary:
                end = j
                break
        out.append((i, end))
        i = end
    return out


class FMMSegmenter(BaseEstimator):
    """Dictionary segmenter fitted on the words of a training corpus.

    Attributes
    ----------
    dictionary_ : MatchDict
    """

    def fit(self, X: Sequence[Sentence], y=None):
        check_sentences(X, "training set")
        self.dictionary_ = MatchDict.from_words(w for s in X for w in s.words)
        return self

    def predict(self, X: Sequence[str | Sentence]) -> list[Sentence]:
        """Segment raw strings (or re-segment the characters of sentences)."""
        check_is_fitted(self, "dictionary_")
        out = []
        for item in X:
            chars = item.chars if isinstance(item, Sentence) else "".join(item.split())
            out.append(Sentence(chars, tuple(segment_fmm(chars, self.dictionary_))))
        return out
