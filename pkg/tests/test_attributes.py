from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from segdiag.attributes import (
    ATTRIBUTES,
    AttributeExtractor,
    TrainingStats,
    attribute_vector,
    build_training_stats,
    merge_training,
    psi_char,
    psi_word,
)
from segdiag.corpus import Sentence, extract_spans
from segdiag.exceptions import ValidationError

from .conftest import random_corpus

S = Sentence.from_words


def fig1_stats(extra=()):
    pairs = [("图书馆", "BME")] * 7 + [("图书馆", "BMM")] * 3 + list(extra)
    return TrainingStats.from_labeled_words(pairs)


def test_single_occurrence_counts():
    stats = build_training_stats([S(["图书馆", "在"])])
    assert stats.word_counts["图书馆"] == 1
    assert stats.char_counts["馆"] == 1


def test_whole_word_occurrences_only():
    train = [S(["ab", "c"]), S(["a", "b"]), S(["abc"]), S(["a", "bc"]), S(["ab"])]
    stats = build_training_stats(train)
    # hand count: "a" appears as a whole word twice, "ab" twice, "b" once
    assert stats.word_counts["a"] == 2
    assert stats.word_counts["ab"] == 2
    assert stats.word_counts["b"] == 1
    assert stats.char_counts["a"] == 5


def test_total_tokens():
    stats = build_training_stats([S(["a", "b"])] * 10)
    assert stats.total_word_tokens == 20
    assert stats.total_char_tokens == 20


def test_empty_training_rejected():
    with pytest.raises(ValidationError):
        build_training_stats([])


def test_stats_invariants(rng):
    stats = build_training_stats(random_corpus(rng, 30))
    for w, n in stats.word_counts.items():
        assert n == sum(c for (ww, _), c in stats.word_label_counts.items() if ww == w)
    for ch, n in stats.char_counts.items():
        assert n == sum(c for (cc, _), c in stats.char_label_counts.items() if cc == ch)


def test_psi_word_fig1():
    stats = fig1_stats()
    assert psi_word("图书馆", "BME", stats) == 0.7
    assert psi_word("图书馆", "BMM", stats) == 0.3


def test_psi_word_absent_and_full():
    stats = build_training_stats([S(["ab", "c"])] * 3)
    assert psi_word("zz", "BE", stats) == 0
    assert psi_word("ab", "BE", stats) == 1.0


def test_psi_char():
    # toy corpus: "x" is S four times and B once
    stats = build_training_stats([S(["x"])] * 4 + [S(["xy"])])
    assert psi_char("x", "S", stats) == pytest.approx(0.8, abs=0)
    assert psi_char("q", "S", stats) == 0
    assert psi_char("y", "E", stats) == 1.0


@given(st.integers(1, 20))
def test_psi_scale_invariant(k):
    base = [("ab", "BE")] * 3 + [("ab", "SS")] * 2 + [("c", "S")]
    s1 = TrainingStats.from_labeled_words(base)
    sk = TrainingStats.from_labeled_words(base * k)
    assert psi_word("ab", "BE", s1) == psi_word("ab", "BE", sk)
    assert psi_char("a", "S", s1) == psi_char("a", "S", sk)


def test_attribute_vector_fig1():
    sent = S(["图书馆", "在", "节假日", "会", "关闭"])
    stats = merge_training(fig1_stats(), build_training_stats([S(["在", "会"])]))
    span = extract_spans(sent, 0)[0]
    v = attribute_vector(span, sent, stats)
    # the sentence has 3+1+3+1+2 = 10 characters
    assert (v.wLen, v.sLen, v.wCon) == (3, 10, 0.7)


def test_attribute_vector_single_word_sentence():
    stats = build_training_stats([S(["ab"])])
    for word, expected in [("ab", 0.0), ("cd", 1.0)]:
        sent = S([word])
        v = attribute_vector(extract_spans(sent, 0)[0], sent, stats)
        assert v.wLen == v.sLen
        assert v.oDen == expected


def test_oden_hand_count():
    stats = build_training_stats([S(["a", "b", "c", "d"])])
    sent = S(["a", "b", "zz", "c", "d"])
    vals = {attribute_vector(sp, sent, stats).oDen for sp in extract_spans(sent, 0)}
    assert vals == {0.2}


def test_frequencies_are_relative():
    stats = build_training_stats([S(["ab", "c"]), S(["ab"])])
    sent = S(["ab"])
    v = attribute_vector(extract_spans(sent, 0)[0], sent, stats)
    assert v.wFre == pytest.approx(2 / 3)
    # chars a,b each 2 of 5 character tokens
    assert v.cFre == pytest.approx(0.4)
    assert v.cCon == 1.0


def test_slen_word_unit():
    stats = build_training_stats([S(["ab"])])
    sent = S(["ab", "c", "d"])
    v = attribute_vector(extract_spans(sent, 0)[0], sent, stats, slen_unit="word")
    assert v.sLen == 3


def test_ranges_and_wcon_iff_in_vocab(rng):
    train = random_corpus(rng, 40)
    test = random_corpus(rng, 40)
    stats = build_training_stats(train)
    for i, sent in enumerate(test):
        for sp in extract_spans(sent, i):
            v = attribute_vector(sp, sent, stats)
            for name in ("oDen", "wFre", "cFre", "wCon", "cCon"):
                assert 0 <= v[name] <= 1
            assert v.wLen <= v.sLen
            if v.wCon > 0:
                assert sp.text in stats.vocabulary


def test_adding_training_never_shrinks(rng):
    a = build_training_stats(random_corpus(rng, 10))
    b = merge_training(a, build_training_stats(random_corpus(rng, 3)))
    assert b.total_word_tokens >= a.total_word_tokens
    assert a.vocabulary <= b.vocabulary


def test_extractor_estimator_api(rng):
    train = random_corpus(rng, 20)
    test = random_corpus(rng, 5)
    est = AttributeExtractor(slen_unit="word")
    assert est.get_params() == {"slen_unit": "word"}
    X = clone(est).fit(train).transform(test)
    assert X.shape == (sum(len(s.bounds) for s in test), len(ATTRIBUTES))
    assert list(est.get_feature_names_out()) == list(ATTRIBUTES)
    X2 = est.fit_transform(train)
    assert np.all((X2[:, 2:] >= 0) & (X2[:, 2:] <= 1))


def test_extractor_unfitted():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        AttributeExtractor().transform([S(["a"])])


def test_extractor_bad_unit():
    with pytest.raises(ValidationError):
        AttributeExtractor(slen_unit="byte").fit([S(["a"])])


def test_merge_identity_and_commutative(rng):
    a = build_training_stats(random_corpus(rng, 5))
    b = build_training_stats(random_corpus(rng, 5))
    assert merge_training(a, TrainingStats()) == a
    assert merge_training(a, b) == merge_training(b, a)
    assert a + b == merge_training(a, b)


def test_label_mismatch_rejected():
    with pytest.raises(ValidationError):
        TrainingStats.from_labeled_words([("abc", "BE")])


def test_counter_types():
    stats = fig1_stats()
    assert isinstance(stats.word_label_counts, Counter)
    assert stats.word_counts["图书馆"] == 10
