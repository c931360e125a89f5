import random

import pytest

from segdiag.corpus import Sentence

ALPHABET = "abcdefgh"


def random_sentence(rng: random.Random, max_words: int = 6, max_len: int = 3) -> Sentence:
    n = rng.randint(1, max_words)
    return Sentence.from_words(
        "".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, max_len))) for _ in range(n)
    )


def random_corpus(rng: random.Random, n_sentences: int) -> list[Sentence]:
    return [random_sentence(rng) for _ in range(n_sentences)]


def resegment(rng: random.Random, sent: Sentence, p_cut: float = 0.4) -> Sentence:
    """A random segmentation of the same characters (a toy 'prediction')."""
    bounds = []
    start = 0
    for i in range(1, len(sent.chars)):
        if rng.random() < p_cut:
            bounds.append((start, i))
            start = i
    bounds.append((start, len(sent.chars)))
    return Sentence(sent.chars, tuple(bounds))


def perturb(rng: random.Random, gold: list[Sentence], keep: float = 0.6) -> list[Sentence]:
    return [s if rng.random() < keep else resegment(rng, s) for s in gold]


@pytest.fixture
def rng():
    return random.Random(12345)


# acceptance criteria register their outcome here; printed after the run
ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{status:<4} {name}: {detail}")
