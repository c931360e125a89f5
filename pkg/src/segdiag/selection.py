"""Greedy ordering of source corpora for multi-source transfer."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .attributes import TrainingStats, build_training_stats, merge_training
from .corpus import Corpus, Span, corpus_spans
from .crossdata import psi
from .exceptions import ValidationError

STRATEGIES = ("max", "min", "rand")

Measure = Callable[[TrainingStats, Sequence[Span]], float]


@dataclass
class SelectionPlan:
    strategy: str
    seed: int | None
    sources: list[str]
    order: list[int]
    scores: list[float]
    candidates: list[dict[str, float]] = field(default_factory=list)

    @property
    def order_names(self) -> list[str]:
        return [self.sources[i] for i in self.order]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "sources": list(self.sources),
            "order": list(self.order),
            "order_names": self.order_names,
            "steps": [
                {"step": t, "chosen": self.sources[k], "score": s, "candidates": c}
                for t, (k, s, c) in enumerate(zip(self.order, self.scores, self.candidates))
            ],
        }


def select_order(
    target: Corpus,
    sources: Sequence[Corpus],
    strategy: str = "max",
    seed: int | None = None,
    measure: Measure = psi,
) -> SelectionPlan:
    """Decode a source order by repeatedly scoring ``pool + candidate`` against the target dev set.

    The pool starts as the target's training data. ``max`` picks the best
    scoring candidate, ``min`` the worst, ``rand`` a uniform choice from a
    generator seeded with ``seed``. Score ties go to the earlier source.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if not sources:
        raise ValidationError("no source corpora")
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate source names: {names}")
    if not target.dev:
        raise ValidationError(f"target {target.name!r} has an empty dev set")
    if strategy == "rand" and seed is None:
        seed = 0
    rng = random.Random(seed)
    dev_spans = corpus_spans(target.dev)
    pool = build_training_stats(target.train) if target.train else TrainingStats()
    source_stats = [build_training_stats(s.train) for s in sources]

    remaining = list(range(len(sources)))
    order: list[int] = []
    scores: list[float] = []
    tables: list[dict[str, float]] = []
    while remaining:
        table = {k: measure(merge_training(pool, source_stats[k]), dev_spans) for k in remaining}
        if strategy == "max":
            chosen = max(remaining, key=lambda k: (table[k], -k))
        elif strategy == "min":
            chosen = min(remaining, key=lambda k: (table[k], k))
        else:
            chosen = rng.choice(remaining)
        order.append(chosen)
        scores.append(table[chosen])
        tables.append({names[k]: v for k, v in table.items()})
        remaining.remove(chosen)
        pool = merge_training(pool, source_stats[chosen])
    return SelectionPlan(strategy, seed if strategy == "rand" else None, names, order, scores, tables)


__all__ = ["SelectionPlan", "select_order", "merge_training", "STRATEGIES"]
