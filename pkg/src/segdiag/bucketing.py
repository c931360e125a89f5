"""Attribute buckets, bucket-level span F1 and the performance tensor."""
from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._parallel import ordered_map
from .attributes import (
    ATTRIBUTES,
    INTEGER_ATTRIBUTES,
    AttributeVector,
    TrainingStats,
    attribute_vector,
)
from .corpus import Sentence, Span, corpus_spans, extract_spans
from .exceptions import ValidationError
from .validation import check_aligned, check_n_buckets, check_sentences


class BucketWarning(UserWarning):
    pass


def bucket_labels(n: int) -> list[str]:
    if n == 1:
        return ["all"]
    if n == 2:
        return ["S", "L"]
    if n == 3:
        return ["S", "M", "L"]
    return [f"b{i + 1}" for i in range(n)]


@dataclass(frozen=True)
class BucketSpec:
    """Left-closed intervals over one attribute.

    ``cuts`` are the interior cut points. Bucket ``k`` is ``[cuts[k-1], cuts[k])``;
    the first bucket extends down to -inf and the last up to +inf when
    assigning values, and ``low``/``high`` record the observed gold range.
    """

    attribute: str
    cuts: tuple[float, ...]
    low: float
    high: float
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValidationError(f"cut points must be strictly ascending: {self.cuts}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(bucket_labels(self.n_buckets)))
        if len(self.labels) != self.n_buckets:
            raise ValidationError("one label per bucket required")

    @property
    def n_buckets(self) -> int:
        return len(self.cuts) + 1

    def assign(self, value: float) -> int:
        return bisect.bisect_right(self.cuts, value)

    def intervals(self) -> list[tuple[float, float | None]]:
        """``(lo, hi)`` per bucket; ``hi`` of the last bucket is None (unbounded)."""
        los = (self.low,) + self.cuts
        his = self.cuts + (None,)
        return list(zip(los, his))

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "cuts": list(self.cuts),
            "low": self.low,
            "high": self.high,
            "labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BucketSpec":
        return cls(d["attribute"], tuple(d["cuts"]), d["low"], d["high"], tuple(d["labels"]))


def make_buckets(values: Sequence[float], n_buckets: int, attribute: str) -> BucketSpec:
    """Equal-mass buckets from the sorted attribute values.

    Cut points are taken from the data itself, so every bucket is non-empty
    on ``values`` and integer attributes get integer cuts. Repeated cut
    points collapse (the empty bucket merges into its left neighbour); if
    fewer buckets than requested remain a :class:`BucketWarning` is issued.
    """
    check_n_buckets(n_buckets)
    if len(values) == 0:
        raise ValidationError("cannot bucket an empty list of values")
    ordered = sorted(values)
    n = len(ordered)
    lowest = ordered[0]
    cuts: list[float] = []
    for q in range(1, n_buckets):
        cut = ordered[(q * n) // n_buckets]
        if attribute in INTEGER_ATTRIBUTES:
            cut = math.ceil(cut)
        if cut > lowest and (not cuts or cut > cuts[-1]):
            cuts.append(cut)
    if len(cuts) + 1 < n_buckets:
        warnings.warn(
            f"{attribute}: only {len(cuts) + 1} of {n_buckets} buckets are distinguishable",
            BucketWarning,
            stacklevel=2,
        )
    if attribute in INTEGER_ATTRIBUTES:
        cuts = [int(c) for c in cuts]
    return BucketSpec(attribute, tuple(cuts), lowest, ordered[-1])


class QuantileBucketizer(TransformerMixin, BaseEstimator):
    """Learn equal-mass buckets for one attribute and map values to bucket ids.

    Parameters
    ----------
    n_buckets : int, default=3
    attribute : str, default="wLen"
    """

    def __init__(self, n_buckets: int = 3, attribute: str = "wLen"):
        self.n_buckets = n_buckets
        self.attribute = attribute

    def fit(self, X, y=None):
        values = np.asarray(X, dtype=float).ravel()
        with warnings.catch_warnings():
            warnings.simplefilter("always", BucketWarning)
            self.spec_ = make_buckets(values.tolist(), self.n_buckets, self.attribute)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "spec_")
        values = np.asarray(X, dtype=float).ravel()
        return np.searchsorted(np.asarray(self.spec_.cuts, dtype=float), values, side="right")


@dataclass
class BucketResult:
    bucket_index: int
    label: str
    gold_count: int = 0
    pred_count: int = 0
    match_count: int = 0

    @property
    def precision(self) -> float:
        return self.match_count / self.pred_count if self.pred_count else 0.0

    @property
    def recall(self) -> float:
        return self.match_count / self.gold_count if self.gold_count else 0.0

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "gold_count": self.gold_count,
            "pred_count": self.pred_count,
            "match_count": self.match_count,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def bucket_f1(
    gold_spans: Sequence[Span],
    gold_values: Sequence[float],
    pred_spans: Sequence[Span],
    pred_values: Sequence[float],
    spec: BucketSpec,
) -> list[BucketResult]:
    """Span precision/recall/F1 inside each bucket of ``spec``.

    Gold spans are bucketed by their own attribute value (recall side),
    predicted spans by theirs (precision side). A match is an exact
    ``(sentence, start, end)`` identity and is credited to the gold span's
    bucket.
    """
    if len(gold_spans) != len(gold_values) or len(pred_spans) != len(pred_values):
        raise ValidationError("one attribute value per span required")
    results = [BucketResult(k, spec.labels[k]) for k in range(spec.n_buckets)]
    gold_bucket = {}
    for span, value in zip(gold_spans, gold_values):
        k = spec.assign(value)
        results[k].gold_count += 1
        gold_bucket[span.key] = k
    for span, value in zip(pred_spans, pred_values):
        results[spec.assign(value)].pred_count += 1
        if span.key in gold_bucket:
            results[gold_bucket[span.key]].match_count += 1
    return results


def _match_count(gold: Sequence[Sentence], pred: Sequence[Sentence]) -> tuple[int, int, int]:
    g = {s.key for s in corpus_spans(gold)}
    p = {s.key for s in corpus_spans(pred)}
    return len(g), len(p), len(g & p)


def corpus_f1(gold: Sequence[Sentence], pred: Sequence[Sentence]) -> tuple[float, float, float]:
    """Corpus-level span precision, recall and F1."""
    check_sentences(gold, "gold")
    check_aligned(gold, pred)
    n_gold, n_pred, n_match = _match_count(gold, pred)
    p = n_match / n_pred if n_pred else 0.0
    r = n_match / n_gold if n_gold else 0.0
    return p, r, f1_score(p, r)


@dataclass
class SpanTable:
    """Spans of one segmentation with their attribute vectors."""

    spans: list[Span]
    attrs: list[AttributeVector]

    def values(self, attribute: str) -> list[float]:
        return [a[attribute] for a in self.attrs]


def span_table(
    sentences: Sequence[Sentence],
    stats: TrainingStats,
    reference: Sequence[Sentence] | None = None,
    slen_unit: str = "char",
) -> SpanTable:
    """Spans and attributes; ``reference`` gives gold sentences for predictions."""
    reference = sentences if reference is None else reference
    spans: list[Span] = []
    attrs: list[AttributeVector] = []
    for i, (sent, ref) in enumerate(zip(sentences, reference)):
        for span in extract_spans(sent, i):
            spans.append(span)
            attrs.append(attribute_vector(span, ref, stats, slen_unit))
    return SpanTable(spans, attrs)


def make_specs(
    gold_table: SpanTable,
    attributes: Sequence[str] = ATTRIBUTES,
    n_buckets: int = 3,
) -> dict[str, BucketSpec]:
    return {a: make_buckets(gold_table.values(a), n_buckets, a) for a in attributes}


def evaluate_buckets(
    gold: Sequence[Sentence],
    pred: Sequence[Sentence],
    stats: TrainingStats,
    specs: dict[str, BucketSpec],
    slen_unit: str = "char",
    gold_table: SpanTable | None = None,
) -> dict[str, list[BucketResult]]:
    check_sentences(gold, "gold")
    check_aligned(gold, pred)
    if gold_table is None:
        gold_table = span_table(gold, stats, slen_unit=slen_unit)
    pred_table = span_table(pred, stats, reference=gold, slen_unit=slen_unit)
    return {
        a: bucket_f1(
            gold_table.spans, gold_table.values(a),
            pred_table.spans, pred_table.values(a),
            spec,
        )
        for a, spec in specs.items()
    }


@dataclass
class PerformanceTensor:
    """Bucket F1 indexed ``[model][attribute][bucket]``."""

    models: list[str]
    attributes: list[str]
    specs: dict[str, BucketSpec]
    results: dict[str, dict[str, list[BucketResult]]]
    corpus: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    attribute_means: dict[str, float] = field(default_factory=dict)
    dataset: str = ""

    def slice(self, model: str, attribute: str) -> np.ndarray:
        return np.array([r.f1 for r in self.results[model][attribute]])

    @property
    def values(self) -> list[list[list[float]]]:
        return [[self.slice(m, a).tolist() for a in self.attributes] for m in self.models]

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "models": list(self.models),
            "attributes": list(self.attributes),
            "bucket_specs": {a: self.specs[a].to_dict() for a in self.attributes},
            "values": self.values,
            "buckets": {
                m: {a: [r.to_dict() for r in self.results[m][a]] for a in self.attributes}
                for m in self.models
            },
            "corpus": {
                m: dict(zip(("precision", "recall", "f1"), self.corpus[m])) for m in self.models
            },
            "attribute_means": {a: self.attribute_means[a] for a in self.attributes},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PerformanceTensor":
        results = {}
        for m, per_attr in d["buckets"].items():
            results[m] = {
                a: [
                    BucketResult(k, b["label"], b["gold_count"], b["pred_count"], b["match_count"])
                    for k, b in enumerate(rows)
                ]
                for a, rows in per_attr.items()
            }
        return cls(
            models=list(d["models"]),
            attributes=list(d["attributes"]),
            specs={a: BucketSpec.from_dict(s) for a, s in d["bucket_specs"].items()},
            results=results,
            corpus={m: (c["precision"], c["recall"], c["f1"]) for m, c in d["corpus"].items()},
            attribute_means=dict(d.get("attribute_means", {})),
            dataset=d.get("dataset", ""),
        )


def build_tensor(
    runs: Sequence[tuple[str, Sequence[Sentence], Sequence[Sentence], TrainingStats]],
    specs: dict[str, BucketSpec] | None = None,
    attributes: Sequence[str] = ATTRIBUTES,
    n_buckets: int = 3,
    slen_unit: str = "char",
    dataset: str = "",
) -> PerformanceTensor:
    """Evaluate every run on shared buckets computed once from gold attributes."""
    if not runs:
        raise ValidationError("no runs given")
    names = [r[0] for r in runs]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate model names: {names}")
    _, gold, _, stats = runs[0]
    for name, g, _, s in runs[1:]:
        if list(g) != list(gold):
            raise ValidationError(f"run {name!r} uses a different gold test set")
        if s is not stats and s != stats:
            raise ValidationError(f"run {name!r} uses different training statistics")
    check_sentences(gold, "gold")
    gold_table = span_table(gold, stats, slen_unit=slen_unit)
    if specs is None:
        specs = make_specs(gold_table, attributes, n_buckets)
    attributes = [a for a in attributes if a in specs]

    def run_one(run):
        _, g, pred, _ = run
        return (
            evaluate_buckets(g, pred, stats, specs, slen_unit, gold_table),
            corpus_f1(g, pred),
        )

    evaluated = ordered_map(run_one, runs)
    return PerformanceTensor(
        models=names,
        attributes=list(attributes),
        specs=dict(specs),
        results={n: e[0] for n, e in zip(names, evaluated)},
        corpus={n: e[1] for n, e in zip(names, evaluated)},
        attribute_means={a: float(np.mean(gold_table.values(a))) for a in attributes},
        dataset=dataset,
    )
