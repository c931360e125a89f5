"""Self-diagnosis and aided-diagnosis over bucket F1 slices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .exceptions import ValidationError

A_LOSES = "A_loses"
A_BEST = "A_best"


@dataclass(frozen=True)
class SelfDiagnosis:
    attribute: str
    worst_bucket: int
    worst_bucket_label: str
    worst_f1: float
    best_f1: float

    @property
    def gap(self) -> float:
        return self.best_f1 - self.worst_f1

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "worst_bucket": self.worst_bucket,
            "worst_bucket_label": self.worst_bucket_label,
            "worst_f1": self.worst_f1,
            "best_f1": self.best_f1,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class AidedDiagnosis:
    attribute: str
    bucket: int
    bucket_label: str
    delta: float
    mode: str
    f1_a: float
    f1_b: float

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "bucket": self.bucket,
            "bucket_label": self.bucket_label,
            "delta": self.delta,
            "mode": self.mode,
            "f1_a": self.f1_a,
            "f1_b": self.f1_b,
        }


def _labels(n: int, labels: Sequence[str] | None) -> list[str]:
    if labels is None:
        return [str(i) for i in range(n)]
    if len(labels) != n:
        raise ValidationError("one label per bucket required")
    return list(labels)


def self_diagnose_slice(
    f1s: Sequence[float], attribute: str = "", labels: Sequence[str] | None = None
) -> SelfDiagnosis:
    if len(f1s) < 2:
        raise ValidationError(f"{attribute or 'slice'}: need at least two buckets")
    labels = _labels(len(f1s), labels)
    # min() keeps the first of equal values, i.e. the lower bucket index
    worst = min(range(len(f1s)), key=lambda k: f1s[k])
    return SelfDiagnosis(attribute, worst, labels[worst], float(f1s[worst]), float(max(f1s)))


def self_diagnose(
    slices: Mapping[str, Sequence[float]],
    labels: Mapping[str, Sequence[str]] | None = None,
) -> dict[str, SelfDiagnosis]:
    """Worst bucket per attribute; ``slices`` maps attribute -> bucket F1s."""
    labels = labels or {}
    return {a: self_diagnose_slice(f, a, labels.get(a)) for a, f in slices.items()}


def aided_diagnose_slice(
    f1_a: Sequence[float],
    f1_b: Sequence[float],
    attribute: str = "",
    labels: Sequence[str] | None = None,
) -> AidedDiagnosis:
    """Bucket where A trails B the most, else A's best bucket."""
    if len(f1_a) != len(f1_b):
        raise ValidationError(
            f"{attribute or 'slice'}: bucket count mismatch {len(f1_a)} vs {len(f1_b)}"
        )
    if not f1_a:
        raise ValidationError("empty slice")
    labels = _labels(len(f1_a), labels)
    deltas = [float(a) - float(b) for a, b in zip(f1_a, f1_b)]
    losing = [k for k, d in enumerate(deltas) if d < 0]
    if losing:
        k = min(losing, key=lambda i: deltas[i])
        mode = A_LOSES
    else:
        k = max(range(len(f1_a)), key=lambda i: (f1_a[i], -i))
        mode = A_BEST
    return AidedDiagnosis(attribute, k, labels[k], deltas[k], mode, float(f1_a[k]), float(f1_b[k]))


@dataclass
class AidedReport:
    model_a: str
    model_b: str
    swapped: bool
    per_attribute: dict[str, AidedDiagnosis]


def aided_diagnose(
    slices_a: Mapping[str, Sequence[float]],
    slices_b: Mapping[str, Sequence[float]],
    corpus_f1_a: float | None = None,
    corpus_f1_b: float | None = None,
    names: tuple[str, str] = ("A", "B"),
    labels: Mapping[str, Sequence[str]] | None = None,
) -> AidedReport:
    """Aided diagnosis of the stronger model against the weaker one.

    When corpus F1 values are given and A is weaker, the two models are
    swapped so that A always denotes the stronger one; ``swapped`` records it.
    """
    if set(slices_a) != set(slices_b):
        raise ValidationError("both models must cover the same attributes")
    swapped = (
        corpus_f1_a is not None and corpus_f1_b is not None and corpus_f1_a < corpus_f1_b
    )
    if swapped:
        slices_a, slices_b = slices_b, slices_a
        names = (names[1], names[0])
    labels = labels or {}
    per = {
        a: aided_diagnose_slice(slices_a[a], slices_b[a], a, labels.get(a)) for a in slices_a
    }
    return AidedReport(names[0], names[1], swapped, per)
