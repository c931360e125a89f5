"""Input validation helpers shared by the estimators and scorers."""
from __future__ import annotations

from typing import Sequence

from .exceptions import NotAlignedError, ValidationError


def check_sentences(sentences, what: str = "corpus", allow_empty: bool = False):
    from .corpus import Sentence

    if not allow_empty and len(sentences) == 0:
        raise ValidationError(f"{what} is empty")
    for s in sentences:
        if not isinstance(s, Sentence):
            raise ValidationError(f"{what} must contain Sentence objects, got {type(s).__name__}")
    return sentences


def check_aligned(gold: Sequence, pred: Sequence) -> None:
    """Gold and predicted corpora must cover the same character strings."""
    if len(gold) != len(pred):
        raise NotAlignedError(
            f"sentence count mismatch: {len(gold)} gold vs {len(pred)} predicted"
        )
    for i, (g, p) in enumerate(zip(gold, pred)):
        if g.chars != p.chars:
            raise NotAlignedError(f"sentence {i}: predicted characters differ from gold")


def check_n_buckets(n_buckets: int) -> int:
    if isinstance(n_buckets, bool) or not isinstance(n_buckets, int) or n_buckets < 2:
        raise ValidationError(f"number of buckets must be an integer >= 2, got {n_buckets!r}")
    return n_buckets


def check_matrix(table, min_rows: int = 2, min_cols: int = 2, what: str = "table"):
    import numpy as np

    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"{what} must be two-dimensional")
    if arr.shape[0] < min_rows or arr.shape[1] < min_cols:
        raise ValidationError(
            f"{what} needs at least {min_rows}x{min_cols} cells, got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} has missing or non-finite cells")
    return arr
