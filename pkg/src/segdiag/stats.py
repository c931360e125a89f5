"""Rank machinery, the Friedman test and the chi-square tail."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Mapping

import numpy as np
from scipy import special
from scipy.stats import rankdata

from .exceptions import ValidationError
from .validation import check_matrix

if TYPE_CHECKING:
    from .bucketing import PerformanceTensor


def average_ranks(values) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    return rankdata(np.asarray(values, dtype=float), method="average")


def chi2_sf(x: float, dof: int) -> float:
    """Upper tail ``P(X >= x)`` of a chi-square variable with ``dof`` degrees of freedom."""
    if x < 0 or math.isnan(x):
        raise ValidationError(f"chi-square statistic must be >= 0, got {x}")
    if dof < 1:
        raise ValidationError(f"degrees of freedom must be >= 1, got {dof}")
    if x == 0:
        return 1.0
    if dof == 2:
        return math.exp(-x / 2)
    return float(special.gammaincc(dof / 2, x / 2))


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    dof: int
    p_value: float
    n_blocks: int
    k_treatments: int
    exact_p_value: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _friedman_q(ranks: np.ndarray, tie_term: float) -> float:
    n, k = ranks.shape
    return _q_from_rank_sums(ranks.sum(axis=0), n, k, tie_term)


def _q_from_rank_sums(rank_sums, n: int, k: int, tie_term: float) -> float:
    mean_ranks = np.asarray(rank_sums, dtype=float) / n
    q = 12.0 * n / (k * (k + 1)) * float(np.sum((mean_ranks - (k + 1) / 2.0) ** 2))
    correction = 1.0 - tie_term / (n * k * (k * k - 1))
    if correction <= 0:
        return 0.0
    return q / correction


def _tie_term(table: np.ndarray) -> float:
    total = 0.0
    for row in table:
        _, counts = np.unique(row, return_counts=True)
        total += float(np.sum(counts.astype(float) ** 3 - counts))
    return total


def friedman(table, exact: bool = False) -> FriedmanResult:
    """Friedman test on an ``n_blocks x k_treatments`` table.

    Ranks are computed within each block (row) with tie averaging and the
    statistic carries the usual tie correction. A table whose every row is
    constant gives ``Q = 0, p = 1``. With ``exact=True`` and ``n*k <= 12``
    the permutation p-value is attached as ``exact_p_value``.
    """
    arr = check_matrix(table, what="Friedman table")
    n, k = arr.shape
    ranks = np.vstack([average_ranks(row) for row in arr])
    ties = _tie_term(arr)
    q = _friedman_q(ranks, ties)
    p = chi2_sf(q, k - 1) if q > 0 else 1.0
    exact_p = exact_friedman_p(arr) if exact else None
    return FriedmanResult(q, k - 1, p, n, k, exact_p)


def exact_friedman_p(table, max_cells: int = 12) -> float:
    """Permutation p-value: fraction of within-block rank shuffles with ``Q >= Q_obs``.

    Every block's rank vector is permuted independently over all its
    distinct orderings. The first block is held fixed, which leaves the
    distribution of ``Q`` unchanged since ``Q`` is invariant to relabelling
    treatments.
    """
    arr = check_matrix(table, what="Friedman table")
    n, k = arr.shape
    if n * k > max_cells:
        raise ValidationError(f"exact test limited to n*k <= {max_cells}, got {n * k}")
    ranks = np.vstack([average_ranks(row) for row in arr])
    ties = _tie_term(arr)
    observed = _friedman_q(ranks, ties)
    orderings = [sorted(set(itertools.permutations(r.tolist()))) for r in ranks[1:]]
    sums0 = ranks[0]
    hits = 0
    total = 0
    eps = 1e-9 * max(1.0, observed)
    for combo in itertools.product(*orderings):
        rank_sums = sums0 + np.sum(combo, axis=0)
        q = _q_from_rank_sums(rank_sums, n, k, ties)
        total += 1
        if q >= observed - eps:
            hits += 1
    return hits / total


def bucket_significance(tensors: Mapping[str, "PerformanceTensor"]) -> dict:
    """Friedman p-values over bucket F1s, in two layouts.

    ``by_dataset[d][a]`` tests buckets as treatments with models as blocks;
    ``by_model[m][a]`` tests buckets as treatments with datasets as blocks.
    Cells that cannot be tested (fewer than two blocks or buckets, or
    datasets disagreeing on the bucket count) are None.
    """
    by_dataset: dict[str, dict[str, float | None]] = {}
    for d, t in tensors.items():
        by_dataset[d] = {}
        for a in t.attributes:
            rows = [t.slice(m, a) for m in t.models]
            by_dataset[d][a] = _p_or_none(rows)
    models = sorted({m for t in tensors.values() for m in t.models})
    attributes = sorted({a for t in tensors.values() for a in t.attributes})
    by_model: dict[str, dict[str, float | None]] = {}
    for m in models:
        by_model[m] = {}
        for a in attributes:
            rows = [t.slice(m, a) for t in tensors.values() if m in t.models and a in t.attributes]
            by_model[m][a] = _p_or_none(rows)
    return {"by_dataset": by_dataset, "by_model": by_model}


def _p_or_none(rows) -> float | None:
    if len(rows) < 2 or len({len(r) for r in rows}) != 1 or len(rows[0]) < 2:
        return None
    return friedman(np.vstack(rows)).p_value
