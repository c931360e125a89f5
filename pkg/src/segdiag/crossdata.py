"""Cross-dataset F1 tensor, criterion discrepancy and dataset distances."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._parallel import ordered_map
from .attributes import TrainingStats, psi_word
from .bucketing import corpus_f1
from .corpus import Sentence, Span
from .exceptions import ValidationError
from .measures import spearman


def psi(train_stats: TrainingStats, test_spans: Sequence[Span]) -> float:
    """Expected label consistency of test words against another corpus's training counts.

    Each distinct ``(word, labels)`` test type contributes its consistency
    weighted by its relative frequency among the test tokens, so the result
    lies in [0, 1].
    """
    if not test_spans:
        raise ValidationError("test set has no words")
    types = Counter((s.text, s.labels) for s in test_spans)
    total = len(test_spans)
    return math.fsum(psi_word(w, k, train_stats) * c for (w, k), c in types.items()) / total


@dataclass
class PsiMatrix:
    datasets: list[str]
    psi: np.ndarray  # [train_dataset, test_dataset]

    def to_dict(self) -> dict:
        return {
            "datasets": list(self.datasets),
            "psi": self.psi.tolist(),
            "psi_x100": (self.psi * 100).tolist(),
        }


def psi_matrix(
    train_stats: Mapping[str, TrainingStats],
    test_spans: Mapping[str, Sequence[Span]],
    datasets: Sequence[str] | None = None,
) -> PsiMatrix:
    datasets = list(datasets or train_stats)
    cells = [(a, b) for a in datasets for b in datasets]
    values = ordered_map(lambda ab: psi(train_stats[ab[0]], test_spans[ab[1]]), cells)
    n = len(datasets)
    return PsiMatrix(datasets, np.asarray(values, dtype=float).reshape(n, n))


def normalize_u(u: np.ndarray) -> np.ndarray:
    """Relative shortfall of each transfer against the in-domain score.

    ``u_hat[i, j, k] = (u[j, j, k] - u[i, j, k]) / u[j, j, k]``; NaN marks
    absent cells and columns whose in-domain score is missing or zero. The
    diagonal is exactly 0 wherever the in-domain score exists.
    """
    u = np.asarray(u, dtype=float)
    n_d = u.shape[0]
    if u.ndim != 3 or u.shape[1] != n_d:
        raise ValidationError(f"expected a [source, target, model] array, got shape {u.shape}")
    u_hat = np.full_like(u, np.nan)
    for j in range(n_d):
        in_domain = u[j, j, :]
        ok = np.isfinite(in_domain) & (in_domain > 0)
        for i in range(n_d):
            if i == j:
                u_hat[j, j, np.isfinite(in_domain)] = 0.0
                continue
            with np.errstate(invalid="ignore", divide="ignore"):
                col = (in_domain - u[i, j, :]) / in_domain
            u_hat[i, j, :] = np.where(ok, col, np.nan)
    return u_hat


@dataclass
class CrossTensor:
    datasets: list[str]
    models: list[str]
    u: np.ndarray  # [source, target, model]; NaN = absent

    @property
    def u_hat(self) -> np.ndarray:
        return normalize_u(self.u)

    @property
    def coverage(self) -> float:
        return float(np.isfinite(self.u).mean()) if self.u.size else 0.0

    def u_mean(self) -> np.ndarray:
        """Mean over models, ignoring absent cells; NaN where no model has a value."""
        out = np.full(self.u.shape[:2], np.nan)
        counts = np.isfinite(self.u).sum(axis=2)
        sums = np.where(np.isfinite(self.u), self.u, 0.0).sum(axis=2)
        np.divide(sums, counts, out=out, where=counts > 0)
        return out


def build_cross_tensor(
    test_sets: Mapping[str, Sequence[Sentence]],
    predictions: Mapping[tuple[str, str, str], Sequence[Sentence]],
    models: Sequence[str] | None = None,
    datasets: Sequence[str] | None = None,
) -> CrossTensor:
    """Fill ``u[source, target, model]`` with corpus F1 of each prediction.

    ``predictions`` is keyed by ``(source, target, model)``; cells without a
    prediction stay absent (NaN).
    """
    datasets = list(datasets or test_sets)
    if models is None:
        models = sorted({k[2] for k in predictions})
    models = list(models)
    index_d = {d: i for i, d in enumerate(datasets)}
    index_m = {m: i for i, m in enumerate(models)}
    for src, tgt, model in predictions:
        if src not in index_d or tgt not in index_d:
            raise ValidationError(f"unknown dataset in cross run {(src, tgt, model)}")
        if model not in index_m:
            raise ValidationError(f"unknown model in cross run {(src, tgt, model)}")
    u = np.full((len(datasets), len(datasets), len(models)), np.nan)
    keys = sorted(predictions)
    scores = ordered_map(lambda k: corpus_f1(test_sets[k[1]], predictions[k])[2], keys)
    for (src, tgt, model), f in zip(keys, scores):
        u[index_d[src], index_d[tgt], index_m[model]] = f
    return CrossTensor(datasets, models, u)


@dataclass
class PsiUCorrelation:
    model: str
    per_target: dict[str, float | None]
    pooled: float | None
    pooled_pairs: int

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "per_target": dict(self.per_target),
            "pooled": self.pooled,
            "pooled_pairs": self.pooled_pairs,
        }


def _safe_spearman(x: list[float], y: list[float]) -> float | None:
    if len(x) < 2:
        return None
    return spearman(x, y)


def psi_u_correlation(pm: PsiMatrix, ct: CrossTensor, model: str) -> PsiUCorrelation:
    """Spearman between criterion discrepancy and cross-dataset F1 for one model.

    Per target dataset the correlation runs over all sources; the pooled
    coefficient uses every off-diagonal pair. Absent cells are dropped
    pairwise; fewer than two pairs gives None.
    """
    if list(pm.datasets) != list(ct.datasets):
        raise ValidationError("Ψ matrix and cross tensor must share the dataset axis")
    k = ct.models.index(model)
    n = len(ct.datasets)
    per_target: dict[str, float | None] = {}
    for j, name in enumerate(ct.datasets):
        pairs = [
            (pm.psi[i, j], ct.u[i, j, k])
            for i in range(n)
            if np.isfinite(pm.psi[i, j]) and np.isfinite(ct.u[i, j, k])
        ]
        per_target[name] = _safe_spearman([p for p, _ in pairs], [q for _, q in pairs])
    pooled = [
        (pm.psi[i, j], ct.u[i, j, k])
        for i in range(n)
        for j in range(n)
        if i != j and np.isfinite(pm.psi[i, j]) and np.isfinite(ct.u[i, j, k])
    ]
    rho = _safe_spearman([p for p, _ in pooled], [q for _, q in pooled])
    return PsiUCorrelation(model, per_target, rho, len(pooled))


def distance_edges(z) -> np.ndarray:
    """Symmetric edge weights ``W[i, j] = Z[i, j] / Z[j, j] + Z[j, i] / Z[i, i]``.

    Rows and columns with a zero (or missing) diagonal entry are NaN.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {z.shape}")
    diag = np.diag(z).copy()
    bad = ~np.isfinite(diag) | (diag == 0)
    safe = np.where(bad, np.nan, diag)
    ratio = z / safe[None, :]
    w = ratio + ratio.T
    w[bad, :] = np.nan
    w[:, bad] = np.nan
    return w


def edge_list(w: np.ndarray, names: Sequence[str]) -> list[dict]:
    out = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            weight = w[i, j]
            out.append(
                {"a": names[i], "b": names[j], "weight": float(weight) if np.isfinite(weight) else None}
            )
    return out
