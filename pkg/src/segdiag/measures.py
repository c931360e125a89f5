"""Model-wise and dataset-wise measures over a performance tensor."""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .attributes import AttributeVector
from .bucketing import PerformanceTensor
from .exceptions import ValidationError
from .stats import average_ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Spearman rank correlation with tie-averaged ranks.

    Returns None when either input is constant, where the coefficient is
    undefined.
    """
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValidationError("spearman needs at least two points")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        return None
    rho = float(np.dot(dx, dy)) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, rho)))


@dataclass
class ModelWiseTable:
    models: list[str]
    attributes: list[str]
    s_rho: list[list[float | None]]
    s_sigma: list[list[float]]

    def rho(self, model: str, attribute: str) -> float | None:
        return self.s_rho[self.models.index(model)][self.attributes.index(attribute)]

    def sigma(self, model: str, attribute: str) -> float:
        return self.s_sigma[self.models.index(model)][self.attributes.index(attribute)]


def slice_measures(f1s: Sequence[float]) -> tuple[float | None, float]:
    """``(spearman against bucket order, population std)`` of one bucket slice."""
    if len(f1s) < 2:
        raise ValidationError("a slice needs at least two buckets")
    order = np.arange(1, len(f1s) + 1)
    return spearman(f1s, order), statistics.pstdev(float(v) for v in f1s)


def model_wise(tensor: PerformanceTensor) -> ModelWiseTable:
    rho: list[list[float | None]] = []
    sigma: list[list[float]] = []
    for m in tensor.models:
        row_r, row_s = [], []
        for a in tensor.attributes:
            f1s = tensor.slice(m, a)
            # a collapsed single-bucket attribute has no rank structure
            r, s = slice_measures(f1s) if len(f1s) >= 2 else (None, 0.0)
            row_r.append(r)
            row_s.append(s)
        rho.append(row_r)
        sigma.append(row_s)
    return ModelWiseTable(list(tensor.models), list(tensor.attributes), rho, sigma)


def alpha_mu(attrs: Sequence[AttributeVector], attribute: str) -> float:
    if not attrs:
        raise ValidationError("no attribute vectors")
    return float(np.mean([a[attribute] for a in attrs]))


@dataclass(frozen=True)
class AlphaRho:
    value: float | None
    n_models: int
    excluded: int


def alpha_rho(mw: ModelWiseTable, attribute: str) -> AlphaRho:
    """Mean absolute Spearman over models; undefined cells are excluded and counted."""
    j = mw.attributes.index(attribute)
    cells = [row[j] for row in mw.s_rho]
    defined = [abs(c) for c in cells if c is not None]
    value = float(np.mean(defined)) if defined else None
    return AlphaRho(value, len(defined), len(cells) - len(defined))


@dataclass
class DatasetWiseTable:
    attributes: list[str]
    alpha_mu: list[float]
    alpha_rho: list[AlphaRho] = field(default_factory=list)


def dataset_wise(tensor: PerformanceTensor, mw: ModelWiseTable | None = None) -> DatasetWiseTable:
    mw = model_wise(tensor) if mw is None else mw
    return DatasetWiseTable(
        list(tensor.attributes),
        [tensor.attribute_means[a] for a in tensor.attributes],
        [alpha_rho(mw, a) for a in tensor.attributes],
    )


def normalize_radar(alpha_mus: Mapping[str, Mapping[str, float]]) -> dict[str, dict[str, float | None]]:
    """Divide each attribute's mean by its maximum over datasets.

    ``alpha_mus`` maps dataset -> attribute -> mean. An attribute whose
    maximum is not positive cannot be normalised and maps to None.
    """
    attrs = sorted({a for per in alpha_mus.values() for a in per})
    out: dict[str, dict[str, float | None]] = {d: {} for d in alpha_mus}
    for a in attrs:
        top = max(per[a] for per in alpha_mus.values() if a in per)
        for d, per in alpha_mus.items():
            if a in per:
                out[d][a] = per[a] / top if top > 0 else None
    return out
