import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from segdiag.attributes import AttributeVector
from segdiag.bucketing import BucketResult, BucketSpec, PerformanceTensor
from segdiag.measures import (
    ModelWiseTable,
    alpha_mu,
    alpha_rho,
    model_wise,
    normalize_radar,
    slice_measures,
    spearman,
)


def tie_avg_ranks(xs):
    """Rank by counting: rank = #smaller + (#equal + 1) / 2."""
    return [sum(y < x for y in xs) + (sum(y == x for y in xs) + 1) / 2 for x in xs]


def spearman_oracle(x, y):
    rx, ry = tie_avg_ranks(x), tie_avg_ranks(y)
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def test_spearman_simple():
    assert spearman([1, 2, 3], [10, 20, 30]) == 1.0
    assert spearman([1, 2, 3], [3, 2, 1]) == -1.0


def test_spearman_ties_oracle():
    x, y = [1, 2, 2, 4], [1, 3, 2, 4]
    assert spearman(x, y) == pytest.approx(spearman_oracle(x, y), abs=1e-12)
    # ranks x = [1, 2.5, 2.5, 4], y = [1, 3, 2, 4]: rho = 4.5 / sqrt(4.5 * 5)
    assert spearman(x, y) == pytest.approx(4.5 / math.sqrt(4.5 * 5), abs=1e-12)


def test_spearman_undefined_for_constant():
    assert spearman([1, 1, 1], [1, 2, 3]) is None
    assert spearman([1, 2, 3], [5, 5, 5]) is None


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=12))
def test_spearman_monotone_invariance(xi):
    # a coarse grid keeps exp() injective in floating point
    x = [v / 10 for v in xi]
    y = list(range(len(x)))
    r1 = spearman(x, y)
    r2 = spearman([math.exp(v) for v in x], y)
    if r1 is None:
        assert r2 is None
    else:
        assert r2 == pytest.approx(r1, abs=1e-12)


def test_slice_measures():
    r, s = slice_measures([0.9, 0.95, 1.0])
    assert r == 1.0
    r, s = slice_measures([0.7, 0.7, 0.7])
    assert r is None and s == 0.0
    f = [0.98, 0.95, 0.85]
    r, s = slice_measures(f)
    mean = sum(f) / 3
    assert r == -1.0
    assert s == pytest.approx(math.sqrt(sum((v - mean) ** 2 for v in f) / 3), abs=1e-15)


def test_reversing_buckets_flips_rho():
    rng = random.Random(1)
    for _ in range(50):
        f = [rng.random() for _ in range(4)]
        r, s = slice_measures(f)
        r2, s2 = slice_measures(f[::-1])
        assert r2 == pytest.approx(-r)
        assert s2 == pytest.approx(s)


def _tensor(slices: dict) -> PerformanceTensor:
    """Build a tensor whose bucket F1s equal the given values exactly (gold=pred=match)."""
    models = list(slices)
    attrs = list(next(iter(slices.values())))
    results = {}
    for m, per in slices.items():
        results[m] = {}
        for a, f1s in per.items():
            rows = []
            for k, f in enumerate(f1s):
                # precision = recall = f with denominators of 10**6
                n = 10**6
                rows.append(BucketResult(k, str(k), n, n, round(f * n)))
            results[m][a] = rows
    specs = {a: BucketSpec(a, tuple(range(1, len(slices[models[0]][a]))), 0, 9) for a in attrs}
    return PerformanceTensor(models, attrs, specs, results, {m: (1, 1, 1) for m in models},
                             {a: 1.0 for a in attrs})


def test_model_wise_on_tensor():
    t = _tensor({"m1": {"wLen": [0.98, 0.95, 0.85], "wCon": [0.8, 0.9, 0.99]},
                 "m2": {"wLen": [0.9, 0.9, 0.9], "wCon": [0.9, 0.95, 0.97]}})
    mw = model_wise(t)
    assert mw.rho("m1", "wLen") == -1.0
    assert mw.rho("m1", "wCon") == 1.0
    assert mw.rho("m2", "wLen") is None
    assert mw.sigma("m2", "wLen") == 0.0
    ar = alpha_rho(mw, "wLen")
    assert ar.value == 1.0 and ar.excluded == 1


def test_alpha_mu():
    vecs = [AttributeVector(n, 5, 0.0, 0.1, 0.1, c, 0.5) for n, c in [(1, 0.2), (2, 0.4), (3, 0.9)]]
    assert alpha_mu(vecs, "wLen") == 2.0
    assert alpha_mu(vecs, "oDen") == 0.0
    assert alpha_mu(vecs, "wCon") == pytest.approx((0.2 + 0.4 + 0.9) / 3)


def test_alpha_rho_cases():
    mw = ModelWiseTable(["a", "b"], ["x"], [[0.9], [-0.9]], [[0.1], [0.1]])
    assert alpha_rho(mw, "x").value == pytest.approx(0.9)
    mw = ModelWiseTable(["a"], ["x"], [[1.0]], [[0.1]])
    assert alpha_rho(mw, "x").value == 1.0
    vals = [0.5, -0.25, 0.75]
    mw = ModelWiseTable(["a", "b", "c"], ["x"], [[v] for v in vals], [[0]] * 3)
    assert alpha_rho(mw, "x").value == pytest.approx(sum(abs(v) for v in vals) / 3)
    mw = ModelWiseTable(["a"], ["x"], [[None]], [[0]])
    assert alpha_rho(mw, "x").value is None


@given(st.lists(st.lists(st.floats(0, 1), min_size=3, max_size=3), min_size=1, max_size=5))
def test_alpha_rho_bounded(slices):
    t = _tensor({f"m{i}": {"a": s} for i, s in enumerate(slices)})
    ar = alpha_rho(model_wise(t), "a")
    if ar.value is not None:
        assert 0 <= ar.value <= 1
        strictly_monotone = all(
            (np.diff(t.slice(m, "a")) > 0).all() or (np.diff(t.slice(m, "a")) < 0).all()
            for m in t.models
        )
        assert (ar.value == pytest.approx(1.0)) == (strictly_monotone and ar.excluded == 0)


def test_normalize_radar():
    out = normalize_radar({"d1": {"wLen": 1.5, "oDen": 0.1}, "d2": {"wLen": 2.0, "oDen": 0.0},
                           "d3": {"wLen": 1.0, "oDen": 0.05}})
    wl = [out[d]["wLen"] for d in ("d1", "d2", "d3")]
    assert all(0 < v <= 1 for v in wl) and max(wl) == 1.0
    assert out["d1"]["oDen"] == 1.0 and out["d2"]["oDen"] == 0.0
    assert normalize_radar({"a": {"x": 0.0}})["a"]["x"] is None
