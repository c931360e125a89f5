"""Workspace files and byte-stable report emission."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .corpus import Corpus, load_char_mapping, parse_segmented_file
from .exceptions import ValidationError

SCHEMA_VERSION = "1.0"


def to_jsonable(obj: Any) -> Any:
    """Replace NaN/inf with None and numpy scalars/arrays with Python values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path: str | os.PathLike, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path: str | os.PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None


@dataclass
class DatasetPaths:
    name: str
    train: Path | None = None
    test: Path | None = None
    dev: Path | None = None


@dataclass
class Workspace:
    """Datasets, in-dataset runs and cross-dataset runs read from a JSON file.

    Relative paths resolve against the workspace file's directory.
    """

    datasets: dict[str, DatasetPaths]
    runs: list[dict] = field(default_factory=list)
    cross_runs: list[dict] = field(default_factory=list)
    options: dict = field(default_factory=dict)
    path: Path | None = None

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Workspace":
        path = Path(path)
        raw = read_json(path)
        if not isinstance(raw, dict) or "datasets" not in raw:
            raise ValidationError(f"{path}: workspace needs a 'datasets' object")
        base = path.parent
        datasets = {}
        for name, d in raw["datasets"].items():
            datasets[name] = DatasetPaths(
                name,
                *(_resolve(base, d.get(k)) for k in ("train", "test", "dev")),
            )
        runs = [dict(r, pred=_resolve(base, r["pred"])) for r in raw.get("runs", [])]
        cross = [dict(r, pred=_resolve(base, r["pred"])) for r in raw.get("cross_runs", [])]
        options = dict(raw.get("options", {}))
        if options.get("map"):
            options["map"] = _resolve(base, options["map"])
        ws = cls(datasets, runs, cross, options, path)
        ws.validate()
        return ws

    def validate(self) -> None:
        for r in self.runs:
            if r.get("dataset") not in self.datasets:
                raise ValidationError(f"run {r} references an unknown dataset")
        for r in self.cross_runs:
            for key in ("source", "target"):
                if r.get(key) not in self.datasets:
                    raise ValidationError(f"cross run {r} references an unknown dataset")
        seen = set()
        for r in self.runs:
            key = (r["model"], r["dataset"])
            if key in seen:
                raise ValidationError(f"duplicate run {key}")
            seen.add(key)
        seen = set()
        for r in self.cross_runs:
            key = (r["source"], r["target"], r["model"])
            if key in seen:
                raise ValidationError(f"duplicate cross run {key}")
            seen.add(key)
        for p in self._paths():
            if not p.exists():
                raise FileNotFoundError(f"workspace path does not exist: {p}")

    def _paths(self):
        for d in self.datasets.values():
            yield from (p for p in (d.train, d.test, d.dev) if p is not None)
        for r in self.runs + self.cross_runs:
            yield r["pred"]
        if self.options.get("map"):
            yield self.options["map"]

    def mapping(self):
        m = self.options.get("map")
        return load_char_mapping(m) if m else None

    def corpus(self, name: str) -> Corpus:
        d = self.datasets[name]
        mapping = self.mapping()
        if d.train is None or d.test is None:
            raise ValidationError(f"dataset {name!r} needs train and test paths")
        return Corpus(
            name,
            tuple(parse_segmented_file(d.train, mapping)),
            tuple(parse_segmented_file(d.test, mapping)),
            tuple(parse_segmented_file(d.dev, mapping)) if d.dev else (),
        )


def _resolve(base: Path, p) -> Path | None:
    if p is None:
        return None
    p = Path(p)
    return p if p.is_absolute() else base / p


def load_corpus_descriptor(path: str | os.PathLike, mapping=None) -> Corpus:
    """A single corpus described by ``{"name", "train", "dev", "test"}`` JSON."""
    path = Path(path)
    raw = read_json(path)
    if "name" not in raw:
        raise ValidationError(f"{path}: corpus descriptor needs a 'name'")
    parts = {}
    for key in ("train", "dev", "test"):
        p = _resolve(path.parent, raw.get(key))
        parts[key] = tuple(parse_segmented_file(p, mapping)) if p else ()
    return Corpus(raw["name"], parts["train"], parts["test"], parts["dev"])
