"""``segdiag`` command line interface.

Exit status: 0 on success, 1 on validation errors (including bad flags),
2 on I/O errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .attributes import ATTRIBUTES, build_training_stats
from .baseline import FMMSegmenter
from .bucketing import (
    BucketSpec,
    BucketWarning,
    PerformanceTensor,
    build_tensor,
    corpus_f1,
    evaluate_buckets,
    make_specs,
    span_table,
)
from .corpus import corpus_spans, format_sentences, load_char_mapping, parse_segmented_file
from .crossdata import (
    build_cross_tensor,
    distance_edges,
    edge_list,
    psi_matrix,
    psi_u_correlation,
)
from .diagnosis import aided_diagnose, self_diagnose
from .exceptions import ValidationError
from .measures import dataset_wise, model_wise, normalize_radar
from .selection import STRATEGIES, select_order
from .stats import bucket_significance, friedman
from .workspace import SCHEMA_VERSION, Workspace, dumps, load_corpus_descriptor, read_json

logger = logging.getLogger("segdiag")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_buckets(raw: str) -> int:
    try:
        n = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {raw!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError(f"at least 2 buckets required, got {n}")
    return n


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path, mapping=None, report=None):
    return parse_segmented_file(path, mapping, report)


def _mapping(args):
    return load_char_mapping(args.map) if getattr(args, "map", None) else None


# -- attrs -------------------------------------------------------------------

def cmd_attrs(args) -> int:
    mapping = _mapping(args)
    train = _load(args.train, mapping)
    test = _load(args.test, mapping)
    stats = build_training_stats(train)
    table = span_table(test, stats, slen_unit=args.slen_unit)
    lines = ["\t".join(("sentence_index", "start", "end", "text") + ATTRIBUTES)]
    for span, a in zip(table.spans, table.attrs):
        lines.append(
            "\t".join(
                [str(span.sentence_index), str(span.start), str(span.end), span.text,
                 str(a.wLen), str(a.sLen)]
                + [f"{a[name]:.6f}" for name in ("oDen", "wFre", "cFre", "wCon", "cCon")]
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- eval ----------------------------------------------------------------------

def _spec_rows(spec: BucketSpec) -> list[dict]:
    return [
        {"label": label, "lo": lo, "hi": hi}
        for label, (lo, hi) in zip(spec.labels, spec.intervals())
    ]


def _attribute_block(attribute, spec, results) -> dict:
    return {
        "attribute": attribute,
        "bucket_specs": _spec_rows(spec),
        "cuts": list(spec.cuts),
        "observed_range": [spec.low, spec.high],
        "buckets": [r.to_dict() for r in results],
    }


def cmd_eval(args) -> int:
    mapping = _mapping(args)
    train = _load(args.train, mapping)
    gold = _load(args.gold, mapping)
    pred = _load(args.pred, mapping)
    stats = build_training_stats(train)
    attributes = list(ATTRIBUTES) if args.attribute == "all" else [args.attribute]
    gold_table = span_table(gold, stats, slen_unit=args.slen_unit)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BucketWarning)
        specs = make_specs(gold_table, attributes, args.buckets)
    results = evaluate_buckets(gold, pred, stats, specs, args.slen_unit, gold_table)
    p, r, f = corpus_f1(gold, pred)
    config = {
        "train": args.train,
        "gold": args.gold,
        "pred": args.pred,
        "attribute": args.attribute,
        "buckets": args.buckets,
        "slen_unit": args.slen_unit,
        "map": args.map,
        "model": args.model,
    }
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "model": args.model,
        "corpus": {"precision": p, "recall": r, "f1": f},
        "warnings": [str(w.message) for w in caught],
    }
    if len(attributes) == 1:
        report.update(_attribute_block(attributes[0], specs[attributes[0]], results[attributes[0]]))
    else:
        report["attributes"] = {
            a: _attribute_block(a, specs[a], results[a]) for a in attributes
        }
    _emit(dumps(report), args.report)
    return 0


# -- tensor --------------------------------------------------------------------

def cmd_tensor(args) -> int:
    ws = Workspace.load(args.workspace)
    corpus = ws.corpus(args.dataset)
    runs_cfg = [r for r in ws.runs if r["dataset"] == args.dataset]
    if not runs_cfg:
        raise ValidationError(f"workspace has no runs for dataset {args.dataset!r}")
    mapping = ws.mapping()
    stats = build_training_stats(corpus.train)
    runs = [
        (r["model"], corpus.test, parse_segmented_file(r["pred"], mapping), stats)
        for r in runs_cfg
    ]
    n_buckets = args.buckets or int(ws.options.get("buckets", 3))
    slen_unit = args.slen_unit or ws.options.get("slen_unit", "char")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BucketWarning)
        tensor = build_tensor(runs, n_buckets=n_buckets, slen_unit=slen_unit, dataset=args.dataset)
    out = tensor.to_dict()
    out.update(
        schema_version=SCHEMA_VERSION,
        config={"workspace": args.workspace, "dataset": args.dataset,
                "buckets": n_buckets, "slen_unit": slen_unit},
        warnings=[str(w.message) for w in caught],
    )
    _emit(dumps(out), args.out)
    return 0


# -- measures ------------------------------------------------------------------

def cmd_measures(args) -> int:
    tensors = {}
    for path in args.tensor:
        t = PerformanceTensor.from_dict(read_json(path))
        name = t.dataset or Path(path).stem
        if name in tensors:
            raise ValidationError(f"duplicate dataset {name!r} among tensors")
        tensors[name] = t
    datasets = {}
    for name, t in tensors.items():
        mw = model_wise(t)
        dw = dataset_wise(t, mw)
        datasets[name] = {
            "models": mw.models,
            "attributes": mw.attributes,
            "s_rho": mw.s_rho,
            "s_sigma": mw.s_sigma,
            "alpha_mu": dict(zip(dw.attributes, dw.alpha_mu)),
            "alpha_rho": {
                a: {"value": ar.value, "n_models": ar.n_models, "excluded": ar.excluded}
                for a, ar in zip(dw.attributes, dw.alpha_rho)
            },
        }
    radar = normalize_radar({d: v["alpha_mu"] for d, v in datasets.items()})
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": {"tensor": list(args.tensor), "significance": args.significance},
        "datasets": datasets,
        "radar": {"alpha_mu_normalized": radar,
                  "alpha_rho": {d: {a: v["value"] for a, v in x["alpha_rho"].items()}
                                for d, x in datasets.items()}},
        "averages": _averages(datasets),
    }
    if args.significance:
        sig = bucket_significance(tensors)
        report["significance"] = {
            "alpha": 0.05,
            "p_values": sig,
            "not_significant": {
                layout: {
                    k: sorted(a for a, p in cells.items() if p is not None and p >= 0.05)
                    for k, cells in table.items()
                }
                for layout, table in sig.items()
            },
        }
    _emit(dumps(report), args.out)
    return 0


def _averages(datasets: dict) -> dict:
    """Per (model, attribute) averages over datasets, both ways of treating undefined cells."""
    cells: dict[tuple[str, str], list] = {}
    sigmas: dict[tuple[str, str], list] = {}
    for d in datasets.values():
        for i, m in enumerate(d["models"]):
            for j, a in enumerate(d["attributes"]):
                cells.setdefault((m, a), []).append(d["s_rho"][i][j])
                sigmas.setdefault((m, a), []).append(d["s_sigma"][i][j])
    out: dict[str, dict] = {}
    for (m, a), vals in sorted(cells.items()):
        defined = [v for v in vals if v is not None]
        out.setdefault(m, {})[a] = {
            "s_rho_skip_undefined": float(np.mean(defined)) if defined else None,
            "s_rho_undefined_as_zero": float(np.mean([v or 0.0 for v in vals])),
            "s_rho_excluded": len(vals) - len(defined),
            "s_sigma": float(np.mean(sigmas[m, a])),
        }
    return out


# -- diagnose ------------------------------------------------------------------

def _run_slices(report: dict):
    if "attributes" in report:
        blocks = report["attributes"]
    elif "attribute" in report:
        blocks = {report["attribute"]: report}
    else:
        raise ValidationError("not an eval report: no attribute blocks")
    slices = {a: [b["f1"] for b in blk["buckets"]] for a, blk in blocks.items()}
    labels = {a: [b["label"] for b in blk["buckets"]] for a, blk in blocks.items()}
    specs = {a: blk["bucket_specs"] for a, blk in blocks.items()}
    return slices, labels, specs, report.get("corpus", {}).get("f1")


def cmd_diagnose(args) -> int:
    if bool(args.self) == bool(args.aided):
        raise UsageError("diagnose: give exactly one of --self or --aided")
    if args.self:
        slices, labels, _, f1 = _run_slices(read_json(args.self))
        diag = self_diagnose(slices, labels)
        report = {
            "schema_version": SCHEMA_VERSION,
            "config": {"self": args.self},
            "mode": "self",
            "corpus_f1": f1,
            "attributes": {a: d.to_dict() for a, d in diag.items()},
        }
        tsv = ["attribute\tbucket_label\tworst_f1\tgap"] + [
            f"{a}\t{d.worst_bucket_label}\t{d.worst_f1:.6f}\t{d.gap:.6f}" for a, d in diag.items()
        ]
    else:
        path_a, path_b = args.aided
        rep_a, rep_b = read_json(path_a), read_json(path_b)
        sa, la, spa, fa = _run_slices(rep_a)
        sb, _, spb, fb = _run_slices(rep_b)
        if spa != spb:
            raise ValidationError("runs were bucketed differently; aided diagnosis needs identical buckets")
        name_a = rep_a.get("model") or path_a
        name_b = rep_b.get("model") or path_b
        res = aided_diagnose(sa, sb, fa, fb, names=(name_a, name_b), labels=la)
        report = {
            "schema_version": SCHEMA_VERSION,
            "config": {"aided": list(args.aided)},
            "mode": "aided",
            "model_a": res.model_a,
            "model_b": res.model_b,
            "swapped": res.swapped,
            "attributes": {a: d.to_dict() for a, d in res.per_attribute.items()},
        }
        tsv = ["attribute\tbucket_label\tdelta\tmode"] + [
            f"{a}\t{d.bucket_label}\t{d.delta:.6f}\t{d.mode}" for a, d in res.per_attribute.items()
        ]
    if args.tsv:
        _emit("\n".join(tsv) + "\n", args.tsv)
    _emit(dumps(report), args.out)
    return 0


# -- cross ---------------------------------------------------------------------

def cmd_cross(args) -> int:
    ws = Workspace.load(args.workspace)
    mapping = ws.mapping()
    names = list(ws.datasets)
    corpora = {n: ws.corpus(n) for n in names}
    stats = {n: build_training_stats(c.train) for n, c in corpora.items()}
    spans = {n: corpus_spans(c.test) for n, c in corpora.items()}
    pm = psi_matrix(stats, spans, names)
    preds = {
        (r["source"], r["target"], r["model"]): parse_segmented_file(r["pred"], mapping)
        for r in ws.cross_runs
    }
    models = sorted({r["model"] for r in ws.cross_runs})
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": {"workspace": args.workspace},
        "datasets": names,
        "psi": pm.psi,
        "psi_x100": pm.psi * 100,
        "psi_edges": edge_list(distance_edges(pm.psi), names),
    }
    if preds:
        ct = build_cross_tensor({n: c.test for n, c in corpora.items()}, preds, models, names)
        report.update(
            models=models,
            u=ct.u,
            u_hat=ct.u_hat,
            coverage=ct.coverage,
            correlations={m: psi_u_correlation(pm, ct, m).to_dict() for m in models},
            u_edges=edge_list(distance_edges(ct.u_mean()), names),
        )
    _emit(dumps(report), args.out)
    return 0


# -- select --------------------------------------------------------------------

def cmd_select(args) -> int:
    mapping = _mapping(args)
    target = load_corpus_descriptor(args.target, mapping)
    sources = [load_corpus_descriptor(p, mapping) for p in args.sources]
    plan = select_order(target, sources, args.strategy, args.seed)
    report = plan.to_dict()
    report.update(
        schema_version=SCHEMA_VERSION,
        target=target.name,
        config={"target": args.target, "sources": list(args.sources),
                "strategy": args.strategy, "seed": args.seed},
    )
    _emit(dumps(report), args.out)
    return 0


# -- segment -------------------------------------------------------------------

def cmd_segment(args) -> int:
    mapping = _mapping(args)
    seg = FMMSegmenter().fit(_load(args.dict_from, mapping))
    with open(args.input, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{args.input}: invalid UTF-8 at byte offset {exc.start}") from None
    lines = [ln for ln in (l.rstrip("\r") for l in text.split("\n")) if ln.strip()]
    if mapping:
        table = str.maketrans(mapping)
        lines = [ln.translate(table) for ln in lines]
    _emit(format_sentences(seg.predict(lines)), args.out)
    return 0


# -- friedman ------------------------------------------------------------------

def _read_table(path: str) -> list[list[float]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            cells = line.rstrip("\r\n").split("\t")
            if not any(c.strip() for c in cells):
                continue
            rows.append(cells)
    if not rows:
        raise ValidationError(f"{path}: empty table")

    def numeric(c):
        try:
            float(c)
            return True
        except ValueError:
            return False

    if not all(numeric(c) for c in rows[0][1:]):
        rows = rows[1:]
    if rows and not numeric(rows[0][0]):
        rows = [r[1:] for r in rows]
    try:
        return [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def cmd_friedman(args) -> int:
    table = _read_table(args.table)
    widths = {len(r) for r in table}
    if len(widths) != 1:
        raise ValidationError(f"{args.table}: ragged table")
    res = friedman(table, exact=args.exact)
    report = res.to_dict()
    report.update(schema_version=SCHEMA_VERSION, config={"table": args.table, "exact": args.exact})
    _emit(dumps(report), args.out)
    return 0


# -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="segdiag", description="Fine-grained evaluation and diagnosis of word segmenters.")
    parser.add_argument("--version", action="version", version=f"segdiag {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("attrs", help="per-word attribute table (TSV) for a test file")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--map", help="two-column character mapping applied at load time")
    p.add_argument("--slen-unit", choices=("char", "word"), default="char")
    p.add_argument("--out")
    p.set_defaults(func=cmd_attrs)

    p = sub.add_parser("eval", help="bucketed span F1 of one prediction file")
    p.add_argument("--train", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--attribute", choices=ATTRIBUTES + ("all",), default="all")
    p.add_argument("--buckets", type=_positive_buckets, default=3)
    p.add_argument("--slen-unit", choices=("char", "word"), default="char")
    p.add_argument("--map")
    p.add_argument("--model", default=None, help="model name recorded in the report")
    p.add_argument("--report", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tensor", help="performance tensor of all runs of one workspace dataset")
    p.add_argument("--workspace", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--buckets", type=_positive_buckets)
    p.add_argument("--slen-unit", choices=("char", "word"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("measures", help="model-wise and dataset-wise measures from tensors")
    p.add_argument("--tensor", required=True, nargs="+", help="one tensor JSON per dataset")
    p.add_argument("--significance", action="store_true", help="attach Friedman p-values")
    p.add_argument("--out")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("diagnose", help="self- or aided-diagnosis of eval reports")
    p.add_argument("--self", metavar="RUN")
    p.add_argument("--aided", nargs=2, metavar=("RUN_A", "RUN_B"))
    p.add_argument("--tsv", help="bar-chart-ready TSV output")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("cross", help="cross-dataset tensor, Ψ matrix, correlations and edges")
    p.add_argument("--workspace", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cross)

    p = sub.add_parser("select", help="greedy source-dataset ordering")
    p.add_argument("--target", required=True)
    p.add_argument("--sources", required=True, nargs="+")
    p.add_argument("--strategy", choices=STRATEGIES, default="max")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--map")
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("segment", help="forward maximum-matching baseline segmenter")
    p.add_argument("--dict-from", required=True, help="segmented training file")
    p.add_argument("--input", required=True, help="raw text, one sentence per line")
    p.add_argument("--map")
    p.add_argument("--out")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("friedman", help="Friedman test on a TSV table (blocks as rows)")
    p.add_argument("--table", required=True)
    p.add_argument("--exact", action="store_true", help="also compute the permutation p-value (n*k <= 12)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_friedman)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
