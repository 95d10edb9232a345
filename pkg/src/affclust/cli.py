"""Command-line front end.

Subcommands: cluster, evaluate, histogram, sweep-bins, bench. All outputs
are deterministic: repeated runs on identical inputs produce byte-identical
bytes. Stage timings therefore go to stderr unless --timings explicitly
embeds them. Exit codes: 0 success, 2 input or configuration error,
3 degenerate data.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .data import CorpusManifest, Dataset, load_dataset, load_manifest
from .errors import DegenerateDataError, IngestError
from .evaluate import (
    OUTLIER_POLICIES,
    EvalReport,
    corpus_accuracy,
    evaluate_clustering,
    pair_counts,
)
from .pipeline import SCHEMA_VERSION, RunResult, run_pipeline
from .preprocess import build_affinity_model, distance_matrix, normalize

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _bin_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        low = int(lo)
        high = int(hi) if hi else low
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bin range {text!r}, expected LO:HI") from None
    if low < 2 or high < low:
        raise argparse.ArgumentTypeError(f"bad bin range {text!r}: need 2 <= LO <= HI")
    return low, high


def _bin_count(text: str) -> int:
    try:
        bins = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bin count {text!r}") from None
    if bins < 2:
        raise argparse.ArgumentTypeError(f"bad bin count {text!r}: need at least 2")
    return bins


def _add_ingest_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", "-i", required=True, help="delimited text file of points")
    sub.add_argument(
        "--delimiter",
        default=None,
        help="cell separator (literal, or comma/semicolon/tab/whitespace); default: auto-detect",
    )
    sub.add_argument(
        "--label-col", type=int, default=None, help="1-based ground-truth label column"
    )
    sub.add_argument("--has-header", action="store_true", help="skip the first data row")


def _add_output_args(sub: argparse.ArgumentParser, default_format: str = "json") -> None:
    sub.add_argument("--format", choices=("json", "csv"), default=default_format)
    sub.add_argument("--output", "-o", default=None, help="output file; default stdout")
    sub.add_argument(
        "--timings",
        action="store_true",
        help="embed per-stage timings in the report (breaks byte-identical reruns)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affclust",
        description="Parameter-free clustering from an affinity-histogram threshold.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_cluster = subs.add_parser("cluster", help="cluster one dataset and dump the run result")
    _add_ingest_args(p_cluster)
    p_cluster.add_argument("--bins", type=_bin_count, default=10, help="affinity histogram bins")
    _add_output_args(p_cluster)
    p_cluster.set_defaults(func=cmd_cluster)

    p_eval = subs.add_parser("evaluate", help="cluster and score against ground-truth labels")
    _add_ingest_args(p_eval)
    p_eval.add_argument("--bins", type=_bin_count, default=10)
    p_eval.add_argument("--outlier-policy", choices=OUTLIER_POLICIES, default="singletons")
    p_eval.add_argument(
        "--truth-k", type=int, default=None,
        help="expected cluster count; default: distinct nonzero labels",
    )
    _add_output_args(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_hist = subs.add_parser("histogram", help="emit the affinity histogram and threshold")
    _add_ingest_args(p_hist)
    p_hist.add_argument("--bins", type=_bin_count, default=10)
    _add_output_args(p_hist)
    p_hist.set_defaults(func=cmd_histogram)

    p_sweep = subs.add_parser("sweep-bins", help="accuracy curve over a range of bin counts")
    p_sweep.add_argument("--manifest", required=True, help="INI corpus manifest")
    p_sweep.add_argument(
        "--bin-range", type=_bin_range, default=(2, 30), help="inclusive LO:HI, default 2:30"
    )
    _add_output_args(p_sweep, default_format="csv")
    p_sweep.set_defaults(func=cmd_sweep_bins)

    p_bench = subs.add_parser("bench", help="run a whole corpus manifest and score it")
    p_bench.add_argument("--manifest", required=True, help="INI corpus manifest")
    p_bench.add_argument("--bins", type=_bin_count, default=10)
    p_bench.add_argument("--outlier-policy", choices=OUTLIER_POLICIES, default="singletons")
    _add_output_args(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


# ---------------------------------------------------------------------------
# serialization helpers

def _round6(x) -> float:
    return round(float(x), 6)


def _fmt(x) -> str:
    if x is None:
        return "na"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.6f}"
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round6(obj)
    return obj


def _write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit(payload: dict, rows_csv: str, args) -> None:
    if args.format == "json":
        _write_text(json.dumps(_jsonable(payload), indent=2) + "\n", args.output)
    else:
        _write_text(rows_csv, args.output)


def _report_timings(result: RunResult) -> None:
    parts = ", ".join(f"{stage} {ms:.1f} ms" for stage, ms in result.timings_ms.items())
    print(f"[{result.name}] {parts}", file=sys.stderr)


def _run_payload(result: RunResult, include_timings: bool) -> dict:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "dataset": result.name,
        "n": result.n_points,
        "d": result.n_features,
        "bins": result.bins,
        "degenerate": result.degenerate,
        "threshold": _round6(result.threshold) if result.threshold is not None else None,
        "threshold_bin": result.threshold_bin,
        "initial_cluster_count": result.initial_count,
        "outlier_count": result.outlier_count,
        "outliers": [int(i) + 1 for i in result.outlier_points],
        "k_estimate": result.k_estimate,
        "merges_attempted": result.merge_count,
        "accepted": result.accepted,
        "cost_before": _round6(result.cost_before) if result.cost_before is not None else None,
        "cost_after": _round6(result.cost_after) if result.cost_after is not None else None,
        "final_cluster_count": (
            result.reported_count if result.reported_count is not None else "na"
        ),
        "cluster_sizes": [int(s) for s in result.cluster_sizes],
        "assignment": [int(a) for a in result.assignment],
    }
    if include_timings:
        payload["timings_ms"] = {k: _round6(v) for k, v in result.timings_ms.items()}
    return payload


def _scalar_comments(payload: dict, skip=("assignment", "cluster_sizes", "outliers")) -> list[str]:
    lines = []
    for key, val in payload.items():
        if key in skip or isinstance(val, (dict, list)):
            continue
        lines.append(f"# {key}={_fmt(val)}")
    return lines


def _run_csv(result: RunResult, include_timings: bool) -> str:
    payload = _run_payload(result, include_timings=False)
    lines = _scalar_comments(payload)
    if include_timings:
        for stage, ms in result.timings_ms.items():
            lines.append(f"# timing_{stage}_ms={_fmt(ms)}")
    lines.append("point,cluster")
    lines.extend(f"{i + 1},{int(c)}" for i, c in enumerate(result.assignment))
    return "\n".join(lines) + "\n"


def _eval_payload(report: EvalReport, table) -> dict:
    return {
        "pair_counts": {
            "tp": table.tp, "fp": table.fp, "fn": table.fn, "tn": table.tn,
        },
        "ari": _round6(report.ari),
        "jaccard": _round6(report.jaccard),
        "f1": _round6(report.f1),
        "predicted_k": report.predicted_k if report.predicted_k is not None else "na",
        "truth_k": report.truth_k,
        "exact_match": report.exact_match,
    }


# ---------------------------------------------------------------------------
# subcommands

def _load_input(args) -> Dataset:
    return load_dataset(
        args.input,
        delimiter=args.delimiter,
        label_column=args.label_col,
        has_header=args.has_header,
    )


def cmd_cluster(args) -> int:
    dataset = _load_input(args)
    result = run_pipeline(dataset, bins=args.bins)
    _report_timings(result)
    payload = {"command": "cluster", **_run_payload(result, args.timings)}
    _emit(payload, _run_csv(result, args.timings), args)
    if result.degenerate:
        print(f"degenerate data: {result.name} has no clusterable structure", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_evaluate(args) -> int:
    dataset = _load_input(args)
    if dataset.labels is None:
        raise IngestError(
            f"{dataset.name}: evaluation needs ground-truth labels; pass --label-col"
        )
    result = run_pipeline(dataset, bins=args.bins)
    _report_timings(result)
    report = evaluate_clustering(
        result.assignment,
        dataset.labels,
        reported_count=result.reported_count,
        truth_k=args.truth_k,
        outlier_policy=args.outlier_policy,
    )
    table = pair_counts(result.assignment, dataset.labels, args.outlier_policy)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "evaluate",
        "dataset": result.name,
        "n": result.n_points,
        "bins": result.bins,
        "outlier_policy": args.outlier_policy,
        "threshold": _round6(result.threshold) if result.threshold is not None else None,
        "final_cluster_count": (
            result.reported_count if result.reported_count is not None else "na"
        ),
        **_eval_payload(report, table),
    }
    header = "dataset,n,outlier_policy,predicted_k,truth_k,exact_match,ari,jaccard,f1,tp,fp,fn,tn"
    row = ",".join(
        _fmt(v)
        for v in (
            result.name, result.n_points, args.outlier_policy,
            payload["predicted_k"], report.truth_k, report.exact_match,
            report.ari, report.jaccard, report.f1,
            table.tp, table.fp, table.fn, table.tn,
        )
    )
    _emit(payload, header + "\n" + row + "\n", args)
    if result.degenerate:
        print(f"degenerate data: {result.name} has no clusterable structure", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_histogram(args) -> int:
    dataset = _load_input(args)
    model = build_affinity_model(distance_matrix(normalize(dataset)), bins=args.bins)
    edges = [(i / model.bins, (i + 1) / model.bins) for i in range(model.bins)]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "histogram",
        "dataset": dataset.name,
        "n": dataset.n_points,
        "bins": model.bins,
        "counts": [int(c) for c in model.histogram],
        "edges": [[_round6(lo), _round6(hi)] for lo, hi in edges],
        "threshold_bin": model.threshold_bin,
        "threshold": _round6(model.threshold),
    }
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        f"# dataset={dataset.name}",
        f"# n={dataset.n_points}",
        f"# bins={model.bins}",
        f"# threshold_bin={model.threshold_bin}",
        f"# threshold={_fmt(model.threshold)}",
        "bin,lower,upper,count",
    ]
    lines.extend(
        f"{i + 1},{_fmt(lo)},{_fmt(hi)},{int(c)}"
        for i, ((lo, hi), c) in enumerate(zip(edges, model.histogram))
    )
    _emit(payload, "\n".join(lines) + "\n", args)
    return EXIT_OK


def _load_corpus(path: str) -> CorpusManifest:
    manifest = load_manifest(path)
    if not manifest.entries:
        raise IngestError(f"manifest {path} lists no datasets")
    return manifest


def cmd_sweep_bins(args) -> int:
    manifest = _load_corpus(args.manifest)
    low, high = args.bin_range
    datasets = [(e, e.load()) for e in manifest.available]
    if not datasets:
        raise IngestError(f"manifest {args.manifest}: no dataset files found on disk")
    rows = []
    accuracy_rows = []
    for bins in range(low, high + 1):
        matches = 0
        for entry, dataset in datasets:
            result = run_pipeline(dataset, bins=bins)
            predicted = result.reported_count
            exact = predicted is not None and predicted == entry.truth_k
            matches += exact
            rows.append(
                {
                    "bins": bins,
                    "dataset": entry.name,
                    "predicted_k": predicted if predicted is not None else "na",
                    "truth_k": entry.truth_k,
                    "exact_match": exact,
                }
            )
        accuracy_rows.append(
            {
                "bins": bins,
                "evaluated": len(datasets),
                "corpus_accuracy": _round6(100.0 * matches / len(datasets)),
            }
        )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep-bins",
        "manifest": str(args.manifest),
        "bin_range": [low, high],
        "skipped": manifest.skipped,
        "rows": rows,
        "accuracy_by_bins": accuracy_rows,
    }
    acc = {r["bins"]: r["corpus_accuracy"] for r in accuracy_rows}
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        f"# bin_range={low}:{high}",
        f"# skipped={';'.join(manifest.skipped)}",
        "bins,dataset,predicted_k,truth_k,exact_match,corpus_accuracy",
    ]
    lines.extend(
        ",".join(
            _fmt(v)
            for v in (
                r["bins"], r["dataset"], r["predicted_k"], r["truth_k"],
                r["exact_match"], acc[r["bins"]],
            )
        )
        for r in rows
    )
    _emit(payload, "\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_bench(args) -> int:
    started = time.perf_counter()
    manifest = _load_corpus(args.manifest)
    dataset_reports = []
    eval_reports = []
    for entry in manifest.entries:
        if not entry.available:
            dataset_reports.append({"name": entry.name, "status": "skipped"})
            continue
        try:
            dataset = entry.load()
            result = run_pipeline(dataset, bins=args.bins)
        except (IngestError, DegenerateDataError) as exc:
            dataset_reports.append({"name": entry.name, "status": "error", "error": str(exc)})
            continue
        _report_timings(result)
        row = {
            "name": entry.name,
            "status": "ok",
            "run": _run_payload(result, args.timings),
        }
        if dataset.labels is not None:
            report = evaluate_clustering(
                result.assignment,
                dataset.labels,
                reported_count=result.reported_count,
                truth_k=entry.truth_k,
                outlier_policy=args.outlier_policy,
            )
            table = pair_counts(result.assignment, dataset.labels, args.outlier_policy)
            row["evaluation"] = _eval_payload(report, table)
        else:
            report = EvalReport(
                ari=float("nan"), jaccard=float("nan"), f1=float("nan"),
                predicted_k=result.reported_count, truth_k=entry.truth_k,
                exact_match=result.reported_count is not None
                and result.reported_count == entry.truth_k,
            )
            row["evaluation"] = {
                "predicted_k": report.predicted_k if report.predicted_k is not None else "na",
                "truth_k": entry.truth_k,
                "exact_match": report.exact_match,
            }
        eval_reports.append(report)
        dataset_reports.append(row)

    if not eval_reports:
        raise IngestError(f"manifest {args.manifest}: no dataset could be benchmarked")
    accuracy = corpus_accuracy(eval_reports)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "bench",
        "manifest": str(args.manifest),
        "bins": args.bins,
        "outlier_policy": args.outlier_policy,
        "datasets": dataset_reports,
        "skipped": manifest.skipped,
        "evaluated": len(eval_reports),
        "matched": sum(1 for r in eval_reports if r.exact_match),
        "corpus_accuracy": _round6(accuracy),
    }
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        f"# manifest={args.manifest}",
        f"# bins={args.bins}",
        f"# outlier_policy={args.outlier_policy}",
        f"# corpus_accuracy={_fmt(accuracy)}",
        f"# skipped={';'.join(manifest.skipped)}",
        "dataset,status,n,threshold,initial_clusters,outliers,k_estimate,accepted,"
        "final_k,truth_k,exact_match,ari,jaccard,f1",
    ]
    for row in dataset_reports:
        if row["status"] != "ok":
            lines.append(",".join([row["name"], row["status"]] + [""] * 12))
            continue
        run = row["run"]
        ev = row["evaluation"]
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    row["name"], row["status"], run["n"], run["threshold"],
                    run["initial_cluster_count"], run["outlier_count"],
                    run["k_estimate"], run["accepted"], run["final_cluster_count"],
                    ev["truth_k"], ev["exact_match"],
                    ev.get("ari", ""), ev.get("jaccard", ""), ev.get("f1", ""),
                )
            )
        )
    _emit(payload, "\n".join(lines) + "\n", args)
    elapsed = time.perf_counter() - started
    print(f"bench: {len(eval_reports)} datasets in {elapsed:.2f} s", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDataError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


def entrypoint() -> None:
    sys.exit(main())
