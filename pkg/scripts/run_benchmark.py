#!/usr/bin/env python3
"""Run the pipeline across a corpus manifest and print a summary table.

Unlike `affclust bench`, which emits a machine-readable report, this prints
an aligned human-readable table with wall times per dataset. Entries whose
file is missing are listed as skipped.
"""

import argparse
import time

from affclust.data import load_manifest
from affclust.evaluate import EvalReport, corpus_accuracy, evaluate_clustering
from affclust.pipeline import run_pipeline

COLUMNS = "{:<10} {:>6} {:>9} {:>4} {:>4} {:>8} {:>7} {:>6} {:>7} {:>8}"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--manifest",
        default="data/reference_corpus.ini",
        help="INI corpus manifest (default: data/reference_corpus.ini)",
    )
    parser.add_argument("--bins", type=int, default=10, help="affinity histogram bins")
    args = parser.parse_args()

    manifest = load_manifest(args.manifest)
    print(COLUMNS.format(
        "dataset", "n", "threshold", "p", "est", "accepted",
        "final_k", "truth", "ari", "time_s",
    ))

    reports = []
    for entry in manifest.entries:
        if not entry.available:
            print(COLUMNS.format(entry.name, "-", "-", "-", "-", "skipped", "-",
                                 entry.truth_k, "-", "-"))
            continue
        dataset = entry.load()
        started = time.perf_counter()
        result = run_pipeline(dataset, bins=args.bins)
        elapsed = time.perf_counter() - started

        if dataset.labels is not None:
            report = evaluate_clustering(
                result.assignment,
                dataset.labels,
                reported_count=result.reported_count,
                truth_k=entry.truth_k,
            )
            ari = f"{report.ari:.4f}"
        else:
            report = EvalReport(
                ari=float("nan"), jaccard=float("nan"), f1=float("nan"),
                predicted_k=result.reported_count, truth_k=entry.truth_k,
                exact_match=result.reported_count == entry.truth_k,
            )
            ari = "-"
        reports.append(report)

        print(COLUMNS.format(
            entry.name,
            result.n_points,
            f"{result.threshold:.2f}" if result.threshold is not None else "-",
            result.initial_count,
            result.k_estimate,
            "yes" if result.accepted else "no",
            result.reported_count if result.reported_count is not None else "na",
            entry.truth_k,
            ari,
            f"{elapsed:.2f}",
        ))

    if not reports:
        print("no dataset file found; see the manifest comments for setup")
        return 1
    accuracy = corpus_accuracy(reports)
    print(f"\nexact cluster-count matches: {sum(r.exact_match for r in reports)}"
          f"/{len(reports)} ({accuracy:.1f}%)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
