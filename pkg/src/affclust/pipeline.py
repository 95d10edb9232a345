"""End-to-end run: normalize, threshold, detect, de-noise, merge, report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .detect import extract_outliers, find_clusters
from .merge import estimate_cluster_count, merge_clusters, report_cluster_count
from .preprocess import build_affinity_model, distance_matrix, normalize

SCHEMA_VERSION = 1


@dataclass
class RunResult:
    """Everything one clustering run produced.

    assignment holds final 1-based cluster ids with 0 for outliers;
    outlier_points are 0-based indices into the input order. reported_count
    is None when the final count exceeded sqrt(n) and was withheld.
    timings_ms is informational only and excluded from deterministic output.
    """

    name: str
    n_points: int
    n_features: int
    bins: int
    degenerate: bool
    threshold: float | None
    threshold_bin: int | None
    initial_count: int
    outlier_points: np.ndarray
    k_estimate: int
    merge_count: int
    accepted: bool
    cost_before: float | None
    cost_after: float | None
    final_count: int
    reported_count: int | None
    assignment: np.ndarray
    cluster_sizes: np.ndarray
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def outlier_count(self) -> int:
        return int(self.outlier_points.size)


def run_pipeline(dataset: Dataset, bins: int = 10) -> RunResult:
    """Cluster one dataset with no tuning beyond the histogram bin count.

    Degenerate inputs do not raise here: identical points come back as a
    single all-points cluster and an all-singleton detection comes back with
    zero clusters, both flagged degenerate so callers can set exit status.
    """
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    norm = normalize(dataset)
    timings["normalize"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    dist = distance_matrix(norm)
    timings["distances"] = time.perf_counter() - t0

    n = dataset.n_points
    if dist.dispersion <= 0.0:
        clustering = find_clusters(norm, dist, None)
        return RunResult(
            name=dataset.name,
            n_points=n,
            n_features=dataset.n_features,
            bins=bins,
            degenerate=True,
            threshold=None,
            threshold_bin=None,
            initial_count=1,
            outlier_points=np.empty(0, dtype=np.int64),
            k_estimate=1,
            merge_count=0,
            accepted=True,
            cost_before=0.0,
            cost_after=0.0,
            final_count=1,
            reported_count=1,
            assignment=clustering.assignment,
            cluster_sizes=clustering.sizes,
            timings_ms=_to_ms(timings),
        )

    t0 = time.perf_counter()
    model = build_affinity_model(dist, bins=bins)
    timings["affinity"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    detected = find_clusters(norm, dist, model)
    cleaned = extract_outliers(detected)
    timings["detect"] = time.perf_counter() - t0

    if cleaned.cluster_count == 0:
        # every detected cluster was a singleton: nothing but outliers
        return RunResult(
            name=dataset.name,
            n_points=n,
            n_features=dataset.n_features,
            bins=bins,
            degenerate=True,
            threshold=model.threshold,
            threshold_bin=model.threshold_bin,
            initial_count=0,
            outlier_points=cleaned.outliers,
            k_estimate=0,
            merge_count=0,
            accepted=True,
            cost_before=None,
            cost_after=None,
            final_count=0,
            reported_count=0,
            assignment=cleaned.assignment,
            cluster_sizes=cleaned.sizes,
            timings_ms=_to_ms(timings),
        )

    t0 = time.perf_counter()
    sizes_desc = np.sort(cleaned.sizes)[::-1]
    k_estimate = estimate_cluster_count(sizes_desc)
    plan = merge_clusters(norm, cleaned, k_estimate)
    timings["merge"] = time.perf_counter() - t0

    final_sizes = np.bincount(plan.final_assignment, minlength=plan.final_count + 1)[1:]
    return RunResult(
        name=dataset.name,
        n_points=n,
        n_features=dataset.n_features,
        bins=bins,
        degenerate=False,
        threshold=model.threshold,
        threshold_bin=model.threshold_bin,
        initial_count=plan.initial_count,
        outlier_points=cleaned.outliers,
        k_estimate=plan.estimated_count,
        merge_count=len(plan.merge_steps),
        accepted=plan.accepted,
        cost_before=plan.cost_before,
        cost_after=plan.cost_after,
        final_count=plan.final_count,
        reported_count=report_cluster_count(plan, n),
        assignment=plan.final_assignment,
        cluster_sizes=final_sizes,
        timings_ms=_to_ms(timings),
    )


def _to_ms(timings: dict[str, float]) -> dict[str, float]:
    return {stage: seconds * 1000.0 for stage, seconds in timings.items()}
