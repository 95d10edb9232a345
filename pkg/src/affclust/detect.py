"""Sequential cluster detection with incremental centroids and point shifting.

The scan walks points in input order. A point that is still unassigned opens
a new cluster and immediately sweeps the whole dataset once: unassigned
points join when their affinity to the (moving) centroid clears the
threshold, and already-assigned points defect when the new centroid is
strictly closer than their current one. Decisions at position j always use
the centroids as they stand when j is reached, so every add or shift changes
what later points see. Singleton clusters are peeled off afterwards as
outliers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .preprocess import AffinityModel, DistanceMatrix, NormalizedData


@dataclass
class Clustering:
    """A hard assignment of points to clusters.

    assignment holds 1-based cluster ids, with 0 marking unassigned or
    outlier points. sizes[k-1] and centroids[k-1] describe cluster k.
    outliers lists the (0-based) point indices removed as singletons; it is
    empty until extract_outliers has run.
    """

    assignment: np.ndarray
    sizes: np.ndarray
    centroids: np.ndarray
    outliers: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def cluster_count(self) -> int:
        return self.sizes.size


class ClusterState:
    """Mutable working state for the detection scan.

    Centroids are maintained incrementally: adding point j to a cluster of
    size s moves the centroid to (s * c + z_j) / (s + 1), removal is the
    inverse. Cluster ids start at 1; row 0 of the centroid table is a
    sentinel so assignment values can index it directly.
    """

    def __init__(self, points: np.ndarray):
        n, d = points.shape
        self.points = points
        self.assignment = np.zeros(n, dtype=np.int64)
        self.centroids = np.zeros((n + 1, d))
        self.sizes = np.zeros(n + 1, dtype=np.int64)
        self.opened = 0

    def open_cluster(self, i: int) -> int:
        self.opened += 1
        k = self.opened
        self.assignment[i] = k
        self.sizes[k] = 1
        self.centroids[k] = self.points[i]
        return k

    def add_point(self, k: int, j: int) -> None:
        s = self.sizes[k]
        self.centroids[k] = (s * self.centroids[k] + self.points[j]) / (s + 1)
        self.sizes[k] = s + 1
        self.assignment[j] = k

    def remove_point(self, j: int) -> int:
        k = int(self.assignment[j])
        s = self.sizes[k]
        if s <= 1:
            # last member leaves: the cluster ceases to exist
            self.centroids[k] = 0.0
            self.sizes[k] = 0
        else:
            self.centroids[k] = (s * self.centroids[k] - self.points[j]) / (s - 1)
            self.sizes[k] = s - 1
        self.assignment[j] = 0
        return k

    def finalize(self) -> Clustering:
        """Drop clusters emptied by shifting and compact ids to 1..p."""
        keep = np.flatnonzero(self.sizes[1 : self.opened + 1] > 0) + 1
        remap = np.zeros(self.opened + 1, dtype=np.int64)
        remap[keep] = np.arange(1, keep.size + 1)
        return Clustering(
            assignment=remap[self.assignment],
            sizes=self.sizes[keep].copy(),
            centroids=self.centroids[keep].copy(),
        )


def _absorb_pass(state: ClusterState, k: int, two_sigma: float, threshold: float) -> None:
    """One full sweep on behalf of freshly opened cluster k.

    Semantically a plain j = 1..n loop; between two modifications nothing
    changes, so the loop is evaluated in vectorized stretches that restart
    after every add or shift to honor the updated centroids.
    """
    z = state.points
    n = z.shape[0]
    j = 0
    while j < n:
        tail = z[j:]
        owners = state.assignment[j:]
        diff = tail - state.centroids[k]
        gap2 = np.einsum("ij,ij->i", diff, diff)
        unassigned = owners == 0
        hits = unassigned & (np.exp(gap2 / (-two_sigma)) > threshold)
        own_diff = tail - state.centroids[owners]
        own2 = np.einsum("ij,ij->i", own_diff, own_diff)
        hits |= ~unassigned & (gap2 < own2)
        pos = int(np.argmax(hits))
        if not hits[pos]:
            return
        jj = j + pos
        if state.assignment[jj] != 0:
            state.remove_point(jj)
        state.add_point(k, jj)
        j = jj + 1


def find_clusters(
    normalized: NormalizedData,
    distances: DistanceMatrix,
    affinity: AffinityModel | None,
) -> Clustering:
    """Run the full detection scan and return the compacted clustering.

    With zero distance dispersion every point coincides, so the result
    degenerates to a single cluster and the affinity model may be None.
    The scan itself is strictly single-threaded and deterministic.
    """
    z = normalized.values
    n = z.shape[0]
    if n < 2:
        raise ValueError("clustering needs at least 2 points")
    if distances.dispersion <= 0.0:
        return Clustering(
            assignment=np.ones(n, dtype=np.int64),
            sizes=np.array([n], dtype=np.int64),
            centroids=z.mean(axis=0, keepdims=True),
        )
    if affinity is None:
        raise ValueError("affinity model is required unless the data is degenerate")

    state = ClusterState(z)
    two_sigma = 2.0 * distances.dispersion
    threshold = affinity.threshold
    for i in range(n):
        if state.assignment[i] != 0:
            continue
        k = state.open_cluster(i)
        _absorb_pass(state, k, two_sigma, threshold)
    return state.finalize()


def extract_outliers(clustering: Clustering) -> Clustering:
    """Remove singleton clusters, reporting their points as outliers.

    Surviving clusters are renumbered 1..p in detection order. When every
    cluster is a singleton the result has zero clusters and every point
    flagged; callers treat that as degenerate.
    """
    sizes = clustering.sizes
    singles = np.flatnonzero(sizes == 1) + 1
    if singles.size == 0:
        return Clustering(
            assignment=clustering.assignment.copy(),
            sizes=sizes.copy(),
            centroids=clustering.centroids.copy(),
        )
    keep = np.flatnonzero(sizes > 1) + 1
    remap = np.zeros(sizes.size + 1, dtype=np.int64)
    remap[keep] = np.arange(1, keep.size + 1)
    outliers = np.flatnonzero(np.isin(clustering.assignment, singles))
    return Clustering(
        assignment=remap[clustering.assignment],
        sizes=sizes[keep - 1].copy(),
        centroids=clustering.centroids[keep - 1].copy(),
        outliers=outliers,
    )
