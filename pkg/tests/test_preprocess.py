"""Preprocess stage: z-scores, distance matrix, affinities, histogram, threshold."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affclust.data import Dataset
from affclust.errors import DegenerateDataError
from affclust.preprocess import (
    NormalizedData,
    DistanceMatrix,
    affinity_histogram,
    affinity_matrix,
    build_affinity_model,
    distance_matrix,
    normalize,
    select_threshold,
)


def ds(rows, name="t"):
    return Dataset(points=np.asarray(rows, dtype=np.float64), name=name)


def nd(rows):
    """NormalizedData wrapper for tests that want to control z-space directly."""
    z = np.asarray(rows, dtype=np.float64)
    return NormalizedData(values=z, column_means=z.mean(0), column_stds=z.std(0))


def random_dataset(seed, max_n=40, max_d=5):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    return ds(rng.normal(scale=rng.uniform(0.5, 20.0), size=(n, d)))


# ---------------------------------------------------------------------------
# normalize

def test_symmetric_two_point_column_is_its_own_z_score():
    out = normalize(ds([[-1.0], [1.0]]))
    assert np.allclose(out.values, [[-1.0], [1.0]])
    assert out.column_means[0] == 0.0
    assert out.column_stds[0] == 1.0


def test_constant_column_normalizes_to_zeros():
    out = normalize(ds([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]]))
    assert np.array_equal(out.values[:, 0], [0.0, 0.0, 0.0])
    assert out.column_stds[0] == 0.0
    assert np.abs(out.values[:, 1]).max() > 0


def test_normalization_divides_by_population_std():
    # [0,0,2,2]: mean 1, population SD 1 (sample SD would be ~1.1547)
    out = normalize(ds([[0.0], [0.0], [2.0], [2.0]]))
    assert np.array_equal(out.values[:, 0], [-1.0, -1.0, 1.0, 1.0])


def test_normalized_columns_recompute_to_zero_mean_unit_spread():
    rng = np.random.default_rng(7)
    out = normalize(ds(rng.normal(3.0, 11.0, size=(6, 3))))
    for c in range(3):
        col = out.values[:, c]
        mean = sum(col) / len(col)
        var = sum((v - mean) ** 2 for v in col) / len(col)
        assert abs(mean) < 1e-9
        assert abs(math.sqrt(var) - 1.0) < 1e-9


# ---------------------------------------------------------------------------
# distance matrix

def test_three_four_five_triangle_distance():
    out = distance_matrix(nd([[0.0, 0.0], [3.0, 4.0]]))
    assert out.values[0, 1] == pytest.approx(5.0, abs=1e-12)
    assert out.values[1, 0] == pytest.approx(5.0, abs=1e-12)


def test_distance_matrix_matches_double_loop_oracle():
    rng = np.random.default_rng(3)
    z = rng.normal(size=(5, 2))
    out = distance_matrix(nd(z))
    for i in range(5):
        for j in range(5):
            expect = math.sqrt(((z[i] - z[j]) ** 2).sum())
            assert abs(out.values[i, j] - expect) < 1e-12


def test_distance_diagonal_zero_and_symmetric():
    out = distance_matrix(nd(np.random.default_rng(5).normal(size=(9, 3))))
    assert np.array_equal(np.diag(out.values), np.zeros(9))
    assert np.array_equal(out.values, out.values.T)


def test_dispersion_is_population_std_over_all_entries():
    """Dispersion covers the full n*n matrix, zero diagonal included."""
    out = distance_matrix(nd(np.random.default_rng(11).normal(size=(7, 2))))
    flat = [out.values[i, j] for i in range(7) for j in range(7)]
    mean = sum(flat) / len(flat)
    var = sum((v - mean) ** 2 for v in flat) / len(flat)
    assert out.dispersion == pytest.approx(math.sqrt(var), abs=1e-12)


def test_distance_matrix_rejects_single_point():
    with pytest.raises(ValueError):
        distance_matrix(nd([[1.0, 2.0]]))


# ---------------------------------------------------------------------------
# affinity matrix

def test_zero_distance_gives_unit_affinity():
    out = affinity_matrix(distance_matrix(nd(np.random.default_rng(0).normal(size=(6, 2)))))
    assert np.array_equal(np.diag(out), np.ones(6))


def test_distance_squared_twice_dispersion_maps_to_e_inverse():
    sigma = 0.37
    d = math.sqrt(2.0 * sigma)
    dm = DistanceMatrix(values=np.array([[0.0, d], [d, 0.0]]), dispersion=sigma)
    out = affinity_matrix(dm)
    assert out[0, 1] == pytest.approx(math.exp(-1.0), abs=1e-9)


def test_affinity_matches_scalar_recomputation():
    norm = normalize(random_dataset(23))
    dm = distance_matrix(norm)
    out = affinity_matrix(dm)
    n = norm.values.shape[0]
    for i in range(n):
        for j in range(n):
            expect = math.exp(-dm.values[i, j] ** 2 / (2.0 * dm.dispersion))
            assert abs(out[i, j] - expect) < 1e-12


def test_identical_points_are_rejected_as_degenerate():
    with pytest.raises(DegenerateDataError):
        affinity_matrix(distance_matrix(normalize(ds([[4.0, 4.0]] * 5))))


def test_affinity_decreases_with_distance():
    norm = normalize(random_dataset(31))
    dm = distance_matrix(norm)
    a = affinity_matrix(dm)
    iu = np.triu_indices_from(a, k=1)
    order = np.argsort(dm.values[iu])
    assert (np.diff(a[iu][order]) <= 1e-15).all()


# ---------------------------------------------------------------------------
# histogram

def test_single_self_affinity_lands_in_top_bin():
    hist = affinity_histogram(np.array([[1.0]]), bins=10)
    assert hist.tolist() == [0, 0, 0, 0, 0, 0, 0, 0, 0, 1]


def test_value_at_085_buckets_into_ninth_bin():
    # ceiling rule: ceil(0.85 * 10) = 9
    hist = affinity_histogram(np.array([[0.85]]), bins=10)
    assert hist[8] == 1
    assert hist.sum() == 1


def test_histogram_matches_brute_force_bucketing():
    a = affinity_matrix(distance_matrix(normalize(random_dataset(41, max_n=4))))
    bins = 10
    expect = [0] * bins
    for v in a.ravel():
        b = min(bins, max(1, math.ceil(v * bins)))
        expect[b - 1] += 1
    assert affinity_histogram(a, bins).tolist() == expect


def test_histogram_counts_sum_to_n_squared():
    a = affinity_matrix(distance_matrix(normalize(random_dataset(43, max_n=30))))
    n = a.shape[0]
    for bins in (2, 7, 10, 30):
        assert affinity_histogram(a, bins).sum() == n * n


def test_histogram_rejects_single_bin():
    with pytest.raises(ValueError):
        affinity_histogram(np.array([[1.0]]), bins=1)


# ---------------------------------------------------------------------------
# threshold selection

def test_single_maximal_jump_picks_ninth_bin():
    hist = np.array([0, 0, 0, 0, 0, 0, 0, 0, 10, 90])
    threshold, k = select_threshold(hist)
    assert k == 9
    assert threshold == pytest.approx(0.85)


def test_threshold_tie_breaks_toward_smallest_bin():
    # jumps of +5 at positions 1 and 3; the first must win
    threshold, k = select_threshold(np.array([0, 5, 0, 5]))
    assert k == 1
    assert threshold == pytest.approx(0.125)


def test_threshold_matches_independent_difference_scan():
    rng = np.random.default_rng(59)
    pts = np.vstack([
        rng.normal(loc=(0, 0), scale=1.0, size=(20, 2)),
        rng.normal(loc=(10, 10), scale=1.0, size=(20, 2)),
    ])
    model = build_affinity_model(distance_matrix(normalize(ds(pts))), bins=10)
    best_k, best_jump = None, None
    for i in range(1, 10):
        jump = int(model.histogram[i]) - int(model.histogram[i - 1])
        if best_jump is None or jump > best_jump:
            best_k, best_jump = i, jump
    assert model.threshold_bin == best_k
    assert model.threshold == pytest.approx((best_k - 0.5) / 10)


def test_all_negative_jumps_still_pick_a_bin():
    threshold, k = select_threshold(np.array([90, 50, 10]))
    assert k == 1  # least negative jump, first position
    assert 0.0 < threshold < 1.0


def test_model_composition_is_consistent():
    model = build_affinity_model(distance_matrix(normalize(random_dataset(61))), bins=10)
    assert model.bins == 10
    assert model.histogram.sum() == model.values.size
    assert model.threshold == (model.threshold_bin - 0.5) / model.bins
    assert 1 <= model.threshold_bin <= 9


# ---------------------------------------------------------------------------
# invariants on random data

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_normalize_invariants_hold_on_random_data(seed):
    norm = normalize(random_dataset(seed))
    means = norm.values.mean(axis=0)
    stds = norm.values.std(axis=0)
    assert np.abs(means).max() < 1e-9
    for c, s in enumerate(stds):
        if norm.column_stds[c] == 0.0:
            assert not norm.values[:, c].any()
        else:
            assert abs(s - 1.0) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]))
def test_power_of_two_column_scaling_is_exactly_invisible(seed, factor):
    """Column scaling by a binade multiple changes no bit downstream."""
    base = random_dataset(seed)
    scaled = Dataset(points=base.points * factor, name=base.name)
    m1 = build_affinity_model(distance_matrix(normalize(base)))
    m2 = build_affinity_model(distance_matrix(normalize(scaled)))
    assert np.array_equal(m1.values, m2.values)
    assert np.array_equal(m1.histogram, m2.histogram)
    assert m1.threshold == m2.threshold


def test_arbitrary_positive_scaling_leaves_z_scores_close():
    base = random_dataset(97)
    scaled = Dataset(points=base.points * 3.7, name=base.name)
    z1 = normalize(base).values
    z2 = normalize(scaled).values
    assert np.abs(z1 - z2).max() < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_row_permutation_cannot_move_the_threshold(seed):
    """The histogram is a multiset statistic, blind to point order."""
    base = random_dataset(seed)
    rng = np.random.default_rng(seed + 1)
    perm = rng.permutation(base.n_points)
    shuffled = Dataset(points=base.points[perm], name=base.name)
    m1 = build_affinity_model(distance_matrix(normalize(base)))
    m2 = build_affinity_model(distance_matrix(normalize(shuffled)))
    assert np.array_equal(m1.histogram, m2.histogram)
    assert m1.threshold == m2.threshold


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_affinity_model_invariants_hold_on_random_data(seed):
    norm = normalize(random_dataset(seed))
    dm = distance_matrix(norm)
    n = norm.values.shape[0]
    model = build_affinity_model(dm, bins=10)
    a = model.values
    assert ((a > 0) & (a <= 1)).all()
    assert np.array_equal(np.diag(a), np.ones(n))
    assert np.array_equal(a, a.T)
    assert model.histogram.sum() == n * n
    assert 0.0 < model.threshold < 1.0
