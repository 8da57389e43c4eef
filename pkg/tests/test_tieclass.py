import numpy as np
import pytest

from helpers import random_integer_region
from oracles import corner_bounds, exact_tie_partition
from permverify.geometry import AffineMap, AffineRegion, component_bounds, pushforward
from permverify.tieclass import SignHint, are_tied, compute_tie_classes, tied_matrix


def section_example():
    return AffineRegion([[1, 0, 0, 2], [0, 1, 0.5, 0]], [0.5, 2, 1, 1])


def partition(classes):
    return {frozenset(c.indices.tolist()) for c in classes}


def test_component_bounds_examples():
    lo, hi = component_bounds(AffineRegion([[1, 0], [0, 2]], [0, 1]))
    assert (lo[1], hi[1]) == (-1, 3)
    lo, hi = component_bounds(AffineRegion(np.zeros((0, 2)), [4.0, -1.0]))
    np.testing.assert_array_equal(lo, [4.0, -1.0])
    np.testing.assert_array_equal(hi, [4.0, -1.0])


def test_component_bounds_match_corners():
    rng = np.random.default_rng(0)
    for _ in range(30):
        k, d = rng.integers(1, 9), rng.integers(1, 6)
        basis = rng.integers(-50, 51, size=(k, d)) / 8
        center = rng.integers(-50, 51, size=d) / 8
        lo, hi = component_bounds(AffineRegion(basis, center))
        olo, ohi = corner_bounds(basis, center)
        np.testing.assert_array_equal(lo, olo)
        np.testing.assert_array_equal(hi, ohi)


def test_section_example_pairs():
    region = section_example()
    assert are_tied(region, 0, 3)
    assert are_tied(region, 1, 2)
    assert not are_tied(region, 0, 1)


def test_identical_columns_tied():
    region = AffineRegion([[1.0, 1.0], [-2.0, -2.0]], [0.0, 0.0])
    assert are_tied(region, 0, 1)


def test_negative_ratio_not_tied():
    region = AffineRegion([[1.0, -1.0]], [0.0, 0.0])
    assert not are_tied(region, 0, 1)


def test_section_example_partition():
    classes = compute_tie_classes(section_example())
    assert partition(classes) == {frozenset({0, 3}), frozenset({1, 2})}
    signs = {frozenset(c.indices.tolist()): c.sign for c in classes}
    assert signs[frozenset({0, 3})] is SignHint.MIXED
    # coordinates 1 and 2 range over [1, 3] and [0.5, 1.5]
    assert signs[frozenset({1, 2})] is SignHint.NON_NEGATIVE


def test_all_positive_region_single_class():
    region = AffineRegion([[1.0, -0.5, 0.2]], [3.0, 2.0, 1.0])
    classes = compute_tie_classes(region)
    assert partition(classes) == {frozenset({0, 1, 2})}
    assert classes[0].sign is SignHint.NON_NEGATIVE


def test_zero_columns_grouped_and_non_positive():
    region = AffineRegion([[0.0, 1.0, 0.0], [0.0, 2.0, 0.0]], [0.0, 0.0, 0.0])
    classes = compute_tie_classes(region)
    zero = [c for c in classes if set(c.indices) == {0, 2}]
    assert len(zero) == 1 and zero[0].sign is SignHint.NON_POSITIVE


def test_running_example_layer0_partition():
    reach0 = AffineRegion([[0.5, 0, 0, 0.5], [0, 0.5, 0.5, 0]], [0.5] * 4)
    g = 1000.0
    w = np.array([[g, -g, g, -g], [-g, g, -g, g]])
    z = np.zeros_like(w)
    pre = pushforward(reach0, AffineMap(np.block([[w, z], [z, w]]), [0, 0, -1, -1, 0, 0, -1, -1]))
    expected = {frozenset({0, 5}), frozenset({1, 4}), frozenset({2, 7}), frozenset({3, 6})}
    assert partition(compute_tie_classes(pre)) == expected
    # same answer from the exact oracle (entries are integers after scaling by 2)
    parts, _, _ = exact_tie_partition(pre.basis, pre.center)
    assert parts == expected


@pytest.mark.parametrize("seed", range(20))
def test_partition_matches_exact_oracle(seed):
    rng = np.random.default_rng(seed)
    basis, center = random_integer_region(rng)
    region = AffineRegion(basis, center)
    parts, labels, _ = exact_tie_partition(basis, center)
    classes = compute_tie_classes(region)
    assert partition(classes) == parts
    for c in classes:
        assert c.sign.value == labels[frozenset(c.indices.tolist())]


def test_tied_relation_transitive_on_random_regions():
    rng = np.random.default_rng(5)
    for _ in range(50):
        basis, center = random_integer_region(rng)
        t = tied_matrix(AffineRegion(basis, center))
        # boolean matrix product: t[a,b] and t[b,c] implies t[a,c]
        assert not np.any((t.astype(int) @ t.astype(int) > 0) & ~t)


def test_tied_coordinates_never_have_opposite_signs():
    rng = np.random.default_rng(6)
    for _ in range(50):
        basis, center = random_integer_region(rng)
        region = AffineRegion(basis, center)
        tol = 1e-7 * (1 + np.abs(center).max(initial=0))
        alphas = rng.uniform(-1, 1, size=(2000, basis.shape[0]))
        alphas[:64] = np.sign(alphas[:64])
        pts = region.point(alphas)
        for c in compute_tie_classes(region):
            vals = pts[:, c.indices]
            pos = (vals > tol).any(axis=1)
            neg = (vals < -tol).any(axis=1)
            assert not np.any(pos & neg)


def test_masking_identity():
    rng = np.random.default_rng(7)
    basis, center = random_integer_region(rng, d_max=6)
    classes = compute_tie_classes(AffineRegion(basis, center))
    total = np.zeros_like(basis, dtype=float)
    for c in classes:
        masked = np.zeros_like(total)
        masked[:, c.indices] = basis[:, c.indices]
        total += masked
    np.testing.assert_array_equal(total, basis)
