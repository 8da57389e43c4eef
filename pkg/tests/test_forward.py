import numpy as np

from oracles import lp_region_membership
from permverify.forward import forward_propagate, relu_over_approx
from permverify.geometry import AffineMap, AffineRegion, reduce_basis, region_contains, sample_region
from permverify.problem import simulate_layer
from permverify.tieclass import compute_tie_classes


def test_relu_over_approx_section_example():
    region = AffineRegion([[1, 0, 0, 2], [0, 1, 0.5, 0]], [0.5, 2, 1, 1])
    out = relu_over_approx(region, compute_tie_classes(region))
    rows = {tuple(r) for r in out.basis}
    assert rows == {(1, 0, 0, 2), (0, 1, 0.5, 0)}
    np.testing.assert_array_equal(out.center, [0.5, 2, 1, 1])


def test_relu_over_approx_positive_region_is_identity():
    region = AffineRegion([[1.0, 0.5], [0.2, -0.3]], [5.0, 4.0])
    out = relu_over_approx(region, compute_tie_classes(region))
    np.testing.assert_array_equal(out.basis, region.basis)
    np.testing.assert_array_equal(out.center, region.center)


def test_relu_over_approx_drops_dead_classes():
    region = AffineRegion([[1.0, 0.5]], [-5.0, 4.0])
    out = relu_over_approx(region, compute_tie_classes(region))
    np.testing.assert_array_equal(out.basis, [[0.0, 0.5]])
    np.testing.assert_array_equal(out.center, [0.0, 4.0])


def random_network(rng, widths):
    return [AffineMap(rng.normal(size=(a, b)), rng.normal(size=b) * 0.5)
            for a, b in zip(widths[:-1], widths[1:])]


def test_forward_soundness_random_networks():
    rng = np.random.default_rng(0)
    for trial in range(5):
        layers = random_network(rng, [3, 6, 5, 4])
        region = AffineRegion(np.diag(rng.uniform(0.1, 1, 3)), rng.normal(size=3))
        xs = sample_region(region, 1000, seed=trial)
        xs[:8] = region.point(np.sign(rng.uniform(-1, 1, (8, 3))))
        for layer in layers:
            region = forward_propagate(region, layer)
            xs = simulate_layer(xs, layer)
            assert region_contains(region, xs, tol=1e-6).all()


def test_forward_tie_classes_are_tight_for_symmetric_pair():
    # two coordinates that are always equal stay equal after ReLU
    region = AffineRegion([[1.0, 1.0], [0.5, 0.5]], [0.2, 0.2])
    out = forward_propagate(region, AffineMap(np.eye(2), np.zeros(2)))
    assert out.rank == 1
    np.testing.assert_allclose(out.basis[0, 0], out.basis[0, 1], rtol=1e-12)


def test_reduction_contains_unreduced_relu_image():
    rng = np.random.default_rng(3)
    region = AffineRegion(rng.normal(size=(4, 5)), rng.normal(size=5) * 0.3)
    raw = relu_over_approx(region, compute_tie_classes(region))
    red = reduce_basis(raw)
    pts = sample_region(raw, 500, seed=1)
    assert region_contains(red, pts).all()
    # and the ReLU image of the input region lies in the unreduced over-approximation
    img = np.maximum(sample_region(region, 40, seed=2), 0.0)
    assert all(lp_region_membership(raw.basis, raw.center, y) for y in img)
