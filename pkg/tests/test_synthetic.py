import numpy as np
import pytest

from taghort.synthetic import TwoRegionSpec, generate, linear_shapley


def test_sample_at_mean_has_zero_importance():
    X = np.array([[1.0, 2.0], [3.0, 6.0]])
    mu = X.mean(axis=0)
    np.testing.assert_array_equal(linear_shapley(mu[None, :], [2.0, -1.0], mu), [[0.0, 0.0]])


def test_within_region_differences_are_linear():
    spec = TwoRegionSpec(n_per_region=20)
    table, W, regions = generate(spec)
    X = table.data.to_numpy()
    for region, v in ((1, spec.weights_low), (2, spec.weights_high)):
        i, j = np.flatnonzero(regions == region)[:2]
        np.testing.assert_allclose(W.values[i] - W.values[j], np.multiply(v, X[i] - X[j]), atol=1e-9)


def test_deterministic_given_seed():
    a = generate(TwoRegionSpec(n_per_region=15, noise=0.1, rng_seed=3))
    b = generate(TwoRegionSpec(n_per_region=15, noise=0.1, rng_seed=3))
    np.testing.assert_array_equal(a[1].values, b[1].values)
    np.testing.assert_array_equal(a[2], b[2])


def test_boxes_respect_thresholds():
    spec = TwoRegionSpec(n_per_region=50)
    table, _, regions = generate(spec)
    X = table.data.to_numpy()
    low, high = X[regions == 1], X[regions == 2]
    assert (low[:, 0] < spec.threshold1).all() and (low[:, 1] < spec.threshold2).all()
    assert (high[:, 0] >= spec.threshold1).all() and (high[:, 1] >= spec.threshold2).all()


def test_sign_differs_between_regions_away_from_mean():
    spec = TwoRegionSpec(n_per_region=50)
    table, W, regions = generate(spec)
    side = np.sign(table.data.to_numpy() - table.data.to_numpy().mean(axis=0))
    low = (regions == 1) & (side == -1).all(axis=1)
    high = (regions == 2) & (side == 1).all(axis=1)
    assert low.any() and high.any()
    # axis 2 keeps a positive weight, so its importance follows the side of the mean
    assert (W.values[low, 1] < 0).all() and (W.values[high, 1] > 0).all()
    # axis 1 flips its weight, so its importance is positive on both sides
    assert (W.values[low, 0] > 0).all() and (W.values[high, 0] > 0).all()


def test_gradient_explainer_is_constant_per_region():
    _, W, regions = generate(TwoRegionSpec(n_per_region=10, explainer="gradient"))
    for r in (1, 2):
        assert len(np.unique(W.values[regions == r], axis=0)) == 1


@pytest.mark.parametrize("kwargs", [
    {"n_per_region": 0},
    {"threshold1": 70.0},
    {"weights_low": (1.0, 1.0), "weights_high": (1.0, 1.0)},
    {"noise": -0.1},
    {"explainer": "lime"},
])
def test_invalid_spec(kwargs):
    with pytest.raises(ValueError):
        TwoRegionSpec(**kwargs)
