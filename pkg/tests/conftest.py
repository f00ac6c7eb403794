import numpy as np
import pytest

from taghort.core import ImportanceMatrix, TagMatrix
from taghort.preprocess import derive_tags
from taghort.synthetic import TwoRegionSpec, generate, region_tag_config


def random_instance(rng, n_range=(6, 10), m_range=(2, 3), r_range=(4, 8), density=0.6):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    r = int(rng.integers(r_range[0], r_range[1] + 1))
    W = rng.normal(size=(n, m))
    D = (rng.random((n, r)) < density).astype(int)
    return W, D


def two_region(n_per_region, **kwargs):
    spec = TwoRegionSpec(n_per_region=n_per_region, **kwargs)
    table, W, regions = generate(spec)
    D = derive_tags(table, region_tag_config(spec))
    return W, D, regions


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixture10():
    return two_region(5)


@pytest.fixture
def small_pair():
    W = ImportanceMatrix(np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]]))
    D = TagMatrix(np.array([[1, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 1]]))
    return W, D
