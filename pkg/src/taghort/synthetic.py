"""Two-region fixture with analytically known local importances.

Samples live in two boxes, a low box (both axes below their thresholds) and a
high box (both above). A separate linear model acts in each box. Each region
is cut out exactly by a median split on either axis.

Flipping every weight sign between the boxes would flip the sign of
``x - mean`` as well, leaving Shapley importances with identical signs in both
regions; the default high-box weights therefore keep axis 2 positive so the
second importance coordinate changes sign between regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .core import ImportanceMatrix
from .preprocess import FeatureTable, Quantile, TagDerivationConfig


@dataclass(frozen=True)
class TwoRegionSpec:
    """Geometry and regional models of the fixture.

    ``explainer="shapley"`` attributes ``v_j * (x_j - mean_j)``, the exact
    Shapley value of a linear model with independent features. ``"gradient"``
    attributes the model gradient ``v``, which is constant within a region.
    ``noise`` is the standard deviation of Gaussian noise added to the
    importances, as a fraction of the noiseless importance scale.
    """

    n_per_region: int = 100
    axis1_range: tuple[float, float] = (10.0, 60.0)
    axis2_range: tuple[float, float] = (1000.0, 5000.0)
    threshold1: float = 30.0
    threshold2: float = 3000.0
    weights_low: tuple[float, float] = (-1.0, 1.0)
    weights_high: tuple[float, float] = (1.0, 1.0)
    noise: float = 0.0
    explainer: str = "shapley"
    feature_names: tuple[str, str] = ("BMI", "potassium")
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_per_region < 1:
            raise ValueError("n_per_region must be at least 1")
        lo1, hi1 = self.axis1_range
        lo2, hi2 = self.axis2_range
        if not (lo1 < self.threshold1 < hi1 and lo2 < self.threshold2 < hi2):
            raise ValueError("thresholds must lie strictly inside the axis ranges")
        if not np.any(np.sign(self.weights_low) != np.sign(self.weights_high)):
            raise ValueError("regional weight vectors must differ in at least one sign")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")
        if self.explainer not in ("shapley", "gradient"):
            raise ValueError(f"unknown explainer {self.explainer!r}")


def linear_shapley(X: np.ndarray, weights: np.ndarray, baseline: np.ndarray) -> np.ndarray:
    """Exact Shapley values of x -> weights . x under independent features."""
    return np.asarray(weights) * (np.asarray(X) - np.asarray(baseline))


def generate(spec: TwoRegionSpec = TwoRegionSpec()):
    """Draw the fixture.

    Returns ``(table, importances, regions)`` where ``regions`` holds 1 for the
    low box and 2 for the high box. Rows are shuffled.
    """
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.n_per_region
    (lo1, hi1), (lo2, hi2) = spec.axis1_range, spec.axis2_range
    low = np.column_stack([
        rng.uniform(lo1, spec.threshold1, n),
        rng.uniform(lo2, spec.threshold2, n),
    ])
    high = np.column_stack([
        rng.uniform(spec.threshold1, hi1, n),
        rng.uniform(spec.threshold2, hi2, n),
    ])
    X = np.vstack([low, high])
    regions = np.repeat([1, 2], n)
    order = rng.permutation(2 * n)
    X, regions = X[order], regions[order]

    weights = np.where((regions == 1)[:, None], spec.weights_low, spec.weights_high)
    if spec.explainer == "shapley":
        W = linear_shapley(X, weights, X.mean(axis=0))
    else:
        W = weights.astype(float)
    if spec.noise > 0:
        scale = W.std() if W.std() > 0 else 1.0
        W = W + rng.normal(0.0, spec.noise * scale, W.shape)

    names = list(spec.feature_names)
    table = FeatureTable(pd.DataFrame(X, columns=names), {c: "continuous" for c in names})
    return table, ImportanceMatrix(W, tuple(names)), regions


def region_tag_config(spec: TwoRegionSpec = TwoRegionSpec()) -> TagDerivationConfig:
    """Median split on both axes; with equal region sizes each edge falls between the boxes."""
    return TagDerivationConfig({name: Quantile(2) for name in spec.feature_names})
