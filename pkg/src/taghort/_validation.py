"""Coerce estimator inputs (arrays, DataFrames, core types) into core types."""

from __future__ import annotations

import numpy as np
import pandas as pd
from sklearn.utils.validation import check_array

from .core import ImportanceMatrix, TagMatrix
from .exceptions import DictionaryMismatchError


def as_importances(y, feature_names=None) -> ImportanceMatrix:
    if isinstance(y, ImportanceMatrix):
        return y
    if feature_names is None and isinstance(y, pd.DataFrame):
        feature_names = tuple(map(str, y.columns))
    values = check_array(y, ensure_all_finite=False, dtype=np.float64, ensure_2d=True)
    return ImportanceMatrix(values, tuple(feature_names or ()))


def as_tags(X, dictionary=None) -> TagMatrix:
    """Tag matrix from X, checked against ``dictionary`` when one is given."""
    if isinstance(X, TagMatrix):
        D = X
    else:
        names = tuple(map(str, X.columns)) if isinstance(X, pd.DataFrame) else None
        values = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=0)
        if names is None and dictionary is not None and values.shape[1] == len(dictionary):
            names = tuple(dictionary)
        D = TagMatrix(values, names or ())
    if dictionary is not None and D.dictionary != tuple(dictionary):
        raise DictionaryMismatchError(
            f"expected {len(dictionary)} tags {list(dictionary)[:3]}..., got {D.n_tags}"
        )
    return D
