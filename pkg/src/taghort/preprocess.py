"""Turn raw descriptor columns into a binary tag matrix.

Continuous columns are cut at empirical quantiles, categorical columns are
one-hot encoded and 0/1 columns become a yes/no pair. Within each descriptor
every sample carries exactly one tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping, Union

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import TagMatrix
from .exceptions import DegenerateBinsError, KindMismatchError, UnknownColumnError

ColumnKind = Literal["continuous", "categorical", "binary"]


@dataclass(frozen=True)
class Quantile:
    q: int = 4

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"quantile rule needs an integer q >= 2, got {self.q}")


@dataclass(frozen=True)
class OneHot:
    pass


@dataclass(frozen=True)
class Passthrough:
    pass


Rule = Union[Quantile, OneHot, Passthrough]


@dataclass(frozen=True)
class TagDerivationConfig:
    """One rule per descriptor column, applied in insertion order."""

    rules: Mapping[str, Rule] = field(default_factory=dict)

    def __post_init__(self):
        for name, rule in self.rules.items():
            if not isinstance(rule, (Quantile, OneHot, Passthrough)):
                raise TypeError(f"unsupported rule {rule!r} for column {name!r}")
        object.__setattr__(self, "rules", dict(self.rules))

    @property
    def descriptors(self) -> list[str]:
        return list(self.rules)

    @classmethod
    def from_dict(cls, spec: Mapping[str, Mapping]) -> "TagDerivationConfig":
        """Build from ``{"bmi": {"kind": "quantile", "q": 4}, "sex": {"kind": "onehot"}}``."""
        rules = {}
        for name, entry in spec.items():
            kind = entry.get("kind")
            if kind == "quantile":
                rules[name] = Quantile(int(entry.get("q", 4)))
            elif kind == "onehot":
                rules[name] = OneHot()
            elif kind == "passthrough":
                rules[name] = Passthrough()
            else:
                raise ValueError(f"unknown rule kind {kind!r} for column {name!r}")
        return cls(rules)

    def to_dict(self) -> dict:
        out = {}
        for name, rule in self.rules.items():
            if isinstance(rule, Quantile):
                out[name] = {"kind": "quantile", "q": rule.q}
            elif isinstance(rule, OneHot):
                out[name] = {"kind": "onehot"}
            else:
                out[name] = {"kind": "passthrough"}
        return out


def _infer_kind(col: pd.Series) -> ColumnKind:
    if pd.api.types.is_bool_dtype(col):
        return "binary"
    if pd.api.types.is_numeric_dtype(col):
        return "binary" if col.isin([0, 1]).all() else "continuous"
    return "categorical"


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Descriptor columns with a declared kind per column. Missing values are rejected."""

    data: pd.DataFrame
    kinds: Mapping[str, ColumnKind] = field(default_factory=dict)

    def __post_init__(self):
        if self.data.columns.duplicated().any():
            raise ValueError("column names must be unique")
        missing = self.data.isna().any()
        if missing.any():
            raise ValueError(
                "missing values in columns " + ", ".join(map(str, missing[missing].index))
            )
        kinds = {c: self.kinds.get(c) or _infer_kind(self.data[c]) for c in self.data.columns}
        object.__setattr__(self, "kinds", kinds)

    @property
    def n_samples(self) -> int:
        return len(self.data)


def quantile_edges(values, q: int) -> list[float]:
    """Interior bin edges at the i/q quantiles (linear interpolation).

    Duplicate edges are merged, and edges at or below the minimum are dropped
    since they would produce an empty lowest bin. Raises DegenerateBinsError
    when nothing is left: the column is constant, or so concentrated at its
    minimum that no quantile edge separates any values.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("values must be non-empty")
    edges = np.unique(np.quantile(values, np.arange(1, q) / q))
    edges = edges[edges > values.min()]
    if edges.size == 0:
        if values.min() == values.max():
            raise DegenerateBinsError("column is constant; no quantile edges")
        raise DegenerateBinsError(
            f"all {q}-quantiles equal the minimum; use a larger q or a passthrough rule"
        )
    return edges.tolist()


def _fmt(v: float, digits: int) -> str:
    return f"{v:.{digits}g}"


def bin_labels(name: str, edges) -> list[str]:
    """ASCII labels for the half-open bins cut at ``edges``."""
    for digits in (6, 12, 17):
        e = [_fmt(v, digits) for v in edges]
        labels = [f"{name}<{e[0]}"]
        labels += [f"{lo}<={name}<{hi}" for lo, hi in zip(e[:-1], e[1:])]
        labels.append(f"{e[-1]}<={name}")
        if len(set(labels)) == len(labels):
            return labels
    raise DegenerateBinsError(f"bin edges of {name!r} are indistinguishable")


def assign_bins(values, edges) -> np.ndarray:
    """Bin index per value; a value equal to an edge goes to the upper bin."""
    return np.searchsorted(np.asarray(edges, dtype=float), np.asarray(values, dtype=float), side="right")


def _check_column(table: FeatureTable, name: str, rule: Rule) -> pd.Series:
    if name not in table.data.columns:
        raise UnknownColumnError(f"descriptor {name!r} is not a column of the table")
    kind = table.kinds[name]
    col = table.data[name]
    if isinstance(rule, Quantile) and kind != "continuous":
        if kind == "categorical" or not pd.api.types.is_numeric_dtype(col):
            raise KindMismatchError(f"quantile rule on {kind} column {name!r}")
    if isinstance(rule, Passthrough):
        ok = pd.api.types.is_bool_dtype(col) or (
            pd.api.types.is_numeric_dtype(col) and col.isin([0, 1]).all()
        )
        if not ok:
            raise KindMismatchError(f"passthrough rule needs a 0/1 column, {name!r} is not")
    return col


class TagEncoder(TransformerMixin, BaseEstimator):
    """Learn tag vocabularies on one table and apply them to others.

    Parameters
    ----------
    rules : dict or TagDerivationConfig
        Column name to rule. Plain dicts may use rule objects or the
        ``{"kind": ...}`` form accepted by ``TagDerivationConfig.from_dict``.

    Attributes
    ----------
    edges_ : dict
        Interior quantile edges per continuous descriptor.
    categories_ : dict
        Observed categories per one-hot descriptor, in order of first appearance.
    groups_ : list of (str, slice)
        Tag column range belonging to each descriptor.
    """

    def __init__(self, rules=None):
        self.rules = rules

    def _config(self) -> TagDerivationConfig:
        if isinstance(self.rules, TagDerivationConfig):
            return self.rules
        rules = dict(self.rules or {})
        if rules and all(isinstance(v, Mapping) for v in rules.values()):
            return TagDerivationConfig.from_dict(rules)
        return TagDerivationConfig(rules)

    def fit(self, X, y=None):
        table = X if isinstance(X, FeatureTable) else FeatureTable(pd.DataFrame(X))
        config = self._config()
        self.edges_, self.categories_ = {}, {}
        labels, groups = [], []
        for name, rule in config.rules.items():
            col = _check_column(table, name, rule)
            start = len(labels)
            if isinstance(rule, Quantile):
                self.edges_[name] = quantile_edges(col.to_numpy(dtype=float), rule.q)
                labels += bin_labels(name, self.edges_[name])
            elif isinstance(rule, OneHot):
                self.categories_[name] = list(pd.unique(col))
                labels += [f"{name}={c}" for c in self.categories_[name]]
            else:
                labels += [f"{name}=yes", f"{name}=no"]
            groups.append((name, slice(start, len(labels))))
        self.rules_ = config
        self.feature_names_out_ = labels
        self.groups_ = groups
        return self

    def transform(self, X) -> TagMatrix:
        check_is_fitted(self, "feature_names_out_")
        table = X if isinstance(X, FeatureTable) else FeatureTable(pd.DataFrame(X))
        n = table.n_samples
        out = np.zeros((n, len(self.feature_names_out_)), dtype=bool)
        for (name, cols), rule in zip(self.groups_, self.rules_.rules.values()):
            col = _check_column(table, name, rule)
            block = out[:, cols]
            if isinstance(rule, Quantile):
                block[np.arange(n), assign_bins(col.to_numpy(dtype=float), self.edges_[name])] = True
            elif isinstance(rule, OneHot):
                # unseen categories get no tag from this descriptor
                for c, category in enumerate(self.categories_[name]):
                    block[:, c] = (col == category).to_numpy()
            else:
                yes = col.astype(bool).to_numpy()
                block[:, 0] = yes
                block[:, 1] = ~yes
        return TagMatrix(out, tuple(self.feature_names_out_))

    def fit_transform(self, X, y=None, **fit_params) -> TagMatrix:
        return self.fit(X, y).transform(X)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return np.asarray(self.feature_names_out_, dtype=object)


def derive_tags(table, config: TagDerivationConfig) -> TagMatrix:
    """Tag matrix for ``table`` under ``config``, fitted on the same table."""
    return TagEncoder(config).fit_transform(table)
