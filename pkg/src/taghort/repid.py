"""Decision-tree cohort baseline in the style of REPID.

The tree splits on tag columns (tag present / absent) rather than raw
features, so it describes cohorts with the same vocabulary as the tag-based
solver. It is grown best-first: the leaf whose best split removes the most
within-leaf squared deviation of importance rows is split next, until ``k``
leaves exist or no split helps. This is an approximation of REPID, not a
reimplementation of its ICE-based pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_importances, as_tags
from .core import ImportanceMatrix, Partition, TagMatrix, canonicalize, validate_inputs
from .exceptions import DictionaryMismatchError, KTooLargeError
from .metrics import squared_errors

# relative to the root sum of squares; guards against splitting on rounding noise
MIN_RELATIVE_GAIN = 1e-12


@dataclass(frozen=True)
class TreeNode:
    tag: int | None = None
    present: int | None = None
    absent: int | None = None
    leaf: int | None = None  # 1-based cohort label for leaves

    @property
    def is_leaf(self) -> bool:
        return self.tag is None


@dataclass(frozen=True, eq=False)
class TreeCohortModel:
    nodes: tuple[TreeNode, ...]
    leaf_means: np.ndarray
    partition: Partition
    early_stopped: bool
    split_gains: tuple[float, ...]
    feature_names: tuple[str, ...] = ()
    dictionary: tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def leaf_sizes(self) -> np.ndarray:
        return self.partition.sizes()

    def apply(self, D: TagMatrix) -> np.ndarray:
        """1-based leaf label for every row of ``D``."""
        if D.n_tags != len(self.dictionary) or (self.dictionary and D.dictionary != self.dictionary):
            raise DictionaryMismatchError("tag dictionary differs from the one the tree was fit on")
        out = np.empty(D.n_samples, dtype=np.intp)
        for i, row in enumerate(D.values):
            node = self.nodes[0]
            while not node.is_leaf:
                node = self.nodes[node.present if row[node.tag] else node.absent]
            out[i] = node.leaf
        return out

    def leaf_paths(self) -> dict[int, list[str]]:
        """Conditions on the path to each leaf; "!" marks an absent tag."""
        paths: dict[int, list[str]] = {}

        def walk(idx, conds):
            node = self.nodes[idx]
            if node.is_leaf:
                paths[node.leaf] = conds
                return
            label = self.dictionary[node.tag]
            walk(node.present, conds + [label])
            walk(node.absent, conds + ["!" + label])

        walk(0, [])
        return dict(sorted(paths.items()))


def _best_split(values: np.ndarray, tags: np.ndarray, min_samples_leaf: int):
    """(gain, tag) of the best present/absent split of one node, or (0, None)."""
    n = len(values)
    centred = values - values.mean(axis=0)
    sq = np.einsum("ij,ij->i", centred, centred)
    total = sq.sum()
    counts = tags.sum(axis=0)
    valid = (counts >= min_samples_leaf) & (n - counts >= min_samples_leaf) & (counts > 0) & (counts < n)
    if not valid.any():
        return 0.0, None
    T = tags.astype(float)
    sums_in = T.T @ centred
    sums_out = centred.sum(axis=0) - sums_in
    with np.errstate(divide="ignore", invalid="ignore"):
        sse_in = T.T @ sq - np.einsum("ij,ij->i", sums_in, sums_in) / counts
        sse_out = (total - T.T @ sq) - np.einsum("ij,ij->i", sums_out, sums_out) / (n - counts)
    gain = np.where(valid, total - sse_in - sse_out, -np.inf)
    p = int(np.argmax(gain))
    return float(gain[p]), p


def fit_tree(W: ImportanceMatrix, D: TagMatrix, k: int, min_samples_leaf: int = 1) -> TreeCohortModel:
    """Grow a best-first tree with at most ``k`` leaves.

    Stops early, with ``early_stopped=True``, when no split of any leaf gives
    a strictly positive reduction in squared deviation.
    """
    validate_inputs(W, D)
    n = W.n_samples
    if not 1 <= k <= n:
        raise KTooLargeError(f"k={k} must lie in 1..{n}")
    values, tags = W.values, D.values
    root_centred = values - values.mean(axis=0)
    floor = MIN_RELATIVE_GAIN * float(np.einsum("ij,ij->", root_centred, root_centred))

    # mutable build records: [tag, present, absent] per node, plus member indices
    build = [[None, None, None]]
    members = {0: np.arange(n)}
    candidates = {0: _best_split(values, tags, min_samples_leaf)}
    gains = []
    early = False
    while len(members) < k:
        leaf = max(candidates, key=lambda j: (candidates[j][0], -j))
        gain, tag = candidates[leaf]
        if tag is None or gain <= floor or gain <= 0:
            early = True
            break
        idx = members.pop(leaf)
        del candidates[leaf]
        mask = tags[idx, tag]
        for side in (idx[mask], idx[~mask]):
            j = len(build)
            build.append([None, None, None])
            members[j] = side
            candidates[j] = _best_split(values[side], tags[side], min_samples_leaf)
        build[leaf] = [tag, len(build) - 2, len(build) - 1]
        gains.append(gain)

    raw = np.empty(n, dtype=np.intp)
    for j, idx in members.items():
        raw[idx] = j
    partition = canonicalize(raw)
    node_to_leaf = {int(raw[i]): g for i, g in zip(range(n), partition.assignment)}
    nodes = tuple(
        TreeNode(leaf=node_to_leaf[j]) if b[0] is None else TreeNode(int(b[0]), b[1], b[2])
        for j, b in enumerate(build)
    )
    labels = partition.labels
    means = np.stack([values[labels == t].mean(axis=0) for t in range(partition.k)])
    return TreeCohortModel(
        nodes=nodes,
        leaf_means=means,
        partition=partition,
        early_stopped=early,
        split_gains=tuple(gains),
        feature_names=W.feature_names,
        dictionary=D.dictionary,
    )


def tree_predict_importance(model: TreeCohortModel, D_eval: TagMatrix) -> np.ndarray:
    """Each evaluation sample gets the mean importance of the single leaf it reaches."""
    return model.leaf_means[model.apply(D_eval) - 1]


class RepidTreeExplainer(BaseEstimator):
    """Estimator wrapper: ``fit(tags, importances)``, ``predict(tags)``.

    Parameters
    ----------
    n_cohorts : int
        Maximum number of leaves.
    min_samples_leaf : int
        Smallest allowed leaf.
    """

    def __init__(self, n_cohorts=2, min_samples_leaf=1):
        self.n_cohorts = n_cohorts
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, y):
        D = as_tags(X)
        W = as_importances(y)
        self.model_ = fit_tree(W, D, self.n_cohorts, self.min_samples_leaf)
        self.labels_ = np.asarray(self.model_.partition.assignment)
        self.cohort_means_ = self.model_.leaf_means
        self.dictionary_ = D.dictionary
        return self

    def apply(self, X):
        check_is_fitted(self, "model_")
        return self.model_.apply(as_tags(X, self.dictionary_))

    def predict(self, X):
        check_is_fitted(self, "model_")
        return tree_predict_importance(self.model_, as_tags(X, self.dictionary_))

    def score(self, X, y):
        """Negative mean squared importance prediction error per sample."""
        return -float(squared_errors(as_importances(y).values, self.predict(X)).mean())
