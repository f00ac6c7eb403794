"""Objective functions over a partition: compactness and descriptiveness."""

from __future__ import annotations

import numpy as np

from .core import ImportanceMatrix, Partition, TagMatrix
from .exceptions import DimensionMismatchError


def _check_rows(n_rows: int, partition: Partition, what: str) -> None:
    if partition.n_samples != n_rows:
        raise DimensionMismatchError(
            f"partition covers {partition.n_samples} samples, {what} have {n_rows} rows"
        )


def cohort_compactness(values: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Per-cohort sum of squared pairwise distances, each unordered pair once.

    Uses n_t * sum ||w_i||^2 - ||sum w_i||^2, so the cost is linear in n.
    """
    values = np.asarray(values, dtype=float)
    sizes = np.bincount(labels, minlength=k).astype(float)
    sums = np.zeros((k, values.shape[1]))
    np.add.at(sums, labels, values)
    sumsq = np.bincount(labels, weights=np.einsum("ij,ij->i", values, values), minlength=k)
    out = sizes * sumsq - np.einsum("ij,ij->i", sums, sums)
    # cancellation can leave tiny negatives for near-identical rows
    return np.maximum(out, 0.0)


def compactness(W: ImportanceMatrix, partition: Partition) -> float:
    _check_rows(W.n_samples, partition, "importances")
    return float(cohort_compactness(W.values, partition.labels, partition.k).sum())


def derive_tag_sets(D: TagMatrix, partition: Partition) -> tuple[tuple[int, ...], ...]:
    """Tags satisfied by every member, per cohort (0-based tag indices)."""
    _check_rows(D.n_samples, partition, "tags")
    labels = partition.labels
    out = []
    for t in range(partition.k):
        shared = D.values[labels == t].all(axis=0)
        out.append(tuple(np.flatnonzero(shared).tolist()))
    return tuple(out)


def descriptiveness(D: TagMatrix, partition: Partition) -> int:
    return min(len(s) for s in derive_tag_sets(D, partition))
