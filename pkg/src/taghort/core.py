"""Shared data model: importance matrices, tag matrices, partitions, cohort models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    EmptyCohortError,
    NonBinaryError,
    NonFiniteError,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_names(names: Sequence[str], width: int, what: str) -> tuple[str, ...]:
    names = tuple(str(x) for x in names)
    if len(names) != width:
        raise DimensionMismatchError(
            f"{what} has {len(names)} entries but the matrix has {width} columns"
        )
    if len(set(names)) != len(names):
        raise ValueError(f"{what} entries must be unique")
    return names


@dataclass(frozen=True, eq=False)
class ImportanceMatrix:
    """n x m local importance scores, one row per sample."""

    values: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        # zero rows are allowed so that empty evaluation sets can be scored
        if values.ndim != 2 or values.shape[1] < 1:
            raise DimensionMismatchError(
                f"importances must be a 2-d matrix with at least one column, got shape {values.shape}"
            )
        bad = ~np.isfinite(values)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise NonFiniteError(f"non-finite importance at row {i}, column {j}")
        names = self.feature_names or [f"f{j}" for j in range(values.shape[1])]
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(
            self, "feature_names", _check_names(names, values.shape[1], "feature_names")
        )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def take(self, rows) -> "ImportanceMatrix":
        return ImportanceMatrix(self.values[rows], self.feature_names)


@dataclass(frozen=True, eq=False)
class TagMatrix:
    """n x r binary tag matrix with its dictionary of tag labels."""

    values: np.ndarray
    dictionary: tuple[str, ...] = ()

    def __post_init__(self):
        raw = np.asarray(self.values)
        if raw.ndim != 2:
            raise DimensionMismatchError(f"tags must be a 2-d matrix, got shape {raw.shape}")
        if raw.dtype != bool:
            if raw.dtype.kind not in "biuf" or not np.isin(raw, (0, 1)).all():
                raise NonBinaryError("tag matrix entries must be 0 or 1")
        values = raw.astype(bool)
        names = self.dictionary or [f"t{p}" for p in range(values.shape[1])]
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(
            self, "dictionary", _check_names(names, values.shape[1], "dictionary")
        )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_tags(self) -> int:
        return self.values.shape[1]

    def take(self, rows) -> "TagMatrix":
        return TagMatrix(self.values[rows], self.dictionary)

    def bitsets(self) -> list[int]:
        """Each row packed into an int, bit p set iff the sample has tag p."""
        weights = [1 << p for p in range(self.n_tags)]
        return [sum(w for w, b in zip(weights, row) if b) for row in self.values.tolist()]

    def labels(self, tag_indices) -> list[str]:
        return [self.dictionary[p] for p in tag_indices]


@dataclass(frozen=True)
class Partition:
    """Canonical cohort assignment with 1-based labels."""

    assignment: tuple[int, ...]
    k: int

    def __post_init__(self):
        assignment = tuple(int(g) for g in self.assignment)
        object.__setattr__(self, "assignment", assignment)
        if not assignment:
            raise ValueError("assignment must be non-empty")
        if self.k < 1:
            raise ValueError("k must be positive")
        next_label = 1
        for g in assignment:
            if g < 1 or g > self.k:
                raise ValueError(f"cohort label {g} outside 1..{self.k}")
            if g > next_label:
                raise ValueError(
                    "assignment is not canonical: label "
                    f"{g} appears before label {next_label}"
                )
            if g == next_label:
                next_label += 1
        if next_label - 1 != self.k:
            raise EmptyCohortError(
                f"only {next_label - 1} of {self.k} cohorts are non-empty"
            )

    @property
    def n_samples(self) -> int:
        return len(self.assignment)

    @property
    def labels(self) -> np.ndarray:
        """Zero-based labels as an int array."""
        return np.asarray(self.assignment, dtype=np.intp) - 1

    def members(self, t: int) -> np.ndarray:
        """Sample indices of 1-based cohort ``t``."""
        return np.flatnonzero(self.labels == t - 1)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def canonicalize(assignment: Sequence, k: int | None = None) -> Partition:
    """Relabel cohorts 1..k in order of first occurrence.

    The set partition (which samples share a cohort) is unchanged. If ``k`` is
    given and fewer than ``k`` distinct labels occur, ``EmptyCohortError`` is
    raised.
    """
    if len(assignment) == 0:
        raise ValueError("assignment must be non-empty")
    relabel: dict = {}
    out = []
    for g in assignment:
        key = g.item() if isinstance(g, np.generic) else g
        if key not in relabel:
            relabel[key] = len(relabel) + 1
        out.append(relabel[key])
    used = len(relabel)
    if k is not None and used != k:
        if used < k:
            raise EmptyCohortError(f"only {used} of {k} cohorts are non-empty")
        raise ValueError(f"assignment uses {used} distinct labels, more than k={k}")
    return Partition(tuple(out), used)


@dataclass(frozen=True, eq=False)
class CohortModel:
    """A solved cohort explanation.

    ``tag_sets[t]`` holds the (0-based) tag indices shared by every member of
    cohort ``t + 1``; ``cohort_means[t]`` is that cohort's mean importance row.
    """

    partition: Partition
    tag_sets: tuple[tuple[int, ...], ...]
    cohort_means: np.ndarray
    descriptiveness: int
    compactness: float
    feature_names: tuple[str, ...] = ()
    dictionary: tuple[str, ...] = ()
    sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "cohort_means", _frozen(np.asarray(self.cohort_means, float)))
        object.__setattr__(self, "sizes", _frozen(self.partition.sizes()))
        object.__setattr__(self, "tag_sets", tuple(tuple(int(p) for p in s) for s in self.tag_sets))

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def n_tags(self) -> int:
        return len(self.dictionary)

    @property
    def global_mean(self) -> np.ndarray:
        """Mean importance over all training samples."""
        return self.sizes @ self.cohort_means / self.sizes.sum()

    def tag_labels(self) -> list[list[str]]:
        return [[self.dictionary[p] for p in s] for s in self.tag_sets]

    def description_matrix(self) -> np.ndarray:
        """k x r boolean matrix, True where a tag describes a cohort."""
        S = np.zeros((self.k, self.n_tags), dtype=bool)
        for t, tags in enumerate(self.tag_sets):
            S[t, list(tags)] = True
        return S

    @classmethod
    def from_partition(cls, W: ImportanceMatrix, D: TagMatrix, partition: Partition) -> "CohortModel":
        from .objectives import compactness, derive_tag_sets

        validate_inputs(W, D)
        if partition.n_samples != W.n_samples:
            raise DimensionMismatchError(
                f"partition covers {partition.n_samples} samples, importances have {W.n_samples}"
            )
        labels = partition.labels
        # same reduction as W.values.mean(axis=0), so k=1 reproduces it bit for bit
        means = np.stack([W.values[labels == t].mean(axis=0) for t in range(partition.k)])
        tag_sets = derive_tag_sets(D, partition)
        return cls(
            partition=partition,
            tag_sets=tag_sets,
            cohort_means=means,
            descriptiveness=min(len(s) for s in tag_sets),
            compactness=compactness(W, partition),
            feature_names=W.feature_names,
            dictionary=D.dictionary,
        )


def validate_inputs(W: ImportanceMatrix, D: TagMatrix) -> None:
    """Check a paired importance/tag input; raises on the first violation.

    Type invariants (finite importances, binary tags, unique names) are
    enforced when the matrices are built, so raw arrays are accepted too and
    converted here.
    """
    if not isinstance(W, ImportanceMatrix):
        W = ImportanceMatrix(W)
    if not isinstance(D, TagMatrix):
        D = TagMatrix(D)
    if W.n_samples != D.n_samples:
        raise DimensionMismatchError(
            f"importances have {W.n_samples} rows but tags have {D.n_samples}"
        )
    if W.n_samples == 0:
        raise DimensionMismatchError("at least one sample is required")
