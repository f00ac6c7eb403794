"""Choose the number of cohorts by cross-validated importance prediction error."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
from joblib import Parallel, delayed
from sklearn.model_selection import KFold

from .core import CohortModel, ImportanceMatrix, TagMatrix, validate_inputs
from .exceptions import KTooLargeError
from .metrics import predict_importance, squared_errors
from .objectives import derive_tag_sets
from .repid import fit_tree, tree_predict_importance
from .solver import SolverOptions, solve

N_JOBS_ENV = "TAGHORT_N_JOBS"

Method = Literal["taghort", "repid"]


def default_n_jobs() -> int:
    return int(os.environ.get(N_JOBS_ENV, "1"))


@dataclass(frozen=True)
class SweepConfig:
    k_values: Sequence[int] = (1, 2, 3, 4)
    folds: int = 5
    rng_seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)
    min_samples_leaf: int = 1
    n_jobs: int | None = None
    # errors within this absolute distance of the minimum count as ties
    selection_tolerance: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        if not self.k_values:
            raise ValueError("k_values must be non-empty")
        if min(self.k_values) < 1:
            raise ValueError("every k must be at least 1")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")


@dataclass(frozen=True)
class FoldRecord:
    k: int
    fold: int
    n_train: int
    n_valid: int
    train_compactness: float
    train_descriptiveness: int
    validation_error: float
    validation_mean_error: float
    fallback_rate: float
    proven_optimal: bool


@dataclass(frozen=True)
class KSummary:
    k: int
    mean_error: float
    std_error: float
    mean_compactness: float
    std_compactness: float
    mean_descriptiveness: float
    std_descriptiveness: float
    mean_fallback_rate: float


@dataclass(frozen=True)
class SweepReport:
    method: str
    records: tuple[FoldRecord, ...]
    summaries: tuple[KSummary, ...]
    selected_k: int
    folds: tuple[tuple[int, ...], ...]

    def summary(self, k: int) -> KSummary:
        return next(s for s in self.summaries if s.k == k)


def fold_indices(n: int, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(splitter.split(np.zeros((n, 1))))


def _run_one(method, W, D, k, fold, train, valid, config) -> FoldRecord:
    W_train, D_train = W.take(train), D.take(train)
    W_valid, D_valid = W.take(valid), D.take(valid)
    if method == "taghort":
        result = solve(W_train, D_train, k, config.solver)
        model: CohortModel = result.model
        pred, empty = predict_importance(model, D_valid)
        compactness, desc, proven = model.compactness, model.descriptiveness, result.proven_optimal
    else:
        tree = fit_tree(W_train, D_train, k, config.min_samples_leaf)
        pred = tree_predict_importance(tree, D_valid)
        empty = np.zeros(len(valid), dtype=bool)
        model = CohortModel.from_partition(W_train, D_train, tree.partition)
        compactness = model.compactness
        desc = min(len(s) for s in derive_tag_sets(D_train, tree.partition))
        proven = False
    errors = squared_errors(W_valid.values, pred)
    return FoldRecord(
        k=k,
        fold=fold,
        n_train=len(train),
        n_valid=len(valid),
        train_compactness=float(compactness),
        train_descriptiveness=int(desc),
        validation_error=float(errors.sum()),
        validation_mean_error=float(errors.mean()),
        fallback_rate=float(empty.mean()),
        proven_optimal=bool(proven),
    )


def select_k(summaries: Sequence[KSummary], tolerance: float = 1e-12) -> int:
    """Smallest k whose mean error is within ``tolerance`` of the minimum."""
    best = min(s.mean_error for s in summaries)
    return min(s.k for s in summaries if s.mean_error <= best + tolerance)


def sweep(
    W: ImportanceMatrix,
    D: TagMatrix,
    config: SweepConfig = SweepConfig(),
    method: Method = "taghort",
) -> SweepReport:
    """Cross-validate every candidate k and pick the one with the lowest error.

    The error compared across k is the per-sample mean validation error,
    averaged over folds. Each (k, fold) fit is independent; they run in
    parallel when ``n_jobs`` (or the TAGHORT_N_JOBS variable) exceeds 1.
    """
    validate_inputs(W, D)
    if method not in ("taghort", "repid"):
        raise ValueError(f"unknown method {method!r}")
    n = W.n_samples
    if config.folds > n:
        raise KTooLargeError(f"{config.folds} folds need at least as many samples, got {n}")
    splits = fold_indices(n, config.folds, config.rng_seed)
    smallest = min(len(train) for train, _ in splits)
    if max(config.k_values) > smallest:
        raise KTooLargeError(
            f"k={max(config.k_values)} exceeds the smallest training fold ({smallest} samples)"
        )
    jobs = [
        (k, f, train, valid)
        for k in config.k_values
        for f, (train, valid) in enumerate(splits)
    ]
    n_jobs = config.n_jobs if config.n_jobs is not None else default_n_jobs()
    records = Parallel(n_jobs=n_jobs)(
        delayed(_run_one)(method, W, D, k, f, train, valid, config) for k, f, train, valid in jobs
    )
    summaries = []
    for k in config.k_values:
        rows = [r for r in records if r.k == k]
        err = np.array([r.validation_mean_error for r in rows])
        comp = np.array([r.train_compactness for r in rows])
        desc = np.array([r.train_descriptiveness for r in rows], dtype=float)
        summaries.append(
            KSummary(
                k=k,
                mean_error=float(err.mean()),
                std_error=float(err.std()),
                mean_compactness=float(comp.mean()),
                std_compactness=float(comp.std()),
                mean_descriptiveness=float(desc.mean()),
                std_descriptiveness=float(desc.std()),
                mean_fallback_rate=float(np.mean([r.fallback_rate for r in rows])),
            )
        )
    return SweepReport(
        method=method,
        records=tuple(records),
        summaries=tuple(summaries),
        selected_k=select_k(summaries, config.selection_tolerance),
        folds=tuple(tuple(valid.tolist()) for _, valid in splits),
    )
