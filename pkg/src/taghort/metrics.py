"""Importance prediction error, cohort matching and per-model evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CohortModel, ImportanceMatrix, TagMatrix
from .exceptions import DictionaryMismatchError, DimensionMismatchError


@dataclass(frozen=True)
class MatchSet:
    """Cohorts (1-based) whose full description each evaluation sample satisfies."""

    matches: tuple[tuple[int, ...], ...]

    @property
    def empty(self) -> np.ndarray:
        return np.array([len(z) == 0 for z in self.matches], dtype=bool)

    @property
    def fallback_used(self) -> bool:
        return bool(self.empty.any())

    @property
    def coverage(self) -> float:
        """Fraction of samples matching at least one cohort (1.0 for no samples)."""
        return 1.0 - float(self.empty.mean()) if self.matches else 1.0


def _check_dictionary(model: CohortModel, D_eval: TagMatrix) -> None:
    if D_eval.n_tags != model.n_tags:
        raise DictionaryMismatchError(
            f"evaluation tags have {D_eval.n_tags} columns, model was fit on {model.n_tags}"
        )
    if model.dictionary and D_eval.dictionary != model.dictionary:
        raise DictionaryMismatchError("evaluation tag dictionary differs from the model's")


def match_matrix(model: CohortModel, D_eval: TagMatrix) -> np.ndarray:
    """l x k boolean matrix, True where sample i satisfies every tag of cohort t."""
    _check_dictionary(model, D_eval)
    S = model.description_matrix().astype(np.int64)
    missing = (~D_eval.values).astype(np.int64) @ S.T
    return missing == 0


def match_cohorts(model: CohortModel, D_eval: TagMatrix) -> MatchSet:
    Z = match_matrix(model, D_eval)
    return MatchSet(tuple(tuple((np.flatnonzero(z) + 1).tolist()) for z in Z))


def predict_importance(model: CohortModel, D_eval: TagMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Predicted importance rows and a mask of samples that used the fallback.

    A sample matching several cohorts gets the unweighted average of their
    means. One matching no cohort gets the training-set mean importance.
    """
    Z = match_matrix(model, D_eval).astype(float)
    hits = Z.sum(axis=1)
    empty = hits == 0
    pred = np.empty((D_eval.n_samples, model.cohort_means.shape[1]))
    pred[~empty] = (Z[~empty] @ model.cohort_means) / hits[~empty, None]
    pred[empty] = model.global_mean
    return pred, empty


def squared_errors(W_eval: np.ndarray, pred: np.ndarray) -> np.ndarray:
    diff = np.asarray(W_eval, dtype=float) - pred
    return np.einsum("ij,ij->i", diff, diff)


def importance_prediction_error(model: CohortModel, W_eval: ImportanceMatrix, D_eval: TagMatrix) -> float:
    """Summed squared error of predicting held-out importances from their tags."""
    if D_eval.n_samples == 0:
        _check_dictionary(model, D_eval)
        return 0.0
    if W_eval.n_samples != D_eval.n_samples:
        raise DimensionMismatchError(
            f"importances have {W_eval.n_samples} rows but tags have {D_eval.n_samples}"
        )
    if W_eval.n_features != model.cohort_means.shape[1]:
        raise DimensionMismatchError(
            f"model has {model.cohort_means.shape[1]} importance columns, evaluation has {W_eval.n_features}"
        )
    pred, _ = predict_importance(model, D_eval)
    return float(squared_errors(W_eval.values, pred).sum())


@dataclass(frozen=True)
class ModelEvaluation:
    k: int
    compactness: float
    descriptiveness: int
    sizes: tuple[int, ...]
    cohort_means: np.ndarray
    relative_means: np.ndarray
    prediction_error: float
    mean_prediction_error: float
    fallback_rate: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "compactness": self.compactness,
            "descriptiveness": self.descriptiveness,
            "sizes": list(self.sizes),
            "cohort_means": self.cohort_means.tolist(),
            "relative_means": self.relative_means.tolist(),
            "prediction_error": self.prediction_error,
            "mean_prediction_error": self.mean_prediction_error,
            "fallback_rate": self.fallback_rate,
        }


def evaluate_model(model: CohortModel, W: ImportanceMatrix, D: TagMatrix) -> ModelEvaluation:
    """Objectives and prediction error of ``model`` on (W, D).

    ``relative_means`` is each cohort mean minus the mean importance of W,
    so a one-cohort model evaluated on its own training data gives zeros.
    """
    if W.n_samples != D.n_samples:
        raise DimensionMismatchError(
            f"importances have {W.n_samples} rows but tags have {D.n_samples}"
        )
    pred, empty = predict_importance(model, D)
    errors = squared_errors(W.values, pred)
    dataset_mean = W.values.mean(axis=0)
    relative = model.cohort_means - dataset_mean
    return ModelEvaluation(
        k=model.k,
        compactness=model.compactness,
        descriptiveness=model.descriptiveness,
        sizes=tuple(int(s) for s in model.sizes),
        cohort_means=model.cohort_means,
        relative_means=relative,
        prediction_error=float(errors.sum()),
        mean_prediction_error=float(errors.mean()),
        fallback_rate=float(empty.mean()),
    )
