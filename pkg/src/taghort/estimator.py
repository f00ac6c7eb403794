"""scikit-learn style front end to the tag-based cohort solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_importances, as_tags
from .metrics import match_cohorts, predict_importance, squared_errors
from .solver import SolverOptions, solve


class TagCohortExplainer(BaseEstimator):
    """Partition samples into cohorts described by shared tags.

    The estimator treats cohort explanation as regression from tags to local
    importances: ``fit(tags, importances)`` solves for ``n_cohorts`` cohorts,
    and ``predict(tags)`` returns, for each row, the average mean importance
    of every cohort whose description the row satisfies.

    Parameters
    ----------
    n_cohorts : int, default=2
    mode : {"auto", "exact", "heuristic"}, default="auto"
        "auto" runs the exact branch and bound up to ``exact_sample_limit``
        samples and the local search above it.
    time_limit : float or None
        Seconds; on expiry the best partition found so far is kept.
    exact_sample_limit : int, default=30
    restarts : int, default=16
        Local search restarts.
    random_state : int, default=0
    compactness_tolerance : float, default=1e-9

    Attributes
    ----------
    model_ : CohortModel
    labels_ : ndarray of shape (n_samples,)
        Canonical 1-based cohort labels of the training rows.
    tag_sets_ : list of list of str
        Tag labels describing each cohort.
    cohort_means_ : ndarray of shape (n_cohorts, n_features)
    descriptiveness_ : int
    compactness_ : float
    proven_optimal_ : bool
    result_ : SolveResult
    """

    def __init__(
        self,
        n_cohorts=2,
        mode="auto",
        time_limit=None,
        exact_sample_limit=30,
        restarts=16,
        random_state=0,
        compactness_tolerance=1e-9,
    ):
        self.n_cohorts = n_cohorts
        self.mode = mode
        self.time_limit = time_limit
        self.exact_sample_limit = exact_sample_limit
        self.restarts = restarts
        self.random_state = random_state
        self.compactness_tolerance = compactness_tolerance

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            mode=self.mode,
            time_limit=self.time_limit,
            exact_sample_limit=self.exact_sample_limit,
            restarts=self.restarts,
            rng_seed=self.random_state,
            compactness_tolerance=self.compactness_tolerance,
        )

    def fit(self, X, y):
        D = as_tags(X)
        W = as_importances(y)
        self.result_ = solve(W, D, self.n_cohorts, self.solver_options())
        model = self.model_ = self.result_.model
        self.labels_ = np.asarray(model.partition.assignment)
        self.tag_sets_ = model.tag_labels()
        self.cohort_means_ = model.cohort_means
        self.descriptiveness_ = model.descriptiveness
        self.compactness_ = model.compactness
        self.proven_optimal_ = self.result_.proven_optimal
        self.dictionary_ = D.dictionary
        self.feature_names_ = W.feature_names
        return self

    def match(self, X):
        check_is_fitted(self, "model_")
        return match_cohorts(self.model_, as_tags(X, self.dictionary_))

    def predict(self, X):
        check_is_fitted(self, "model_")
        pred, _ = predict_importance(self.model_, as_tags(X, self.dictionary_))
        return pred

    def score(self, X, y):
        """Negative mean squared importance prediction error per sample."""
        return -float(squared_errors(as_importances(y).values, self.predict(X)).mean())
