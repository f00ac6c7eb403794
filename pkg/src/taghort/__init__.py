"""Tag-based cohort explanations of local feature importance."""

__version__ = "0.1.0"

from .core import (
    CohortModel,
    ImportanceMatrix,
    Partition,
    TagMatrix,
    canonicalize,
    validate_inputs,
)
from .estimator import TagCohortExplainer
from .metrics import (
    MatchSet,
    evaluate_model,
    importance_prediction_error,
    match_cohorts,
)
from .model_selection import SweepConfig, SweepReport, sweep
from .objectives import compactness, derive_tag_sets, descriptiveness
from .preprocess import (
    FeatureTable,
    OneHot,
    Passthrough,
    Quantile,
    TagDerivationConfig,
    TagEncoder,
    derive_tags,
    quantile_edges,
)
from .repid import RepidTreeExplainer, TreeCohortModel, fit_tree, tree_predict_importance
from .solver import SolveResult, SolverOptions, solve
from .synthetic import TwoRegionSpec, generate

__all__ = [
    "CohortModel",
    "FeatureTable",
    "ImportanceMatrix",
    "MatchSet",
    "OneHot",
    "Partition",
    "Passthrough",
    "Quantile",
    "RepidTreeExplainer",
    "SolveResult",
    "SolverOptions",
    "SweepConfig",
    "SweepReport",
    "TagCohortExplainer",
    "TagDerivationConfig",
    "TagEncoder",
    "TagMatrix",
    "TreeCohortModel",
    "TwoRegionSpec",
    "canonicalize",
    "compactness",
    "derive_tag_sets",
    "derive_tags",
    "descriptiveness",
    "evaluate_model",
    "fit_tree",
    "generate",
    "importance_prediction_error",
    "match_cohorts",
    "quantile_edges",
    "solve",
    "sweep",
    "tree_predict_importance",
    "validate_inputs",
]
