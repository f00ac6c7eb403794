import numpy as np
import pytest

from conftest import two_region
from taghort.core import CohortModel, ImportanceMatrix, Partition, TagMatrix
from taghort.exceptions import DictionaryMismatchError
from taghort.metrics import (
    evaluate_model,
    importance_prediction_error,
    match_cohorts,
    predict_importance,
)
from taghort.solver import solve


def _model(W, D, assignment):
    W, D = ImportanceMatrix(np.asarray(W, float)), TagMatrix(np.asarray(D))
    return CohortModel.from_partition(W, D, Partition(tuple(assignment), max(assignment)))


def test_perfect_prediction_is_zero():
    W = [[1.0, 2.0], [1.0, 2.0], [-3.0, 0.5]]
    D = [[1, 0], [1, 0], [0, 1]]
    model = _model(W, D, (1, 1, 2))
    err = importance_prediction_error(model, ImportanceMatrix(np.array(W)), TagMatrix(np.array(D)))
    assert err == 0.0


def test_two_matching_cohorts_are_averaged():
    model = _model([[1.0, 0.0], [0.0, 1.0]], [[1], [1]], (1, 2))
    err = importance_prediction_error(
        model, ImportanceMatrix(np.array([[1.0, 0.0]])), TagMatrix(np.array([[1]]))
    )
    assert abs(err - 0.5) <= 1e-12


def test_empty_evaluation_set():
    model = _model([[1.0, 0.0], [0.0, 1.0]], [[1], [1]], (1, 2))
    err = importance_prediction_error(
        model, ImportanceMatrix(np.zeros((0, 2))), TagMatrix(np.zeros((0, 1)))
    )
    assert err == 0.0


def test_exact_match_selects_one_cohort():
    D = [[1, 0, 1, 0], [0, 1, 0, 1]]
    model = _model([[1.0], [2.0]], D, (1, 2))
    Z = match_cohorts(model, TagMatrix(np.array([[1, 0, 1, 0]])))
    assert Z.matches == ((1,),)
    assert not Z.fallback_used


def test_shared_description_matches_both():
    model = _model([[1.0], [2.0]], [[1, 1], [1, 1]], (1, 2))
    assert match_cohorts(model, TagMatrix(np.array([[1, 1]]))).matches == ((1, 2),)


def test_no_match_uses_fallback():
    W = [[1.0, 0.0], [0.0, 3.0]]
    model = _model(W, [[1, 0, 1, 0], [0, 1, 0, 1]], (1, 2))
    D_eval = TagMatrix(np.array([[1, 1, 0, 0]]))
    Z = match_cohorts(model, D_eval)
    assert Z.matches == ((),)
    assert Z.fallback_used and Z.coverage == 0.0
    pred, empty = predict_importance(model, D_eval)
    np.testing.assert_array_equal(pred[0], np.mean(W, axis=0))
    assert empty.tolist() == [True]


def test_disjoint_cohorts_reduce_to_single_mean():
    W, D, regions = two_region(6)
    model = solve(W, D, 2).model
    pred, empty = predict_importance(model, D)
    assert not empty.any()
    expected = model.cohort_means[model.partition.labels]
    np.testing.assert_array_equal(pred, expected)


def test_dictionary_mismatch():
    model = _model([[1.0], [2.0]], [[1, 0], [0, 1]], (1, 2))
    with pytest.raises(DictionaryMismatchError):
        match_cohorts(model, TagMatrix(np.ones((1, 3), dtype=int)))
    with pytest.raises(DictionaryMismatchError):
        match_cohorts(model, TagMatrix(np.ones((1, 2), dtype=int), ("a", "b")))


def test_adding_tags_never_loses_matches():
    rng = np.random.default_rng(4)
    D = (rng.random((12, 6)) < 0.6).astype(int)
    model = _model(rng.normal(size=(12, 2)), D, (1, 2, 3) * 4)
    eval_tags = (rng.random((30, 6)) < 0.5).astype(int)
    more = eval_tags | (rng.random((30, 6)) < 0.3)
    before = match_cohorts(model, TagMatrix(eval_tags)).matches
    after = match_cohorts(model, TagMatrix(more.astype(int))).matches
    for a, b in zip(before, after):
        assert set(a) <= set(b)


def test_k1_relative_means_exactly_zero():
    rng = np.random.default_rng(1)
    W = ImportanceMatrix(rng.normal(size=(17, 3)) * 1e3)
    D = TagMatrix((rng.random((17, 4)) < 0.5).astype(int))
    model = solve(W, D, 1).model
    ev = evaluate_model(model, W, D)
    assert np.all(ev.relative_means == 0.0)


def test_fixture_cohort_means_match_region_means():
    W, D, regions = two_region(10)
    model = solve(W, D, 2).model
    for t in range(2):
        region = regions[model.partition.labels == t][0]
        analytic = W.values[regions == region].mean(axis=0)
        np.testing.assert_allclose(model.cohort_means[t], analytic, atol=1e-9)


def test_singleton_model_reports_zero_compactness(small_pair):
    W, D = small_pair
    ev = evaluate_model(solve(W, D, 3).model, W, D)
    assert ev.compactness == 0.0
    assert ev.prediction_error >= 0.0
