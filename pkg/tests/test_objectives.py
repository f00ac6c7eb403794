import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_descriptiveness, pairwise_compactness, shared_tags
from taghort.core import ImportanceMatrix, Partition, TagMatrix, canonicalize
from taghort.exceptions import DimensionMismatchError
from taghort.objectives import cohort_compactness, compactness, derive_tag_sets, descriptiveness


def test_all_singletons_have_zero_compactness():
    W = ImportanceMatrix(np.arange(8.0).reshape(4, 2))
    assert compactness(W, Partition((1, 2, 3, 4), 4)) == 0.0


def test_single_pair_distance():
    W = ImportanceMatrix(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert compactness(W, Partition((1, 1), 1)) == 25.0


def test_duplicate_member_counts_each_pair_once():
    W = ImportanceMatrix(np.array([[0.0, 0.0], [3.0, 4.0], [3.0, 4.0]]))
    assert compactness(W, Partition((1, 1, 1), 1)) == 50.0


def test_descriptiveness_hand_and(small_pair):
    _, D = small_pair
    P = Partition((1, 1, 2), 2)
    assert derive_tag_sets(D, P) == ((0, 3), (1, 2, 3))
    assert descriptiveness(D, P) == 2


def test_singletons_give_min_row_count():
    D = TagMatrix(np.array([[1, 1, 0], [1, 0, 0], [1, 1, 1]]))
    assert descriptiveness(D, Partition((1, 2, 3), 3)) == 1


def test_disjoint_rows_contribute_zero():
    D = TagMatrix(np.array([[1, 0], [0, 1], [1, 1]]))
    assert descriptiveness(D, Partition((1, 1, 2), 2)) == 0


def test_two_row_tag_set():
    D = TagMatrix(np.array([[1, 1], [1, 0]]))
    assert derive_tag_sets(D, Partition((1, 1), 1)) == ((0,),)


def test_whole_dataset_gives_common_tags():
    D = TagMatrix(np.array([[1, 1, 0, 1], [1, 0, 1, 1], [1, 1, 1, 1]]))
    assert derive_tag_sets(D, Partition((1, 1, 1), 1)) == ((0, 3),)


def test_row_count_mismatch():
    with pytest.raises(DimensionMismatchError):
        compactness(ImportanceMatrix(np.zeros((3, 2))), Partition((1, 2), 2))
    with pytest.raises(DimensionMismatchError):
        derive_tag_sets(TagMatrix(np.zeros((3, 2))), Partition((1, 2), 2))


@st.composite
def instances(draw):
    n = draw(st.integers(1, 12))
    m = draw(st.integers(1, 4))
    r = draw(st.integers(1, 6))
    values = draw(st.lists(
        st.floats(-1e3, 1e3, allow_nan=False), min_size=n * m, max_size=n * m
    ))
    tags = draw(st.lists(st.integers(0, 1), min_size=n * r, max_size=n * r))
    labels = draw(st.lists(st.integers(1, n), min_size=n, max_size=n))
    return (np.array(values).reshape(n, m), np.array(tags).reshape(n, r), canonicalize(labels))


@settings(max_examples=200, deadline=None)
@given(instances())
def test_incremental_matches_pairwise(inst):
    W, D, P = inst
    direct = pairwise_compactness(W, P.assignment)
    got = compactness(ImportanceMatrix(W), P)
    assert got == pytest.approx(direct, rel=1e-9, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(instances())
def test_tag_sets_match_naive(inst):
    _, D, P = inst
    naive = shared_tags(D, P.assignment)
    got = derive_tag_sets(TagMatrix(D), P)
    assert [set(s) for s in got] == [naive[g] for g in sorted(naive)]
    assert descriptiveness(TagMatrix(D), P) == naive_descriptiveness(D, P.assignment)


def test_cohort_compactness_is_never_negative():
    row = np.array([[1e8, -1e8]])
    values = np.repeat(row, 5, axis=0)
    out = cohort_compactness(values, np.zeros(5, dtype=int), 1)
    assert out[0] == 0.0
