import math
import time

import numpy as np
import pytest

from conftest import random_instance, two_region
from oracles import (
    adjusted_rand_index,
    brute_force,
    completions,
    constraint_violations,
    naive_descriptiveness,
    pairwise_compactness,
)
from taghort.core import ImportanceMatrix, TagMatrix
from taghort.exceptions import InfeasibleKError
from taghort.solver import (
    SolverOptions,
    compactness_lower_bound,
    descriptiveness_upper_bound,
    solve,
)

EXACT = SolverOptions(mode="exact")
HEUR = SolverOptions(mode="heuristic", restarts=4)


def _bits(row):
    return sum(1 << p for p, v in enumerate(row) if v)


@pytest.mark.parametrize("seed", range(25))
def test_exact_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    W, D = random_instance(rng)
    k = int(rng.integers(2, 4))
    q, best, optimal = brute_force(W, D, k)
    res = solve(ImportanceMatrix(W), TagMatrix(D), k, EXACT)
    assert res.proven_optimal
    assert res.model.descriptiveness == q
    assert res.model.compactness == pytest.approx(best, abs=1e-9)
    # ties go to the lexicographically smallest canonical assignment
    assert res.model.partition.assignment == min(optimal)


def test_k1_single_cohort(small_pair):
    W, D = small_pair
    res = solve(W, D, 1)
    assert res.model.partition.assignment == (1, 1, 1)
    assert res.model.descriptiveness == 1  # only tag 3 is common
    assert res.model.compactness == pytest.approx(pairwise_compactness(W.values, (1, 1, 1)))


def test_kn_all_singletons(small_pair):
    W, D = small_pair
    res = solve(W, D, 3)
    assert res.model.compactness == 0.0
    assert res.model.descriptiveness == int(D.values.sum(axis=1).min())


@pytest.mark.parametrize("k", [0, 4])
def test_k_out_of_range(small_pair, k):
    W, D = small_pair
    with pytest.raises(InfeasibleKError):
        solve(W, D, k)


@pytest.mark.parametrize("mode", ["exact", "heuristic"])
def test_outputs_satisfy_constraints(mode):
    rng = np.random.default_rng(7)
    for _ in range(60):
        W, D = random_instance(rng, n_range=(4, 14), r_range=(2, 8))
        k = int(rng.integers(1, min(5, len(W)) + 1))
        res = solve(ImportanceMatrix(W), TagMatrix(D), k, SolverOptions(mode=mode, restarts=3))
        m = res.model
        assert constraint_violations(D, k, m.partition.assignment, m.tag_sets) == []
        assert m.descriptiveness == naive_descriptiveness(D, m.partition.assignment)
        assert m.compactness == pytest.approx(pairwise_compactness(W, m.partition.assignment))


def test_heuristic_never_beats_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        W, D = random_instance(rng)
        k = int(rng.integers(2, 4))
        ex = solve(ImportanceMatrix(W), TagMatrix(D), k, EXACT).model
        he = solve(ImportanceMatrix(W), TagMatrix(D), k, HEUR).model
        assert he.descriptiveness <= ex.descriptiveness
        if he.descriptiveness == ex.descriptiveness:
            assert he.compactness >= ex.compactness - 1e-9


def test_deterministic_given_seed():
    rng = np.random.default_rng(11)
    W, D = random_instance(rng, n_range=(40, 40), r_range=(6, 6))
    opts = SolverOptions(mode="heuristic", rng_seed=5)
    a = solve(ImportanceMatrix(W), TagMatrix(D), 3, opts).model.partition
    b = solve(ImportanceMatrix(W), TagMatrix(D), 3, opts).model.partition
    assert a == b


def test_fixture_recovers_regions_exact():
    W, D, regions = two_region(10)
    res = solve(W, D, 2, EXACT)
    assert res.proven_optimal
    assert adjusted_rand_index(res.model.partition.assignment, regions) == 1.0


def test_time_limit_returns_feasible_partition():
    rng = np.random.default_rng(0)
    W, D = random_instance(rng, n_range=(28, 28), r_range=(8, 8), density=0.8)
    start = time.monotonic()
    res = solve(ImportanceMatrix(W), TagMatrix(D), 4, SolverOptions(mode="exact", time_limit=0.2))
    assert time.monotonic() - start < 10
    m = res.model
    assert constraint_violations(D, 4, m.partition.assignment, m.tag_sets) == []
    if res.timed_out:
        assert not res.proven_optimal


def _state(W, D, prefix, k):
    """Search-node state for a canonical 1-based prefix."""
    W = np.asarray(W, float)
    m = W.shape[1]
    masks, counts, sums, sumsq = [], [0] * k, np.zeros((k, m)), [0.0] * k
    for i, g in enumerate(prefix):
        t = g - 1
        if t == len(masks):
            masks.append(_bits(D[i]))
        else:
            masks[t] &= _bits(D[i])
        counts[t] += 1
        sums[t] += W[i]
        sumsq[t] += float(W[i] @ W[i])
    cost = pairwise_compactness(W[: len(prefix)], prefix) if prefix else 0.0
    return masks, counts, sums, sumsq, cost


@pytest.mark.parametrize("seed", range(15))
def test_bounds_are_valid_on_every_prefix(seed):
    rng = np.random.default_rng(100 + seed)
    W, D = random_instance(rng, n_range=(5, 7))
    n, k = len(W), int(rng.integers(2, 4))
    bits = [_bits(r) for r in D]
    for cut in range(1, n):
        for prefix in {c[:cut] for c in completions((), n, k)}:
            masks, counts, sums, sumsq, cost = _state(W, D, prefix, k)
            full = list(completions(prefix, n, k))
            best_desc = max((naive_descriptiveness(D, c) for c in full), default=-1)
            ub = descriptiveness_upper_bound(masks, bits[cut:], k)
            assert ub >= best_desc
            for min_tags in range(0, D.shape[1] + 1):
                feas = [pairwise_compactness(W, c) for c in full
                        if naive_descriptiveness(D, c) >= min_tags]
                lb = compactness_lower_bound(
                    W, cost, counts, sums, sumsq, masks,
                    range(cut, n), bits[cut:], k, min_tags,
                )
                if feas:
                    assert lb <= min(feas) + 1e-9
                else:
                    assert lb == math.inf or lb >= 0


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(mode="fast")
    with pytest.raises(ValueError):
        SolverOptions(time_limit=0)
    assert SolverOptions().resolved_mode(30) == "exact"
    assert SolverOptions().resolved_mode(31) == "heuristic"
