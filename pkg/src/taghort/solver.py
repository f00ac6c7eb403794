"""Two-phase descriptive clustering solver.

Phase 1 maximises descriptiveness (the smallest number of tags shared by all
members of a cohort). Phase 2 minimises compactness among partitions whose
descriptiveness is at least the phase-1 optimum.

The exact solver is a depth-first branch and bound that assigns samples in
index order to labels ``0..used`` (opening label ``used`` only when fewer than
``k`` cohorts are open), so every visited assignment is canonical and no
label permutation is explored twice. Tag rows are Python ints; the AND of a
cohort's rows only loses bits as members are added, which gives the
descriptiveness bound.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import CohortModel, ImportanceMatrix, Partition, TagMatrix, canonicalize, validate_inputs
from .exceptions import InfeasibleKError, SolverTimeoutError
from .heuristic import local_search
from .objectives import cohort_compactness

logger = logging.getLogger(__name__)

Mode = Literal["exact", "heuristic", "auto"]


@dataclass(frozen=True)
class SolverOptions:
    mode: Mode = "auto"
    time_limit: float | None = None
    exact_sample_limit: int = 30
    restarts: int = 16
    rng_seed: int = 0
    compactness_tolerance: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("exact", "heuristic", "auto"):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.exact_sample_limit < 1 or self.restarts < 1:
            raise ValueError("exact_sample_limit and restarts must be positive")
        if self.compactness_tolerance < 0:
            raise ValueError("compactness_tolerance must be non-negative")

    def resolved_mode(self, n_samples: int) -> str:
        if self.mode == "auto":
            return "exact" if n_samples <= self.exact_sample_limit else "heuristic"
        return self.mode


@dataclass(frozen=True)
class SolveResult:
    model: CohortModel
    proven_optimal: bool
    phase1_descriptiveness: int
    nodes_explored: int
    wall_time: float
    mode: str
    timed_out: bool = False


class _Timeout(Exception):
    pass


def popcount(x: int) -> int:
    return x.bit_count()


def descriptiveness_upper_bound(open_masks: Sequence[int], remaining: Sequence[int], k: int) -> int:
    """Upper bound on the descriptiveness of any completion of a search node.

    ``open_masks`` are the ANDs of the open cohorts, ``remaining`` the tag rows
    of unassigned samples. Returns -1 when no completion can fill all ``k``
    cohorts.
    """
    need = k - len(open_masks)
    if len(remaining) < need:
        return -1
    bound = min((popcount(m) for m in open_masks), default=math.inf)
    if need > 0:
        # every new cohort is founded by a distinct remaining sample
        pops = sorted((popcount(b) for b in remaining), reverse=True)
        bound = min(bound, pops[need - 1])
    for b in remaining:
        best = max((popcount(m & b) for m in open_masks), default=-1)
        if need > 0:
            best = max(best, popcount(b))
        bound = min(bound, best)
        if bound < 0:
            return -1
    return int(bound)


def compactness_lower_bound(
    values: np.ndarray,
    assigned_cost: float,
    counts: Sequence[int],
    sums: np.ndarray,
    sumsq: Sequence[float],
    open_masks: Sequence[int],
    remaining_idx: Sequence[int],
    remaining_bits: Sequence[int],
    k: int,
    min_tags: int,
) -> float:
    """Lower bound on the compactness of any completion with descriptiveness >= min_tags.

    Pairwise costs between assigned samples are exact (``assigned_cost``). Once
    all ``k`` cohorts are open, each unassigned sample adds at least its
    cheapest cost against the members of a cohort it can still join. Returns
    ``inf`` when some sample has nowhere feasible to go.
    """
    used = len(open_masks)
    if any(popcount(m) < min_tags for m in open_masks):
        return math.inf
    if not len(remaining_idx):
        return assigned_cost if used == k else math.inf
    if len(remaining_idx) < k - used:
        return math.inf
    can_open = used < k
    if used:
        rows = values[list(remaining_idx)]
        sq = np.einsum("ij,ij->i", rows, rows)
        delta = (
            np.asarray(counts[:used], float)[None, :] * sq[:, None]
            + np.asarray(sumsq[:used], float)[None, :]
            - 2.0 * rows @ sums[:used].T
        )
    extra = 0.0
    for r, b in enumerate(remaining_bits):
        best = math.inf
        for t in range(used):
            if popcount(open_masks[t] & b) >= min_tags:
                best = min(best, delta[r, t])
        if can_open and popcount(b) >= min_tags:
            best = 0.0
        if best == math.inf:
            return math.inf
        extra += max(best, 0.0)
    return assigned_cost + extra


class _BranchAndBound:
    def __init__(self, values: np.ndarray, bits: list[int], k: int, tol: float, deadline: float | None):
        self.values = values
        self.bits = bits
        self.n = len(bits)
        self.k = k
        self.tol = tol
        self.deadline = deadline
        self.sq = np.einsum("ij,ij->i", values, values)
        self.nodes = 0
        self._reset()

    def _reset(self):
        m = self.values.shape[1]
        self.labels = [-1] * self.n
        self.masks: list[int] = []
        self.counts = [0] * self.k
        self.sums = np.zeros((self.k, m))
        self.sumsq = [0.0] * self.k
        self.cost = 0.0

    def _tick(self):
        self.nodes += 1
        if self.deadline is not None and (self.nodes & 511) == 0 and time.monotonic() > self.deadline:
            raise _Timeout

    def _add(self, i: int, t: int) -> tuple[int, float]:
        """Put sample i in cohort t; returns state needed to undo."""
        w = self.values[i]
        delta = self.counts[t] * self.sq[i] + self.sumsq[t] - 2.0 * float(w @ self.sums[t])
        if t == len(self.masks):
            self.masks.append(self.bits[i])
            old_mask = -1
        else:
            old_mask = self.masks[t]
            self.masks[t] = old_mask & self.bits[i]
        self.counts[t] += 1
        self.sums[t] += w
        self.sumsq[t] += self.sq[i]
        self.cost += delta
        self.labels[i] = t
        return old_mask, delta

    def _remove(self, i: int, t: int, undo: tuple[int, float]):
        old_mask, delta = undo
        if old_mask == -1:
            self.masks.pop()
        else:
            self.masks[t] = old_mask
        self.counts[t] -= 1
        self.sums[t] -= self.values[i]
        self.sumsq[t] -= self.sq[i]
        self.cost -= delta
        self.labels[i] = -1

    def _children(self, i: int, min_tags: int):
        used = len(self.masks)
        for t in range(used):
            if popcount(self.masks[t] & self.bits[i]) >= min_tags:
                yield t
        if used < self.k and popcount(self.bits[i]) >= min_tags:
            yield used

    # phase 1 -------------------------------------------------------------

    def max_descriptiveness(self, incumbent: int | None = None) -> tuple[int, list[int] | None]:
        """Largest achievable descriptiveness and a partition reaching it.

        With an ``incumbent`` value, only strictly better partitions are
        searched for; the returned assignment is None if none exists.
        """
        self._reset()
        self.best_q = -1 if incumbent is None else incumbent
        self.best_assignment = None
        self._visit_desc(0)
        return self.best_q, self.best_assignment

    def _visit_desc(self, i: int):
        self._tick()
        target = self.best_q + 1
        if i == self.n:
            q = min(popcount(m) for m in self.masks)
            if q >= target:
                self.best_q = q
                self.best_assignment = list(self.labels)
            return
        if descriptiveness_upper_bound(self.masks, self.bits[i:], self.k) < target:
            return
        for t in self._children(i, target):
            undo = self._add(i, t)
            self._visit_desc(i + 1)
            self._remove(i, t, undo)
            target = self.best_q + 1

    # phase 2 -------------------------------------------------------------

    def min_compactness(
        self, min_tags: int, incumbent: tuple[float, list[int]] | None = None
    ) -> tuple[float, list[int] | None]:
        """Smallest compactness over partitions with descriptiveness >= min_tags.

        Among optima within tolerance the lexicographically smallest canonical
        assignment wins; an ``incumbent`` (cost, assignment) seeds the bound.
        """
        self._reset()
        self.min_tags = min_tags
        if incumbent is None:
            self.best_cost, self.best_assignment = math.inf, None
        else:
            self.best_cost, self.best_assignment = incumbent[0], list(incumbent[1])
        self.found_by_search = False
        self._visit_comp(0)
        return self.best_cost, self.best_assignment

    def _visit_comp(self, i: int):
        self._tick()
        if i == self.n:
            if len(self.masks) < self.k:
                return
            cost = self.cost
            if cost < self.best_cost - self.tol or (
                cost <= self.best_cost + self.tol and self.labels < self.best_assignment
            ):
                self.best_cost = cost
                self.best_assignment = list(self.labels)
                self.found_by_search = True
            return
        bound = compactness_lower_bound(
            self.values,
            self.cost,
            self.counts,
            self.sums,
            self.sumsq,
            self.masks,
            range(i, self.n),
            self.bits[i:],
            self.k,
            self.min_tags,
        )
        # the search runs in lexicographic order, so once it has produced an
        # incumbent every later tie is lexicographically larger
        if self.found_by_search:
            if bound >= self.best_cost - self.tol:
                return
        elif bound > self.best_cost + self.tol:
            return
        for t in self._children(i, self.min_tags):
            undo = self._add(i, t)
            self._visit_comp(i + 1)
            self._remove(i, t, undo)


def _fixed_partition(n: int, k: int) -> Partition | None:
    if k == 1:
        return Partition((1,) * n, 1)
    if k == n:
        return Partition(tuple(range(1, n + 1)), n)
    return None


def solve(
    W: ImportanceMatrix,
    D: TagMatrix,
    k: int,
    opts: SolverOptions | None = None,
) -> SolveResult:
    """Find k cohorts that are maximally described by tags, then compact.

    Timeouts do not raise when a feasible partition exists: the best partition
    found so far is returned with ``proven_optimal=False`` and
    ``timed_out=True``.
    """
    opts = opts or SolverOptions()
    validate_inputs(W, D)
    if not isinstance(W, ImportanceMatrix):
        W = ImportanceMatrix(W)
    if not isinstance(D, TagMatrix):
        D = TagMatrix(D)
    n = W.n_samples
    if not 1 <= k <= n:
        raise InfeasibleKError(f"k={k} must lie in 1..{n}")
    start = time.monotonic()
    deadline = None if opts.time_limit is None else start + opts.time_limit
    mode = opts.resolved_mode(n)

    fixed = _fixed_partition(n, k)
    if fixed is not None:
        model = CohortModel.from_partition(W, D, fixed)
        return SolveResult(model, True, model.descriptiveness, 1, time.monotonic() - start, mode)

    values = W.values
    tags = D.values
    tol = opts.compactness_tolerance
    n_restarts = opts.restarts if mode == "heuristic" else min(opts.restarts, 4)
    seed = local_search(values, tags, k, n_restarts, opts.rng_seed, tol, deadline)
    if seed is None:
        raise SolverTimeoutError("time limit expired before a feasible partition was found")
    labels, q, cost, timed_out = seed
    proven = False
    nodes = 0

    if mode == "exact" and not timed_out:
        bnb = _BranchAndBound(values, D.bitsets(), k, tol, deadline)
        phase = 1
        try:
            better_q, better = bnb.max_descriptiveness(incumbent=q)
            if better is not None:
                q, labels = better_q, better
                cost = _cost(values, labels, k)
            phase = 2
            cost, labels = bnb.min_compactness(q, incumbent=(cost, canonicalize(labels).labels.tolist()))
            proven = True
        except _Timeout:
            timed_out = True
            logger.warning("exact search hit the time limit; returning best partition found")
            if phase == 1 and bnb.best_assignment is not None:
                q, labels = bnb.best_q, bnb.best_assignment
            elif phase == 2:
                labels = bnb.best_assignment
        nodes = bnb.nodes

    partition = canonicalize(labels, k)
    model = CohortModel.from_partition(W, D, partition)
    return SolveResult(
        model=model,
        proven_optimal=proven,
        phase1_descriptiveness=q,
        nodes_explored=nodes,
        wall_time=time.monotonic() - start,
        mode=mode,
        timed_out=timed_out,
    )


def _cost(values, labels, k) -> float:
    return float(cohort_compactness(values, np.asarray(labels), k).sum())
