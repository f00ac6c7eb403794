"""Anytime multi-restart local search for large instances.

Each restart seeds ``k`` cohorts with samples whose tag rows overlap little,
assigns the rest greedily, then relocates single samples while the
lexicographic objective (descriptiveness up, then compactness down) improves.
A cohort's shared tags are tracked through per-tag member counts, so a tag is
shared exactly when its count equals the cohort size.
"""

from __future__ import annotations

import time

import numpy as np

MAX_PASSES = 200


class _State:
    def __init__(self, values: np.ndarray, tags: np.ndarray, labels: np.ndarray, k: int):
        self.values = values
        self.tags = tags
        self.sq = np.einsum("ij,ij->i", values, values)
        self.k = k
        self.labels = labels
        self.sizes = np.bincount(labels, minlength=k)
        self.tag_counts = np.zeros((k, tags.shape[1]), dtype=np.int64)
        np.add.at(self.tag_counts, labels, tags)
        self.sums = np.zeros((k, values.shape[1]))
        np.add.at(self.sums, labels, values)
        self.sumsq = np.bincount(labels, weights=self.sq, minlength=k)

    def shared(self) -> np.ndarray:
        return (self.tag_counts == self.sizes[:, None]).sum(axis=1)

    def descriptiveness(self) -> int:
        return int(self.shared().min())

    def compactness(self) -> float:
        out = self.sizes * self.sumsq - np.einsum("ij,ij->i", self.sums, self.sums)
        return float(np.maximum(out, 0.0).sum())

    def best_move(self, j: int, pop: np.ndarray):
        """Best relocation target for sample j as (descriptiveness, cost change, target)."""
        a = self.labels[j]
        if self.sizes[a] == 1:
            return None
        row = self.tags[j]
        w = self.values[j]
        pop_a = int(((self.tag_counts[a] - row) == self.sizes[a] - 1).sum())
        pop_to = ((self.tag_counts + row) == (self.sizes + 1)[:, None]).sum(axis=1)
        base = pop.copy()
        base[a] = pop_a
        # min over cohorts other than b, for every b at once
        order = np.argsort(base, kind="stable")
        lo, lo2 = base[order[0]], base[order[1]] if self.k > 1 else np.iinfo(np.int64).max
        others = np.where(np.arange(self.k) == order[0], lo2, lo)
        desc = np.minimum(others, pop_to)
        dots = self.sums @ w
        add_cost = self.sizes * self.sq[j] + self.sumsq - 2.0 * dots
        remove_gain = (
            (self.sizes[a] - 1) * self.sq[j] + (self.sumsq[a] - self.sq[j]) - 2.0 * (dots[a] - self.sq[j])
        )
        change = add_cost - remove_gain
        desc[a] = -1
        best = max(range(self.k), key=lambda b: (desc[b], -change[b]))
        return int(desc[best]), float(change[best]), best

    def move(self, j: int, b: int):
        a = self.labels[j]
        row = self.tags[j]
        w = self.values[j]
        self.sizes[a] -= 1
        self.sizes[b] += 1
        self.tag_counts[a] -= row
        self.tag_counts[b] += row
        self.sums[a] -= w
        self.sums[b] += w
        self.sumsq[a] -= self.sq[j]
        self.sumsq[b] += self.sq[j]
        self.labels[j] = b


def _greedy_seed(values, tags, k, rng) -> np.ndarray:
    n = len(values)
    counts = tags.astype(np.int64)
    seeds = [int(rng.integers(n))]
    overlap = counts @ counts[seeds[0]]
    taken = np.zeros(n, dtype=bool)
    taken[seeds[0]] = True
    for _ in range(1, k):
        score = np.where(taken, np.iinfo(np.int64).max, overlap)
        candidates = np.flatnonzero(score == score.min())
        s = int(rng.choice(candidates))
        seeds.append(s)
        taken[s] = True
        overlap = np.maximum(overlap, counts @ counts[s])

    sq = np.einsum("ij,ij->i", values, values)
    masks = tags[seeds].copy()
    pop = masks.sum(axis=1)
    sums = values[seeds].copy()
    sumsq = sq[seeds].copy()
    sizes = np.ones(k, dtype=np.int64)
    labels = np.full(n, -1, dtype=np.intp)
    labels[seeds] = np.arange(k)
    for j in rng.permutation(np.flatnonzero(~taken)):
        new_pop = (masks & tags[j]).sum(axis=1)
        order = np.argsort(pop, kind="stable")
        lo = pop[order[0]]
        lo2 = pop[order[1]] if k > 1 else np.iinfo(np.int64).max
        others = np.where(np.arange(k) == order[0], lo2, lo)
        desc = np.minimum(others, new_pop)
        cost = sizes * sq[j] + sumsq - 2.0 * (sums @ values[j])
        t = max(range(k), key=lambda b: (desc[b], new_pop[b], -cost[b]))
        labels[j] = t
        masks[t] &= tags[j]
        pop[t] = new_pop[t]
        sums[t] += values[j]
        sumsq[t] += sq[j]
        sizes[t] += 1
    return labels


def local_search(
    values: np.ndarray,
    tags: np.ndarray,
    k: int,
    restarts: int,
    seed: int,
    tol: float = 1e-9,
    deadline: float | None = None,
):
    """Best partition over ``restarts`` seeded local searches.

    Returns ``(labels, descriptiveness, compactness, timed_out)`` with 0-based
    labels, or None if the deadline passed before the first restart finished
    seeding. The first restart always runs to completion of its greedy phase.
    """
    values = np.asarray(values, dtype=float)
    tags = np.asarray(tags, dtype=bool)
    rng = np.random.default_rng(seed)
    best = None
    timed_out = False
    for r in range(restarts):
        if r > 0 and deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        state = _State(values, tags, _greedy_seed(values, tags, k, rng), k)
        desc = state.descriptiveness()
        for _ in range(MAX_PASSES):
            improved = False
            pop = state.shared()
            for j in rng.permutation(len(values)):
                move = state.best_move(j, pop)
                if move is None:
                    continue
                new_desc, change, b = move
                if new_desc > desc or (new_desc == desc and change < -tol):
                    state.move(j, b)
                    desc = new_desc
                    pop = state.shared()
                    improved = True
            if not improved:
                break
            if deadline is not None and time.monotonic() > deadline:
                timed_out = True
                break
        comp = state.compactness()
        if best is None or desc > best[1] or (desc == best[1] and comp < best[2] - tol):
            best = (state.labels.copy(), desc, comp)
        if timed_out:
            break
    if best is None:
        return None
    return best[0], best[1], best[2], timed_out
