"""Independent reference computations used as test oracles.

Nothing here imports the solver; the brute force enumerates restricted growth
strings directly and scores them with naive double loops.
"""

from __future__ import annotations

import itertools

import numpy as np


def canonical_assignments(n, k):
    """Every canonical assignment of n samples to exactly k non-empty cohorts (1-based)."""
    def grow(prefix, used):
        if len(prefix) == n:
            if used == k:
                yield tuple(prefix)
            return
        if used + (n - len(prefix)) < k:
            return
        for g in range(1, min(used + 1, k) + 1):
            yield from grow(prefix + [g], max(used, g))

    yield from grow([], 0)


def pairwise_compactness(W, assignment):
    W = np.asarray(W, dtype=float)
    total = 0.0
    for i, j in itertools.combinations(range(len(assignment)), 2):
        if assignment[i] == assignment[j]:
            d = W[i] - W[j]
            total += float(d @ d)
    return total


def shared_tags(D, assignment):
    D = np.asarray(D)
    out = {}
    for g in sorted(set(assignment)):
        rows = [D[i] for i in range(len(assignment)) if assignment[i] == g]
        out[g] = {p for p in range(D.shape[1]) if all(r[p] == 1 for r in rows)}
    return out


def naive_descriptiveness(D, assignment):
    return min(len(s) for s in shared_tags(D, assignment).values())


def brute_force(W, D, k):
    """(q, min compactness among descriptiveness >= q, all optimal assignments)."""
    scored = [
        (naive_descriptiveness(D, a), pairwise_compactness(W, a), a)
        for a in canonical_assignments(len(W), k)
    ]
    q = max(s[0] for s in scored)
    feasible = [s for s in scored if s[0] >= q]
    best = min(s[1] for s in feasible)
    return q, best, [s[2] for s in feasible if abs(s[1] - best) <= 1e-9]


def adjusted_rand_index(a, b):
    """Hubert-Arabie ARI from the contingency table, written out longhand."""
    a = list(a)
    b = list(b)
    n = len(a)
    pairs = lambda c: c * (c - 1) / 2
    ka, kb = sorted(set(a)), sorted(set(b))
    table = [[sum(1 for x, y in zip(a, b) if x == u and y == v) for v in kb] for u in ka]
    index = sum(pairs(c) for row in table for c in row)
    sa = sum(pairs(sum(row)) for row in table)
    sb = sum(pairs(sum(table[i][j] for i in range(len(ka)))) for j in range(len(kb)))
    expected = sa * sb / pairs(n)
    top = (sa + sb) / 2
    if top == expected:
        return 1.0
    return (index - expected) / (top - expected)


def constraint_violations(D, k, assignment, tag_sets):
    """Names of the partition constraints broken by a solver output (empty when valid).

    ``assignment`` is 1-based, ``tag_sets`` holds 0-based tag indices per cohort.
    """
    D = np.asarray(D)
    a = list(assignment)
    out = []
    if sorted(set(a)) != list(range(1, k + 1)):
        out.append("non-empty")
    firsts = [a.index(t) for t in range(1, k + 1) if t in a]
    if firsts != sorted(firsts):
        out.append("canonical")
    if len(tag_sets) != k:
        out.append("tag-set count")
        return out
    for i, g in enumerate(a):
        if any(D[i, p] != 1 for p in tag_sets[g - 1]):
            out.append("membership")
            break
    for t in range(1, k + 1):
        members = [i for i, g in enumerate(a) if g == t]
        for p in range(D.shape[1]):
            if p not in tag_sets[t - 1] and members and all(D[i, p] == 1 for i in members):
                out.append("maximality")
                break
    return out


def completions(prefix, n, k):
    """Canonical 1-based assignments of length n extending a canonical prefix."""
    used = max(prefix, default=0)

    def grow(cur, used):
        if len(cur) == n:
            if used == k:
                yield tuple(cur)
            return
        if used + (n - len(cur)) < k:
            return
        for g in range(1, min(used + 1, k) + 1):
            yield from grow(cur + [g], max(used, g))

    yield from grow(list(prefix), used)
