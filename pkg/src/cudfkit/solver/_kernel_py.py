"""Pure-Python search kernel over compiled problems.

Reference implementation of the candidate enumeration; the Cython kernel
in _kernel.pyx mirrors this loop exactly.  Unlimited stanza counts are
supported since Python integers serve as bitmasks.
"""

from __future__ import annotations


def _mask_less(a, b):
    """Whether installed-set a precedes b in the tie-break order
    (lexicographic on the sorted (name, version) sequences; bit order is
    already sorted by key)."""
    d = a ^ b
    if d == 0:
        return False
    m = d & -d
    above = ~((m << 1) - 1)
    if a & m:
        return bool(b & above)
    return not (a & above)


def _candidate_ok(mask, problem):
    for i in range(problem.n):
        if not (mask >> i) & 1:
            continue
        for clause in problem.dep_clauses[i]:
            if not mask & clause:
                return False
        if mask & problem.conflict_mask[i]:
            return False
    for req in problem.required:
        if not mask & req:
            return False
    for bad in problem.forbidden:
        if mask & bad:
            return False
    for clause, name_bits, allowed in problem.upgrades:
        if not mask & clause:
            return False
        chosen = mask & name_bits
        if chosen == 0 or chosen & (chosen - 1):
            return False
        if not chosen & allowed:
            return False
    return True


def search(problem):
    """Enumerate all assignments of the free installed flags.

    Returns (found, best_mask, best_cost, explored); the minimum-cost
    passing candidate wins, ties broken by _mask_less.
    """
    free = problem.free_bits
    k = len(free)
    costs = problem.costs
    best_mask = 0
    best_cost = 0
    found = False
    for sub in range(1 << k):
        mask = problem.pinned
        s = sub
        idx = 0
        while s:
            if s & 1:
                mask |= 1 << free[idx]
            s >>= 1
            idx += 1
        if not _candidate_ok(mask, problem):
            continue
        cost = 0
        m = mask
        while m:
            low = m & -m
            cost += costs[low.bit_length() - 1]
            m ^= low
        if (
            not found
            or cost < best_cost
            or (cost == best_cost and _mask_less(mask, best_mask))
        ):
            found = True
            best_mask = mask
            best_cost = cost
    return found, best_mask, best_cost, 1 << k
