# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled search kernel: exhaustive enumeration of installed-flag
assignments over bitmask-compiled problems (up to 64 stanzas).

Mirrors _kernel_py.search; the caller falls back to the pure-Python
kernel for larger domains.
"""

from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64


cdef inline bint mask_less(u64 a, u64 b) nogil:
    cdef u64 d = a ^ b
    cdef u64 m, above
    if d == 0:
        return False
    m = d & (~d + 1)
    above = ~((m << 1) - 1)
    if m << 1 == 0:  # differing bit is bit 63: nothing above it
        above = 0
    if a & m:
        return (b & above) != 0
    return (a & above) == 0


def search(problem):
    cdef int n = problem.n
    if n > 64:
        raise ValueError("compiled kernel is limited to 64 stanzas")

    cdef list free_list = problem.free_bits
    cdef int k = len(free_list)
    cdef int i, j

    cdef int *free_bits = <int *> malloc(k * sizeof(int))
    cdef long long *costs = <long long *> malloc(n * sizeof(long long))
    cdef u64 *conflict = <u64 *> malloc(n * sizeof(u64))
    cdef int *dep_start = <int *> malloc((n + 1) * sizeof(int))

    flat_deps = []
    for i in range(n):
        dep_start[i] = len(flat_deps)
        flat_deps.extend(problem.dep_clauses[i])
    dep_start[n] = len(flat_deps)

    cdef int n_deps = len(flat_deps)
    cdef u64 *deps = <u64 *> malloc(max(n_deps, 1) * sizeof(u64))
    cdef int n_req = len(problem.required)
    cdef u64 *required = <u64 *> malloc(max(n_req, 1) * sizeof(u64))
    cdef int n_forb = len(problem.forbidden)
    cdef u64 *forbidden = <u64 *> malloc(max(n_forb, 1) * sizeof(u64))
    cdef int n_up = len(problem.upgrades)
    cdef u64 *up_clause = <u64 *> malloc(max(n_up, 1) * sizeof(u64))
    cdef u64 *up_names = <u64 *> malloc(max(n_up, 1) * sizeof(u64))
    cdef u64 *up_allowed = <u64 *> malloc(max(n_up, 1) * sizeof(u64))

    for i in range(k):
        free_bits[i] = free_list[i]
    for i in range(n):
        costs[i] = problem.costs[i]
        conflict[i] = problem.conflict_mask[i]
    for i in range(n_deps):
        deps[i] = flat_deps[i]
    for i in range(n_req):
        required[i] = problem.required[i]
    for i in range(n_forb):
        forbidden[i] = problem.forbidden[i]
    for i in range(n_up):
        up_clause[i] = problem.upgrades[i][0]
        up_names[i] = problem.upgrades[i][1]
        up_allowed[i] = problem.upgrades[i][2]

    cdef u64 pinned = problem.pinned
    cdef u64 sub, mask, chosen, m
    cdef u64 total = (<u64> 1) << k
    cdef u64 best_mask = 0
    cdef long long cost, best_cost = 0
    cdef bint found = False, ok

    try:
        with nogil:
            sub = 0
            while sub < total:
                mask = pinned
                for i in range(k):
                    if (sub >> i) & 1:
                        mask |= (<u64> 1) << free_bits[i]
                ok = True
                for i in range(n):
                    if not (mask >> i) & 1:
                        continue
                    for j in range(dep_start[i], dep_start[i + 1]):
                        if not mask & deps[j]:
                            ok = False
                            break
                    if not ok or mask & conflict[i]:
                        ok = False
                        break
                if ok:
                    for i in range(n_req):
                        if not mask & required[i]:
                            ok = False
                            break
                if ok:
                    for i in range(n_forb):
                        if mask & forbidden[i]:
                            ok = False
                            break
                if ok:
                    for i in range(n_up):
                        chosen = mask & up_names[i]
                        if (
                            not mask & up_clause[i]
                            or chosen == 0
                            or chosen & (chosen - 1)
                            or not chosen & up_allowed[i]
                        ):
                            ok = False
                            break
                if ok:
                    cost = 0
                    m = mask
                    while m:
                        i = 0
                        while not (m >> i) & 1:
                            i += 1
                        cost += costs[i]
                        m &= m - 1
                    if (
                        not found
                        or cost < best_cost
                        or (cost == best_cost and mask_less(mask, best_mask))
                    ):
                        found = True
                        best_mask = mask
                        best_cost = cost
                sub += 1
    finally:
        free(free_bits)
        free(costs)
        free(conflict)
        free(dep_start)
        free(deps)
        free(required)
        free(forbidden)
        free(up_clause)
        free(up_names)
        free(up_allowed)

    return bool(found), int(best_mask), int(best_cost), int(total)
