"""Cost-based optimization over the request semantics.

Exhaustive desk-scale solver: candidates are assignments of the
Installed flags over the existing domain (the successor relation forbids
adding or removing stanzas, so this space is complete).  The hot
enumeration loop runs in a compiled kernel when available, with a
pure-Python fallback selected at import time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .. import semantics
from ..model import CudfDocument, RawValue
from ._compile import compile_problem
from . import _kernel_py

if os.environ.get("CUDFKIT_PURE"):
    _kernel = None
else:
    try:
        from . import _kernel
    except ImportError:
        _kernel = None

KERNEL = "compiled" if _kernel is not None else "pure"

CRITERIA = ("installed-size", "download-size", "prefer-latest", "min-new", "min-removed")

DEFAULT_BUDGET = 2 ** 20


class MissingSizeProperty(ValueError):
    pass


class BudgetExceeded(Exception):
    pass


@dataclass
class SolveResult:
    status: str  # "solution" | "no_solution" | "budget_exceeded"
    document: CudfDocument | None = None
    cost: int | None = None
    explored: int = 0


def installation_cost(doc, costs):
    """Sum of the per-(name, version) costs over installed packages."""
    return sum(costs.get(p.key, 0) for p in doc.packages if p.installed)


def _size_value(item, prop):
    value = item.extra_value(prop)
    if value is None or isinstance(value, RawValue):
        raise MissingSizeProperty(
            f"{prop} missing on {item.name} {item.version}; register its schema"
        )
    return value


def preset_costs(doc, request, criterion):
    """Cost assignment implementing one of the standard criteria."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    costs = {}
    if criterion in ("installed-size", "download-size"):
        prop = "Installed-Size" if criterion == "installed-size" else "Download-Size"
        for item in doc.packages:
            size = _size_value(item, prop)
            if criterion == "download-size" and item.installed:
                size = 0  # already on disk, nothing to download
            costs[item.key] = size
    elif criterion == "prefer-latest":
        latest = {}
        for item in doc.packages:
            latest[item.name] = max(latest.get(item.name, 0), item.version)
        for item in doc.packages:
            costs[item.key] = 0 if item.version == latest[item.name] else 1
    elif criterion == "min-new":
        requested = list(request.install.items) + list(request.upgrade.items)
        for item in doc.packages:
            explicit = any(
                atom.name == item.name
                and semantics.satisfies_constraint(item.version, atom.constraint)
                for atom in requested
            )
            costs[item.key] = 0 if item.installed or explicit else 1
    elif criterion == "min-removed":
        for item in doc.packages:
            costs[item.key] = -1 if item.installed else 0
    return costs


def solve(doc, request, costs, budget=DEFAULT_BUDGET):
    """Minimum-cost successor satisfying the request, by exhaustive
    enumeration of Installed-flag assignments.

    keep 'version packages are pinned installed; everything else is
    free.  Any returned solution is re-checked against the semantics
    engine, never trusted from the search.  Ties break toward the
    lexicographically smallest sorted installed set.
    """
    problem = compile_problem(doc, request, costs)
    k = len(problem.free_bits)
    if k >= budget.bit_length() or (1 << k) > budget:
        return SolveResult(status="budget_exceeded", explored=0)

    kernel = _kernel if (_kernel is not None and problem.n <= 64) else _kernel_py
    try:
        found, best_mask, best_cost, explored = kernel.search(problem)
    except OverflowError:
        found, best_mask, best_cost, explored = _kernel_py.search(problem)

    if not found:
        return SolveResult(status="no_solution", explored=explored)

    installed = {problem.keys[i] for i in range(problem.n) if (best_mask >> i) & 1}
    packages = tuple(
        sorted(
            (p.with_installed(p.key in installed) for p in doc.packages),
            key=lambda p: p.key,
        )
    )
    solution = CudfDocument(packages=packages, request=request)
    verdict = semantics.satisfies_request(doc, request, solution)
    if not verdict.ok:
        raise AssertionError(
            f"search produced an invalid candidate: {verdict.failed_clauses()}"
        )
    return SolveResult(
        status="solution", document=solution, cost=best_cost, explored=explored
    )
