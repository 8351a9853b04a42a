"""Solution-checking semantics for CUDF documents.

Installations map package names to version sets; feature expansion of an
unversioned provide yields the symbolic set of every positive version
(ALL) rather than an enumeration.  On top of installations the module
implements constraint/formula/list satisfaction, disjointness,
consistency, the successor relation and the request semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .types import TOP, VersionConstraint, VpkgList


class _AllVersions:
    """Symbolic set of every posint; arises from unversioned provides."""

    def __repr__(self):
        return "ALL"


ALL = _AllVersions()


class Installation:
    """Total map from package name to a version set, defaulting to empty."""

    __slots__ = ("_map",)

    def __init__(self, mapping=None):
        self._map = dict(mapping) if mapping else {}

    def versions(self, name):
        return self._map.get(name, frozenset())

    def names(self):
        return self._map.keys()

    def is_empty(self):
        return all(vs is not ALL and not vs for vs in self._map.values())

    def __eq__(self, other):
        if not isinstance(other, Installation):
            return NotImplemented
        names = set(self._map) | set(other._map)
        return all(self.versions(n) == other.versions(n) for n in names)

    def __repr__(self):
        inner = {n: vs for n, vs in sorted(self._map.items()) if vs is ALL or vs}
        return f"Installation({inner})"


def current_installation(doc):
    """Versions flagged installed, per package name."""
    out = {}
    for item in doc.packages:
        if item.installed:
            out.setdefault(item.name, set()).add(item.version)
    return Installation({n: frozenset(v) for n, v in out.items()})


def current_features(doc):
    """Features provided by installed packages, with unversioned provides
    expanded to the symbolic ALL set."""
    out = {}
    for item in doc.packages:
        if not item.installed:
            continue
        for provide in item.provides.items:
            if provide.constraint.is_top:
                out[provide.name] = ALL
            elif out.get(provide.name) is not ALL:
                out.setdefault(provide.name, set()).add(provide.constraint.version)
    return Installation(
        {n: vs if vs is ALL else frozenset(vs) for n, vs in out.items()}
    )


def merge(a, b):
    """Pointwise union of two installations; ALL absorbs."""
    out = {}
    for name in set(a.names()) | set(b.names()):
        va, vb = a.versions(name), b.versions(name)
        if va is ALL or vb is ALL:
            out[name] = ALL
        else:
            out[name] = va | vb
    return Installation(out)


def satisfies_constraint(n, c):
    if c.is_top:
        return True
    v = c.version
    return {
        "=": n == v,
        "!=": n != v,
        ">": n > v,
        "<": n < v,
        ">=": n >= v,
        "<=": n <= v,
    }[c.relop]


def constraint_satisfiable(c):
    """Whether any posint satisfies c; only (<, 1) has no witness."""
    return not (c.relop == "<" and c.version == 1)


def set_satisfies(vs, c):
    """Existence of a witness for c in the version set."""
    if vs is ALL:
        return constraint_satisfiable(c)
    return any(satisfies_constraint(n, c) for n in vs)


def _atom_satisfied(inst, atom):
    return set_satisfies(inst.versions(atom.name), atom.constraint)


def satisfies_formula(inst, formula):
    """CNF satisfaction; the empty conjunction (True) always holds."""
    return all(
        any(_atom_satisfied(inst, atom) for atom in clause)
        for clause in formula.clauses
    )


def satisfies_list(inst, lst):
    return all(_atom_satisfied(inst, atom) for atom in lst.items)


def disjoint(inst, lst):
    """No installed version of any listed package satisfies its constraint."""
    for atom in lst.items:
        vs = inst.versions(atom.name)
        if vs is ALL:
            if constraint_satisfiable(atom.constraint):
                return False
        elif any(satisfies_constraint(n, atom.constraint) for n in vs):
            return False
    return True


# ---------------------------------------------------------------------------
# Consistency


@dataclass(frozen=True)
class ConsistencyViolation:
    package: str
    version: int
    clause: str  # "depends" | "conflicts"
    detail: str


@dataclass
class ConsistencyVerdict:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def is_consistent(doc):
    """Every installed package has its dependencies satisfied and its
    conflicts disjoint from everything else installed (self-conflicts
    are ignored by checking against the description minus the package)."""
    merged = merge(current_installation(doc), current_features(doc))
    verdict = ConsistencyVerdict()
    for item in sorted(doc.packages, key=lambda p: p.key):
        if not item.installed:
            continue
        if not satisfies_formula(merged, item.depends):
            verdict.violations.append(
                ConsistencyViolation(item.name, item.version, "depends",
                                     "unsatisfied dependency formula")
            )
        reduced = doc.remove_package(item.name, item.version)
        merged_wo = merge(current_installation(reduced), current_features(reduced))
        if not disjoint(merged_wo, item.conflicts):
            verdict.violations.append(
                ConsistencyViolation(item.name, item.version, "conflicts",
                                     "conflict with another installed package")
            )
    return verdict


# ---------------------------------------------------------------------------
# Successor relation


@dataclass(frozen=True)
class SuccessorViolation:
    clause: str  # "domain" | "metadata" | "keep"
    detail: str
    package: str | None = None
    version: int | None = None


@dataclass
class SuccessorVerdict:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def is_successor(before, after):
    verdict = SuccessorVerdict()
    dom_before, dom_after = before.domain(), after.domain()
    for key in sorted(dom_before ^ dom_after):
        side = "missing from" if key in dom_before else "added by"
        verdict.violations.append(
            SuccessorViolation("domain", f"{key} {side} the successor", *key)
        )
    if verdict.violations:
        return verdict

    for key in sorted(dom_before):
        b, a = before.lookup(*key), after.lookup(*key)
        if (b.keep, b.depends, b.conflicts, b.provides) != (
            a.keep, a.depends, a.conflicts, a.provides
        ):
            verdict.violations.append(
                SuccessorViolation("metadata", "non-Installed property changed", *key)
            )

    i_before = current_installation(before)
    i_after = current_installation(after)
    merged_after = merge(i_after, current_features(after))
    for item in sorted(before.packages, key=lambda p: p.key):
        if not item.installed or item.keep is None:
            continue
        keep = item.keep.chosen
        if keep == "version" and item.version not in i_after.versions(item.name):
            verdict.violations.append(
                SuccessorViolation("keep", "keep 'version not honored",
                                   item.name, item.version)
            )
        elif keep == "package" and not i_after.versions(item.name):
            verdict.violations.append(
                SuccessorViolation("keep", "keep 'package not honored",
                                   item.name, item.version)
            )
        elif keep == "feature" and not satisfies_list(merged_after, item.provides):
            verdict.violations.append(
                SuccessorViolation("keep", "keep 'feature not honored",
                                   item.name, item.version)
            )
    return verdict


# ---------------------------------------------------------------------------
# Request semantics


@dataclass(frozen=True)
class RequestViolation:
    clause: str  # "successor" | "consistency" | "install" | "remove" | "upgrade"
    detail: str
    package: str | None = None
    version: int | None = None


@dataclass
class RequestVerdict:
    successor: SuccessorVerdict
    consistency: ConsistencyVerdict
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return (
            self.successor.ok and self.consistency.ok and not self.violations
        )

    def failed_clauses(self):
        clauses = []
        if not self.successor.ok:
            clauses.append("successor")
        if not self.consistency.ok:
            clauses.append("consistency")
        clauses.extend(sorted({v.clause for v in self.violations}))
        return clauses


def satisfies_request(before, request, after):
    """The five request-semantics clauses between two documents."""
    verdict = RequestVerdict(
        successor=is_successor(before, after),
        consistency=is_consistent(after),
    )
    i_before = current_installation(before)
    i_after = current_installation(after)
    merged = merge(i_after, current_features(after))

    for atom in request.install.items:
        if not _atom_satisfied(merged, atom):
            verdict.violations.append(
                RequestViolation("install", "install target not satisfied", atom.name)
            )
    if not disjoint(merged, request.remove):
        for atom in request.remove.items:
            if not disjoint(merged, VpkgList((atom,))):
                verdict.violations.append(
                    RequestViolation("remove", "removed package still present",
                                     atom.name)
                )
    for atom in request.upgrade.items:
        if not _atom_satisfied(merged, atom):
            verdict.violations.append(
                RequestViolation("upgrade", "upgrade target not satisfied", atom.name)
            )
        after_versions = i_after.versions(atom.name)
        if len(after_versions) != 1:
            verdict.violations.append(
                RequestViolation("upgrade",
                                 "upgraded package is not a singleton version",
                                 atom.name)
            )
        else:
            (n,) = after_versions
            if any(n < m for m in i_before.versions(atom.name)):
                verdict.violations.append(
                    RequestViolation("upgrade", "upgrade went to an older version",
                                     atom.name, n)
                )
    return verdict
