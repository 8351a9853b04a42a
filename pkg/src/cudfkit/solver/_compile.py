"""Compile a document + request + costs into bitmask form for the search
kernels.

Stanzas are sorted by (name, version) and numbered; an installation
candidate is the bitmask of installed stanzas.  Every semantic clause is
reduced ahead of time to "mask must intersect M" or "mask must avoid M",
so the kernels only do mask arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..semantics import constraint_satisfiable, satisfies_constraint


@dataclass
class CompiledProblem:
    n: int
    keys: list  # bit -> (name, version)
    costs: list  # bit -> int
    pinned: int  # bits forced installed (keep 'version)
    free_bits: list
    dep_clauses: list  # bit -> list of masks, each must intersect when bit set
    conflict_mask: list  # bit -> mask that must not intersect when bit set
    required: list  # masks that must always intersect (install, keep obligations)
    forbidden: list  # masks that must never intersect (remove)
    upgrades: list = field(default_factory=list)  # (clause, name_bits, allowed_bits)


def _atom_mask(atom, stanzas, exclude=None):
    """Bits whose installation contributes a version of atom.name
    satisfying atom.constraint, through the package itself or a provide."""
    mask = 0
    for i, item in enumerate(stanzas):
        if i == exclude:
            continue
        hit = False
        if item.name == atom.name and satisfies_constraint(item.version, atom.constraint):
            hit = True
        else:
            for provide in item.provides.items:
                if provide.name != atom.name:
                    continue
                if provide.constraint.is_top:
                    hit = constraint_satisfiable(atom.constraint)
                else:
                    hit = satisfies_constraint(
                        provide.constraint.version, atom.constraint
                    )
                if hit:
                    break
        if hit:
            mask |= 1 << i
    return mask


def compile_problem(doc, request, costs):
    stanzas = sorted(doc.packages, key=lambda p: p.key)
    n = len(stanzas)
    keys = [item.key for item in stanzas]
    cost_vec = [costs.get(key, 0) for key in keys]

    dep_clauses = []
    conflict_mask = []
    pinned = 0
    required = []
    for i, item in enumerate(stanzas):
        dep_clauses.append(
            [_atom_mask_union(clause, stanzas) for clause in item.depends.clauses]
        )
        cmask = 0
        for atom in item.conflicts.items:
            cmask |= _atom_mask(atom, stanzas, exclude=i)
        conflict_mask.append(cmask)
        if item.installed and item.keep is not None:
            keep = item.keep.chosen
            if keep == "version":
                pinned |= 1 << i
            elif keep == "package":
                group = 0
                for j, other in enumerate(stanzas):
                    if other.name == item.name:
                        group |= 1 << j
                required.append(group)
            elif keep == "feature":
                for provide in item.provides.items:
                    required.append(_atom_mask(provide, stanzas))

    for atom in request.install.items:
        required.append(_atom_mask(atom, stanzas))

    forbidden = [_atom_mask(atom, stanzas) for atom in request.remove.items]

    upgrades = []
    before_installed = {}
    for item in stanzas:
        if item.installed:
            before_installed.setdefault(item.name, []).append(item.version)
    for atom in request.upgrade.items:
        clause = _atom_mask(atom, stanzas)
        name_bits = 0
        allowed = 0
        floor = max(before_installed.get(atom.name, [0]))
        for j, other in enumerate(stanzas):
            if other.name == atom.name:
                name_bits |= 1 << j
                if other.version >= floor:
                    allowed |= 1 << j
        upgrades.append((clause, name_bits, allowed))

    free_bits = [i for i in range(n) if not (pinned >> i) & 1]
    return CompiledProblem(
        n=n,
        keys=keys,
        costs=cost_vec,
        pinned=pinned,
        free_bits=free_bits,
        dep_clauses=dep_clauses,
        conflict_mask=conflict_mask,
        required=required,
        forbidden=forbidden,
        upgrades=upgrades,
    )


def _atom_mask_union(clause, stanzas):
    mask = 0
    for atom in clause:
        mask |= _atom_mask(atom, stanzas)
    return mask
