"""CUDF type library: value spaces, lexical spaces, parsing and serialization.

Every property value lives in one of these domains:

    bool, int, nat, posint, string, oneliner, pkgname, enum(...),
    vpkg, veqpkg, vpkgformula, vpkglist, veqpkglist

Each type has a parse function (lexical -> value) and a canonical
serialization (value -> lexical) such that parse(serialize(v)) == v.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class LexicalError(ValueError):
    """Raised when a string is not in the lexical space of a type."""

    def __init__(self, type_tag, position, reason):
        self.type_tag = type_tag
        self.position = position
        self.reason = reason
        super().__init__(f"{type_tag}: {reason} (at {position})")


class UnknownType(ValueError):
    pass


class SerializeError(ValueError):
    """Raised for values that have no lexical form (e.g. the True formula)."""


RELOPS = ("=", "!=", ">=", ">", "<=", "<")

_PKGNAME_RE = re.compile(r"[a-z][a-z0-9.-]+$")
_IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9-]*$")
_INT_RE = re.compile(r"[+-]?[0-9]+$")
_ENUM_TAG_RE = re.compile(r"enum\(([^)]*)\)$")


@dataclass(frozen=True)
class VersionConstraint:
    """Either the unconstrained value (relop is None) or a (relop, version) pair."""

    relop: str | None = None
    version: int | None = None

    def __post_init__(self):
        if self.relop is None:
            if self.version is not None:
                raise ValueError("unconstrained form carries no version")
        else:
            if self.relop not in RELOPS:
                raise ValueError(f"bad relop {self.relop!r}")
            if not isinstance(self.version, int) or self.version < 1:
                raise ValueError("constraint version must be a posint")

    @property
    def is_top(self):
        return self.relop is None


TOP = VersionConstraint()


@dataclass(frozen=True)
class VPkg:
    """A possibly version-constrained package (or feature) name."""

    name: str
    constraint: VersionConstraint = TOP

    def __post_init__(self):
        if not _PKGNAME_RE.match(self.name):
            raise ValueError(f"bad package name {self.name!r}")


@dataclass(frozen=True)
class VpkgFormula:
    """CNF formula: a conjunction of disjunctions of VPkg atoms.

    The empty conjunction is the True formula; it has no lexical form.
    """

    clauses: tuple[tuple[VPkg, ...], ...] = ()

    def __post_init__(self):
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty disjunction")
            for atom in clause:
                if not isinstance(atom, VPkg):
                    raise ValueError("formula atoms must be VPkg")

    @property
    def is_true(self):
        return not self.clauses


TRUE = VpkgFormula()


@dataclass(frozen=True)
class VpkgList:
    items: tuple[VPkg, ...] = ()

    def __post_init__(self):
        for item in self.items:
            if not isinstance(item, VPkg):
                raise ValueError("list elements must be VPkg")


EMPTY_LIST = VpkgList()


@dataclass(frozen=True)
class EnumValue:
    symbols: tuple[str, ...]
    chosen: str

    def __post_init__(self):
        for sym in self.symbols:
            if not _IDENT_RE.match(sym):
                raise ValueError(f"enum symbol {sym!r} is not an identifier")
        if self.chosen not in self.symbols:
            raise ValueError(f"{self.chosen!r} not among {self.symbols}")


def is_identifier(s):
    return bool(_IDENT_RE.match(s))


# ---------------------------------------------------------------------------
# Parsing


class _Scanner:
    """Tokenizer for the vpkg/vpkglist/vpkgformula grammars.

    Only U+0020 counts as a space; runs of spaces are accepted anywhere
    between tokens.
    """

    def __init__(self, text, type_tag):
        self.text = text
        self.pos = 0
        self.type_tag = type_tag

    def error(self, reason):
        raise LexicalError(self.type_tag, self.pos, reason)

    def skip_spaces(self):
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def at_end(self):
        self.skip_spaces()
        return self.pos >= len(self.text)

    def peek(self):
        self.skip_spaces()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        self.skip_spaces()
        if self.pos < len(self.text) and self.text[self.pos] == ch:
            self.pos += 1
            return True
        return False

    def pkgname(self):
        self.skip_spaces()
        m = re.match(r"[a-z][a-z0-9.-]+", self.text[self.pos:])
        if not m:
            self.error("expected a package name")
        self.pos += m.end()
        return m.group()

    def relop(self):
        self.skip_spaces()
        for op in RELOPS:  # ordered longest-first for shared prefixes
            if self.text.startswith(op, self.pos):
                self.pos += len(op)
                return op
        return None

    def posint(self):
        self.skip_spaces()
        m = re.match(r"[0-9]+", self.text[self.pos:])
        if not m:
            self.error("expected a version number")
        self.pos += m.end()
        value = int(m.group())
        if value < 1:
            self.error("version must be positive")
        return value

    def vpkg(self):
        name = self.pkgname()
        op = self.relop()
        if op is None:
            return VPkg(name)
        return VPkg(name, VersionConstraint(op, self.posint()))


def _parse_int(lexical, type_tag, lower):
    s = lexical.strip(" ")
    if not _INT_RE.match(s):
        raise LexicalError(type_tag, 0, f"not an integer: {lexical!r}")
    value = int(s)
    if lower is not None and value < lower:
        raise LexicalError(type_tag, 0, f"{value} below the {type_tag} domain")
    return value


def _parse_vpkg(lexical, type_tag="vpkg"):
    sc = _Scanner(lexical, type_tag)
    atom = sc.vpkg()
    if not sc.at_end():
        sc.error("trailing characters")
    return atom


def _parse_vpkglist(lexical, type_tag="vpkglist"):
    sc = _Scanner(lexical, type_tag)
    if sc.at_end():
        return VpkgList()
    items = [sc.vpkg()]
    while sc.take(","):
        items.append(sc.vpkg())
    if not sc.at_end():
        sc.error("trailing characters")
    return VpkgList(tuple(items))


def _parse_formula(lexical):
    sc = _Scanner(lexical, "vpkgformula")
    if sc.at_end():
        sc.error("empty formula (True has no lexical form)")

    def or_fla():
        atoms = [sc.vpkg()]
        while sc.take("|"):
            atoms.append(sc.vpkg())
        return tuple(atoms)

    clauses = [or_fla()]
    while sc.take(","):
        clauses.append(or_fla())
    if not sc.at_end():
        sc.error("trailing characters")
    return VpkgFormula(tuple(clauses))


def _enum_symbols(type_tag):
    m = _ENUM_TAG_RE.match(type_tag)
    if not m:
        raise UnknownType(type_tag)
    return tuple(s.strip() for s in m.group(1).split(",") if s.strip())


def parse_value(type_tag, lexical):
    """Parse a lexical string into a value of the named type.

    Raises LexicalError when the string is outside the type's lexical
    space, UnknownType for an unrecognized type tag.
    """
    if type_tag == "bool":
        s = lexical.strip(" ")
        if s == "true":
            return True
        if s == "false":
            return False
        raise LexicalError("bool", 0, f"not a boolean: {lexical!r}")
    if type_tag == "int":
        return _parse_int(lexical, "int", None)
    if type_tag == "nat":
        return _parse_int(lexical, "nat", 0)
    if type_tag == "posint":
        return _parse_int(lexical, "posint", 1)
    if type_tag == "string":
        return lexical
    if type_tag == "oneliner":
        if "\n" in lexical or "\r" in lexical:
            raise LexicalError("oneliner", 0, "embedded newline")
        return lexical
    if type_tag == "pkgname":
        if not _PKGNAME_RE.match(lexical):
            raise LexicalError("pkgname", 0, f"not a package name: {lexical!r}")
        return lexical
    if type_tag == "vpkg":
        return _parse_vpkg(lexical)
    if type_tag == "veqpkg":
        atom = _parse_vpkg(lexical, "veqpkg")
        if not is_subtype_value(atom, "veqpkg"):
            raise LexicalError("veqpkg", 0, "version constraint other than '='")
        return atom
    if type_tag == "vpkglist":
        return _parse_vpkglist(lexical)
    if type_tag == "veqpkglist":
        lst = _parse_vpkglist(lexical, "veqpkglist")
        for item in lst.items:
            if not is_subtype_value(item, "veqpkg"):
                raise LexicalError("veqpkglist", 0, "version constraint other than '='")
        return lst
    if type_tag == "vpkgformula":
        return _parse_formula(lexical)
    if type_tag.startswith("enum("):
        symbols = _enum_symbols(type_tag)
        s = lexical.strip(" ")
        if s not in symbols:
            raise LexicalError(type_tag, 0, f"{s!r} not in {symbols}")
        return EnumValue(symbols, s)
    raise UnknownType(type_tag)


# ---------------------------------------------------------------------------
# Serialization (canonical: single spaces around relops, ", " between
# list/conjunction elements, " | " between disjuncts)


def serialize_vpkg(atom):
    if atom.constraint.is_top:
        return atom.name
    return f"{atom.name} {atom.constraint.relop} {atom.constraint.version}"


def serialize_value(value):
    """Canonical lexical form of a typed value.

    parse_value(tag, serialize_value(v)) == v for every value with a
    lexical form; the True formula has none and raises SerializeError.
    """
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, EnumValue):
        return value.chosen
    if isinstance(value, VPkg):
        return serialize_vpkg(value)
    if isinstance(value, VpkgList):
        return ", ".join(serialize_vpkg(a) for a in value.items)
    if isinstance(value, VpkgFormula):
        if value.is_true:
            raise SerializeError("the True formula has no lexical form")
        return ", ".join(
            " | ".join(serialize_vpkg(a) for a in clause) for clause in value.clauses
        )
    raise SerializeError(f"cannot serialize {value!r}")


# ---------------------------------------------------------------------------
# Subtyping


def is_subtype_value(value, target):
    """Whether a value belongs to the value space of `target`.

    Implements the down-cast checks along the subtype lattice:
    posint <: nat <: int, pkgname <: oneliner <: string,
    veqpkg <: vpkg and veqpkglist <: vpkglist.
    """
    if target == "bool":
        return isinstance(value, bool)
    if target in ("int", "nat", "posint"):
        if isinstance(value, bool) or not isinstance(value, int):
            return False
        if target == "nat":
            return value >= 0
        if target == "posint":
            return value >= 1
        return True
    if target in ("string", "oneliner", "pkgname"):
        if not isinstance(value, str):
            return False
        if target == "oneliner":
            return "\n" not in value and "\r" not in value
        if target == "pkgname":
            return bool(_PKGNAME_RE.match(value))
        return True
    if target in ("vpkg", "veqpkg"):
        if not isinstance(value, VPkg):
            return False
        if target == "veqpkg":
            return value.constraint.is_top or value.constraint.relop == "="
        return True
    if target in ("vpkglist", "veqpkglist"):
        if not isinstance(value, VpkgList):
            return False
        if target == "veqpkglist":
            return all(is_subtype_value(a, "veqpkg") for a in value.items)
        return True
    if target == "vpkgformula":
        return isinstance(value, VpkgFormula)
    if target.startswith("enum("):
        symbols = _enum_symbols(target)
        return isinstance(value, EnumValue) and value.chosen in symbols
    raise UnknownType(target)
