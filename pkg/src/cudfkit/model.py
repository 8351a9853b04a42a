"""CUDF document model: information items, property schemata, defaults.

A document is an ordered list of package items plus exactly one request
item.  Core property schemata are fixed; extra properties are open-ended
and handled through an explicit SchemaRegistry.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import types
from .types import EMPTY_LIST, TRUE, EnumValue, VpkgFormula, VpkgList

_MISSING = object()

KEEP_ENUM = "enum(version, package, feature)"


class NameCollision(ValueError):
    pass


@dataclass(frozen=True)
class PropertySchema:
    name: str
    value_type: str
    item_kind: str  # "package" | "problem"
    optionality: str  # "required" | "optional"
    default: object = _MISSING

    def __post_init__(self):
        if self.optionality == "required" and self.default is not _MISSING:
            raise ValueError("required properties carry no default")
        if self.default is not _MISSING and not types.is_subtype_value(
            self.default, self.value_type
        ):
            raise ValueError("default outside the property's value space")

    @property
    def has_default(self):
        return self.default is not _MISSING


CORE_PACKAGE_SCHEMATA = {
    "Package": PropertySchema("Package", "pkgname", "package", "required"),
    "Version": PropertySchema("Version", "posint", "package", "required"),
    "Depends": PropertySchema("Depends", "vpkgformula", "package", "optional", TRUE),
    "Conflicts": PropertySchema("Conflicts", "vpkglist", "package", "optional", EMPTY_LIST),
    "Provides": PropertySchema("Provides", "veqpkglist", "package", "optional", EMPTY_LIST),
    "Installed": PropertySchema("Installed", "bool", "package", "optional", False),
    "Keep": PropertySchema("Keep", KEEP_ENUM, "package", "optional"),
}

CORE_PROBLEM_SCHEMATA = {
    "Install": PropertySchema("Install", "vpkglist", "problem", "optional", EMPTY_LIST),
    "Remove": PropertySchema("Remove", "vpkglist", "problem", "optional", EMPTY_LIST),
    "Upgrade": PropertySchema("Upgrade", "vpkglist", "problem", "optional", EMPTY_LIST),
}


@dataclass(frozen=True)
class RawValue:
    """An extra property with no registered schema, kept verbatim."""

    text: str


class SchemaRegistry:
    """Registry of extra-property schemata, keyed by (item kind, name)."""

    def __init__(self, schemata=()):
        self._extra = {}
        for schema in schemata:
            self.register(schema)

    def register(self, schema):
        core = CORE_PACKAGE_SCHEMATA if schema.item_kind == "package" else CORE_PROBLEM_SCHEMATA
        if schema.name in core:
            raise NameCollision(f"{schema.name!r} is a core property")
        if (schema.item_kind, schema.name) in self._extra:
            raise NameCollision(f"{schema.name!r} already registered")
        self._extra[(schema.item_kind, schema.name)] = schema
        return self

    def get(self, item_kind, name):
        return self._extra.get((item_kind, name))

    def package_extras(self):
        return [s for (kind, _), s in self._extra.items() if kind == "package"]


@dataclass(frozen=True)
class PackageItem:
    name: str
    version: int
    depends: VpkgFormula = TRUE
    conflicts: VpkgList = EMPTY_LIST
    provides: VpkgList = EMPTY_LIST
    installed: bool = False
    keep: EnumValue | None = None
    extra: tuple = ()  # sorted tuple of (name, value) pairs

    @property
    def key(self):
        return (self.name, self.version)

    def extra_value(self, name, default=None):
        for prop, value in self.extra:
            if prop == name:
                return value
        return default

    def with_installed(self, flag):
        return replace(self, installed=flag)


def make_extra(mapping):
    """Normalize an extra-property mapping into the stored tuple form."""
    return tuple(sorted(mapping.items()))


@dataclass(frozen=True)
class RequestItem:
    problem_id: str = ""
    install: VpkgList = EMPTY_LIST
    remove: VpkgList = EMPTY_LIST
    upgrade: VpkgList = EMPTY_LIST


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    package: str | None = None
    version: int | None = None


@dataclass(frozen=True)
class CudfDocument:
    packages: tuple[PackageItem, ...] = ()
    request: RequestItem = field(default_factory=RequestItem)

    def lookup(self, name, version):
        """The unique item keyed by (name, version), or None."""
        for item in self.packages:
            if item.name == name and item.version == version:
                return item
        return None

    def domain(self):
        return {item.key for item in self.packages}

    def remove_package(self, name, version):
        """Document with the (name, version) item removed; identity if absent."""
        kept = tuple(p for p in self.packages if p.key != (name, version))
        return replace(self, packages=kept)

    def versions_of(self, name):
        return sorted(item.version for item in self.packages if item.name == name)


def validate_document(doc, registry=None):
    """All global-constraint and schema violations in the document."""
    violations = []
    seen = set()
    for item in doc.packages:
        if item.key in seen:
            violations.append(
                Violation("DuplicateKey", f"duplicate stanza for {item.name} {item.version}",
                          item.name, item.version)
            )
        seen.add(item.key)
        violations.extend(_check_item_types(item, registry))
    return violations


def _check_item_types(item, registry):
    out = []

    def bad(prop, value_type):
        out.append(
            Violation("TypeError", f"{prop} value outside {value_type}",
                      item.name, item.version)
        )

    if not types.is_subtype_value(item.name, "pkgname"):
        bad("Package", "pkgname")
    if not types.is_subtype_value(item.version, "posint"):
        bad("Version", "posint")
    if not types.is_subtype_value(item.depends, "vpkgformula"):
        bad("Depends", "vpkgformula")
    if not types.is_subtype_value(item.conflicts, "vpkglist"):
        bad("Conflicts", "vpkglist")
    if not types.is_subtype_value(item.provides, "veqpkglist"):
        bad("Provides", "veqpkglist")
    if not types.is_subtype_value(item.installed, "bool"):
        bad("Installed", "bool")
    if item.keep is not None and not types.is_subtype_value(item.keep, KEEP_ENUM):
        bad("Keep", KEEP_ENUM)
    for prop, value in item.extra:
        if isinstance(value, RawValue):
            continue
        schema = registry.get("package", prop) if registry else None
        if schema and not types.is_subtype_value(value, schema.value_type):
            bad(prop, schema.value_type)
    return out


def apply_package_defaults(fields, registry=None):
    """Fill in defaults for optional package properties missing in `fields`.

    `fields` maps property name to parsed value; returns a PackageItem.
    Unregistered extras should already be RawValue instances.
    """
    extra = {}
    for prop, value in fields.items():
        if prop not in CORE_PACKAGE_SCHEMATA:
            extra[prop] = value
    if registry:
        for schema in registry.package_extras():
            if schema.name not in extra and schema.has_default:
                extra[schema.name] = schema.default
    keep = fields.get("Keep")
    return PackageItem(
        name=fields["Package"],
        version=fields["Version"],
        depends=fields.get("Depends", TRUE),
        conflicts=fields.get("Conflicts", EMPTY_LIST),
        provides=fields.get("Provides", EMPTY_LIST),
        installed=fields.get("Installed", False),
        keep=keep,
        extra=make_extra(extra),
    )
