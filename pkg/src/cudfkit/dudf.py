"""DUDF skeleton: typed metadata around opaque distribution-specific
holes, XML serialization, structural validation, and a toy conversion to
CUDF for holes that already contain CUDF stanzas.

Hole payloads are preserved byte-for-byte and never interpreted;
intensional references are stored but never dereferenced.
"""

from __future__ import annotations

import email.utils
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from . import textio
from .model import CudfDocument, RequestItem, validate_document
from .types import EMPTY_LIST

DUDF_NS = "http://www.mancoosi.org/2008/cudf/dudf"
DUDF_VERSION = "1.0"


class SchemaViolation(ValueError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class InvalidDudf(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(v.detail for v in violations))


class ConversionError(ValueError):
    pass


class UnsupportedFormat(ConversionError):
    pass


class IntensionalHole(ConversionError):
    pass


@dataclass(frozen=True)
class Extensional:
    text: str


@dataclass(frozen=True)
class Intensional:
    reference: str  # e.g. a checksum or URL; never dereferenced here


@dataclass(frozen=True)
class PackageList:
    format: str
    payload: object
    filename: str | None = None


@dataclass(frozen=True)
class PackageStatus:
    installer: object  # hole
    meta_installer: object | None = None


@dataclass(frozen=True)
class DudfProblem:
    package_status: PackageStatus
    package_universe: tuple[PackageList, ...] = ()
    action: object = Extensional("")
    desiderata: object | None = None


@dataclass(frozen=True)
class DudfOutcome:
    result: str  # "success" | "failure"
    error: object | None = None  # failure only
    package_status: PackageStatus | None = None  # success only


@dataclass(frozen=True)
class DudfDocument:
    timestamp: str
    uid: str
    distribution: str
    installer: tuple[str, str]  # (name, version)
    meta_installer: tuple[str, str]
    problem: DudfProblem
    outcome: DudfOutcome | None = None
    version: str = DUDF_VERSION


@dataclass(frozen=True)
class DudfViolation:
    path: str
    detail: str
    level: str = "error"  # "error" | "warning"


def validate_dudf(doc, strict=True):
    """Structural and side-condition violations of the DUDF skeleton."""
    out = []
    if doc.version != DUDF_VERSION:
        out.append(DudfViolation("dudf/version", f"version must be {DUDF_VERSION!r}"))
    parsed = email.utils.parsedate_tz(doc.timestamp)
    if parsed is None:
        out.append(DudfViolation("dudf/timestamp", "not an RFC822 date"))
    elif re.search(r"\d{1,2}\s+[A-Za-z]{3}\s+\d{2}(\s|$)", doc.timestamp):
        # obsolete RFC822 two-digit year; parsedate_tz already widened it
        out.append(
            DudfViolation("dudf/timestamp", "obsolete two-digit year", level="warning")
        )
    if not doc.uid:
        out.append(DudfViolation("dudf/uid", "uid must be non-empty"))
    if not doc.distribution:
        out.append(DudfViolation("dudf/distribution", "distribution identifier missing"))
    for label, pair in (("installer", doc.installer), ("meta-installer", doc.meta_installer)):
        if not pair[0]:
            out.append(DudfViolation(f"dudf/{label}/name", "tool name missing"))
    if strict and not doc.problem.package_universe:
        out.append(
            DudfViolation("dudf/problem/package-universe", "no package lists")
        )
    for i, plist in enumerate(doc.problem.package_universe):
        if not plist.format:
            out.append(
                DudfViolation(
                    f"dudf/problem/package-universe/package-list[{i}]",
                    "format identifier must be non-empty",
                )
            )
    if doc.outcome is not None:
        if doc.outcome.result not in ("success", "failure"):
            out.append(DudfViolation("dudf/outcome", "result must be success or failure"))
        if doc.outcome.result == "failure":
            if doc.outcome.error is None:
                out.append(DudfViolation("dudf/outcome/error", "failure carries an error"))
            if doc.outcome.package_status is not None:
                out.append(
                    DudfViolation("dudf/outcome/package-status",
                                  "package-status only on success")
                )
        else:
            if doc.outcome.package_status is None:
                out.append(
                    DudfViolation("dudf/outcome/package-status",
                                  "success carries the new package status")
                )
            if doc.outcome.error is not None:
                out.append(DudfViolation("dudf/outcome/error", "error only on failure"))
    return out


# ---------------------------------------------------------------------------
# XML serialization.  Elements live in the default namespace; annotations
# (format, filename, result, intensional references) become dudf:-prefixed
# attributes since XML attributes do not inherit the default namespace.


def _hole_into(elem, payload):
    if isinstance(payload, Intensional):
        elem.set("dudf:reference", payload.reference)
    else:
        elem.text = payload.text


def _sub(parent, tag, text=None):
    elem = ET.SubElement(parent, tag)
    if text is not None:
        elem.text = text
    return elem


def _status_into(parent, status):
    elem = _sub(parent, "package-status")
    _hole_into(_sub(elem, "installer"), status.installer)
    if status.meta_installer is not None:
        _hole_into(_sub(elem, "meta-installer"), status.meta_installer)


def dudf_to_xml(doc):
    """Serialize a valid DUDF document to XML bytes.

    Sole-problem submissions have no outcome element.
    """
    violations = [v for v in validate_dudf(doc) if v.level == "error"]
    if violations:
        raise InvalidDudf(violations)

    root = ET.Element("dudf")
    root.set("xmlns", DUDF_NS)
    root.set("xmlns:dudf", DUDF_NS)
    root.set("dudf:version", doc.version)
    _sub(root, "timestamp", doc.timestamp)
    _sub(root, "uid", doc.uid)
    _sub(root, "distribution", doc.distribution)
    for tag, (name, version) in (
        ("installer", doc.installer),
        ("meta-installer", doc.meta_installer),
    ):
        tool = _sub(root, tag)
        _sub(tool, "name", name)
        _sub(tool, "version", version)

    problem = _sub(root, "problem")
    _status_into(problem, doc.problem.package_status)
    universe = _sub(problem, "package-universe")
    for plist in doc.problem.package_universe:
        elem = _sub(universe, "package-list")
        elem.set("dudf:format", plist.format)
        if plist.filename is not None:
            elem.set("dudf:filename", plist.filename)
        _hole_into(elem, plist.payload)
    _hole_into(_sub(problem, "action"), doc.problem.action)
    if doc.problem.desiderata is not None:
        _hole_into(_sub(problem, "desiderata"), doc.problem.desiderata)

    if doc.outcome is not None:
        outcome = _sub(root, "outcome")
        outcome.set("dudf:result", doc.outcome.result)
        if doc.outcome.error is not None:
            _hole_into(_sub(outcome, "error"), doc.outcome.error)
        if doc.outcome.package_status is not None:
            _status_into(outcome, doc.outcome.package_status)

    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


# ---------------------------------------------------------------------------
# XML parsing


def _q(tag):
    return f"{{{DUDF_NS}}}{tag}"


def _hole_from(elem, path):
    ref = elem.get(_q("reference"))
    if ref is not None:
        return Intensional(ref)
    return Extensional(elem.text or "")


def _child(elem, tag, path, required=True):
    found = elem.find(_q(tag))
    if found is None and required:
        raise SchemaViolation(f"{path}/{tag}", "missing element")
    return found

def _check_children(elem, allowed, path, strict):
    if not strict:
        return
    for child in elem:
        name = child.tag.split("}")[-1] if "}" in child.tag else child.tag
        if child.tag.startswith(f"{{{DUDF_NS}}}"):
            if name not in allowed:
                raise SchemaViolation(f"{path}/{name}", "unexpected element")
        else:
            raise SchemaViolation(f"{path}/{child.tag}", "foreign namespace")


def _status_from(elem, path, strict):
    _check_children(elem, {"installer", "meta-installer"}, path, strict)
    installer = _child(elem, "installer", path)
    meta = elem.find(_q("meta-installer"))
    return PackageStatus(
        installer=_hole_from(installer, path),
        meta_installer=None if meta is None else _hole_from(meta, path),
    )


def _tool_from(elem, path, strict):
    _check_children(elem, {"name", "version"}, path, strict)
    name = _child(elem, "name", path)
    version = _child(elem, "version", path)
    return (name.text or "", version.text or "")


def xml_to_dudf(data, strict=True):
    """Inverse of dudf_to_xml; rejects foreign elements in strict mode."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise SchemaViolation("/", f"not well-formed XML: {exc}") from exc
    if root.tag != _q("dudf"):
        raise SchemaViolation("/", f"root must be dudf in {DUDF_NS}")
    version = root.get(_q("version"))
    if version is None:
        raise SchemaViolation("dudf", "missing dudf:version attribute")
    _check_children(
        root,
        {"timestamp", "uid", "distribution", "installer", "meta-installer",
         "problem", "outcome"},
        "dudf", strict,
    )

    problem_elem = _child(root, "problem", "dudf")
    _check_children(
        problem_elem,
        {"package-status", "package-universe", "action", "desiderata"},
        "dudf/problem", strict,
    )
    universe_elem = _child(problem_elem, "package-universe", "dudf/problem")
    _check_children(universe_elem, {"package-list"}, "dudf/problem/package-universe", strict)
    package_lists = []
    for i, elem in enumerate(universe_elem.findall(_q("package-list"))):
        fmt = elem.get(_q("format"))
        if not fmt:
            raise SchemaViolation(
                f"dudf/problem/package-universe/package-list[{i}]",
                "missing dudf:format annotation",
            )
        package_lists.append(
            PackageList(
                format=fmt,
                filename=elem.get(_q("filename")),
                payload=_hole_from(elem, "package-list"),
            )
        )
    desiderata_elem = problem_elem.find(_q("desiderata"))
    problem = DudfProblem(
        package_status=_status_from(
            _child(problem_elem, "package-status", "dudf/problem"),
            "dudf/problem/package-status", strict,
        ),
        package_universe=tuple(package_lists),
        action=_hole_from(_child(problem_elem, "action", "dudf/problem"), "action"),
        desiderata=None if desiderata_elem is None else _hole_from(desiderata_elem, "desiderata"),
    )

    outcome = None
    outcome_elem = root.find(_q("outcome"))
    if outcome_elem is not None:
        result = outcome_elem.get(_q("result"))
        if result not in ("success", "failure"):
            raise SchemaViolation("dudf/outcome", "dudf:result must be success or failure")
        _check_children(outcome_elem, {"error", "package-status"}, "dudf/outcome", strict)
        error_elem = outcome_elem.find(_q("error"))
        status_elem = outcome_elem.find(_q("package-status"))
        if result == "failure":
            if status_elem is not None:
                raise SchemaViolation("dudf/outcome/package-status",
                                      "package-status only on success")
            if error_elem is None:
                raise SchemaViolation("dudf/outcome/error", "failure carries an error")
            outcome = DudfOutcome("failure", error=_hole_from(error_elem, "error"))
        else:
            if error_elem is not None:
                raise SchemaViolation("dudf/outcome/error", "error only on failure")
            if status_elem is None:
                raise SchemaViolation("dudf/outcome/package-status",
                                      "success carries the new package status")
            outcome = DudfOutcome(
                "success",
                package_status=_status_from(status_elem, "dudf/outcome/package-status", strict),
            )

    return DudfDocument(
        timestamp=(_child(root, "timestamp", "dudf").text or ""),
        uid=(_child(root, "uid", "dudf").text or ""),
        distribution=(_child(root, "distribution", "dudf").text or ""),
        installer=_tool_from(_child(root, "installer", "dudf"), "dudf/installer", strict),
        meta_installer=_tool_from(
            _child(root, "meta-installer", "dudf"), "dudf/meta-installer", strict
        ),
        problem=problem,
        outcome=outcome,
        version=version,
    )


# ---------------------------------------------------------------------------
# Toy DUDF -> CUDF conversion for holes already containing CUDF stanzas


def _extensional_text(payload, where):
    if isinstance(payload, Intensional):
        raise IntensionalHole(f"{where} is intensional; expand it first")
    return payload.text


def _parse_stanzas(text, where, installed=None):
    if not text.strip():
        return []
    body = text if text.endswith("\n") else text + "\n"
    # borrow the CUDF parser by appending a throwaway problem stanza
    try:
        report = textio.parse_cudf((body + "\nProblem: _\n").encode("utf-8"))
    except textio.FatalParseError as exc:
        raise ConversionError(f"{where}: {exc}") from exc
    if report.recovered_errors:
        reasons = "; ".join(e.reason for e in report.recovered_errors)
        raise ConversionError(f"{where}: {reasons}")
    packages = report.document.packages
    if installed is not None:
        packages = tuple(p.with_installed(installed) for p in packages)
    return list(packages)


def toy_convert(doc, universe_format="cudf-stanzas"):
    """Assemble a CUDF document from extensional holes containing CUDF
    package stanzas and an action hole in problem-stanza syntax."""
    status_text = _extensional_text(doc.problem.package_status.installer, "package-status")
    packages = _parse_stanzas(status_text, "package-status", installed=True)
    for i, plist in enumerate(doc.problem.package_universe):
        if plist.format != universe_format:
            raise UnsupportedFormat(f"package-list format {plist.format!r}")
        text = _extensional_text(plist.payload, f"package-list[{i}]")
        packages.extend(_parse_stanzas(text, f"package-list[{i}]"))

    action_text = _extensional_text(doc.problem.action, "action")
    try:
        report = textio.parse_cudf(
            f"Problem: {doc.uid}\n{action_text}".encode("utf-8")
        )
    except textio.FatalParseError as exc:
        raise ConversionError(
            "action hole did not parse as a problem stanza"
        ) from exc
    if report.recovered_errors:
        raise ConversionError("action hole did not parse as a problem stanza")
    request = report.document.request

    out = CudfDocument(packages=tuple(packages), request=request)
    violations = validate_document(out)
    if violations:
        raise ConversionError("; ".join(v.detail for v in violations))
    return out
