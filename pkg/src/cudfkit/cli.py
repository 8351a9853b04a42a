"""Command-line front-end.

Exit codes: 0 success/valid, 1 invalid/unsatisfied, 2 usage or I/O
error, 3 solver budget exceeded.  Diagnostics go to stderr, data to
stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dudf, semantics, solver, textio
from .model import PropertySchema, SchemaRegistry, validate_document

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _read(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise _UsageError(str(exc)) from exc


class _UsageError(Exception):
    pass


def _cost_registry(args):
    """Registry + cost-source from --criterion/--cost-property flags."""
    criterion = getattr(args, "criterion", None)
    cost_property = getattr(args, "cost_property", None)
    if (criterion is None) == (cost_property is None):
        raise _UsageError("exactly one of --criterion / --cost-property is required")
    registry = SchemaRegistry()
    if cost_property:
        registry.register(
            PropertySchema(cost_property, "int", "package", "optional", 0)
        )
    elif criterion in ("installed-size", "download-size"):
        prop = "Installed-Size" if criterion == "installed-size" else "Download-Size"
        registry.register(PropertySchema(prop, "posint", "package", "optional"))
    return registry


def _costs_for(doc, request, args):
    if args.cost_property:
        return {
            p.key: p.extra_value(args.cost_property, 0) for p in doc.packages
        }
    return solver.preset_costs(doc, request, args.criterion)


def cmd_check(args):
    report = textio.parse_cudf(_read(args.path))
    violations = validate_document(report.document)
    payload = {
        "packages": len(report.document.packages),
        "recovered_errors": [
            {"stanza": e.stanza_index, "reason": e.reason}
            for e in report.recovered_errors
        ],
        "violations": [
            {"kind": v.kind, "package": v.package, "version": v.version,
             "reason": v.detail}
            for v in violations
        ],
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(f"packages: {payload['packages']}")
        for e in report.recovered_errors:
            print(f"warning: stanza {e.stanza_index}: {e.reason}", file=sys.stderr)
        for v in violations:
            print(f"invalid: {v.detail}", file=sys.stderr)
    if args.strict and (report.recovered_errors or violations):
        return EXIT_INVALID
    return EXIT_OK


def cmd_fmt(args):
    try:
        report = textio.parse_cudf(_read(args.path))
    except textio.FatalParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.buffer.write(textio.serialize_cudf(report.document))
    return EXIT_OK


def cmd_verify(args):
    problem = textio.parse_cudf(_read(args.problem)).document
    try:
        entries = textio.parse_solution(_read(args.solution))
        after = textio.apply_solution(problem, entries)
    except textio.UnknownSolutionKey as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    verdict = semantics.satisfies_request(problem, problem.request, after)
    if args.json:
        print(json.dumps(_verdict_json(verdict), indent=2))
    elif args.explain:
        _explain(verdict)
    return EXIT_OK if verdict.ok else EXIT_INVALID


def _verdict_json(verdict):
    items = []
    for v in verdict.successor.violations:
        items.append({"clause": f"successor/{v.clause}", "package": v.package,
                      "version": v.version, "reason": v.detail})
    for v in verdict.consistency.violations:
        items.append({"clause": f"consistency/{v.clause}", "package": v.package,
                      "version": v.version, "reason": v.detail})
    for v in verdict.violations:
        items.append({"clause": v.clause, "package": v.package,
                      "version": v.version, "reason": v.detail})
    return {"ok": verdict.ok, "violations": items}


def _explain(verdict):
    report = _verdict_json(verdict)
    print("request satisfied" if report["ok"] else "request violated")
    for item in report["violations"]:
        where = item["package"] or ""
        if item["version"] is not None:
            where += f" {item['version']}"
        print(f"  clause {item['clause']}: {item['reason']} [{where.strip()}]",
              file=sys.stderr)


def cmd_solve(args):
    registry = _cost_registry(args)
    report = textio.parse_cudf(_read(args.path), registry=registry)
    doc = report.document
    costs = _costs_for(doc, doc.request, args)
    result = solver.solve(doc, doc.request, costs, budget=args.budget)
    if result.status == "budget_exceeded":
        print("budget exceeded", file=sys.stderr)
        return EXIT_BUDGET
    if result.status == "no_solution":
        print("no solution", file=sys.stderr)
        return EXIT_INVALID
    data = textio.serialize_solution(result.document)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
        print(f"cost: {result.cost}")
    else:
        sys.stdout.buffer.write(data)
        print(f"cost: {result.cost}", file=sys.stderr)
    return EXIT_OK


def cmd_cost(args):
    registry = _cost_registry(args)
    report = textio.parse_cudf(_read(args.path), registry=registry)
    doc = report.document
    try:
        costs = _costs_for(doc, doc.request, args)
    except solver.MissingSizeProperty as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(solver.installation_cost(doc, costs))
    return EXIT_OK


def cmd_dudf(args):
    data = _read(args.path)
    if args.action == "validate":
        try:
            doc = dudf.xml_to_dudf(data)
        except dudf.SchemaViolation as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return EXIT_INVALID
        violations = dudf.validate_dudf(doc)
        for v in violations:
            print(f"{v.level}: {v.path}: {v.detail}", file=sys.stderr)
        errors = [v for v in violations if v.level == "error"]
        return EXIT_INVALID if errors else EXIT_OK
    if args.action == "show":
        doc = dudf.xml_to_dudf(data)
        kind = "problem/outcome pair" if doc.outcome else "sole problem"
        print(f"dudf {doc.version} ({kind})")
        print(f"  uid: {doc.uid}")
        print(f"  timestamp: {doc.timestamp}")
        print(f"  distribution: {doc.distribution}")
        print(f"  installer: {doc.installer[0]} {doc.installer[1]}")
        print(f"  meta-installer: {doc.meta_installer[0]} {doc.meta_installer[1]}")
        print(f"  package lists: {len(doc.problem.package_universe)}")
        if doc.outcome:
            print(f"  outcome: {doc.outcome.result}")
        return EXIT_OK
    # convert
    try:
        doc = dudf.xml_to_dudf(data)
        cudf_doc = dudf.toy_convert(doc)
    except (dudf.SchemaViolation, dudf.ConversionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.buffer.write(textio.serialize_cudf(cudf_doc))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cudfkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a CUDF file and report problems")
    p.add_argument("path")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fmt", help="write the canonical serialization to stdout")
    p.add_argument("path")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("verify", help="check a solution against a problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--explain", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="find a minimum-cost solution")
    p.add_argument("path")
    p.add_argument("--criterion", choices=solver.CRITERIA)
    p.add_argument("--cost-property")
    p.add_argument("--budget", type=int, default=solver.DEFAULT_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cost", help="cost of the current installation")
    p.add_argument("path")
    p.add_argument("--criterion", choices=solver.CRITERIA)
    p.add_argument("--cost-property")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("dudf", help="DUDF tooling")
    p.add_argument("action", choices=("validate", "show", "convert"))
    p.add_argument("path")
    p.set_defaults(func=cmd_dudf)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except solver.MissingSizeProperty as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except textio.FatalParseError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
