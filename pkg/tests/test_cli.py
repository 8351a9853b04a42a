import json
from pathlib import Path

import pytest

from cudfkit import cli, dudf, textio
from cudfkit.dudf import (
    DudfProblem,
    Extensional,
    PackageList,
    PackageStatus,
)

GOLDEN = Path(__file__).parent / "golden"

MTA = (GOLDEN / "mta.cudf").read_bytes()


@pytest.fixture
def mta_path(tmp_path):
    path = tmp_path / "mta.cudf"
    path.write_bytes(MTA)
    return str(path)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# -- check --------------------------------------------------------------------

def test_check_valid(mta_path, capsys):
    assert cli.main(["check", mta_path]) == 0
    out = capsys.readouterr().out
    assert "packages: 2" in out


def test_check_strict_flags_recovered_errors(tmp_path, capsys):
    path = write(tmp_path, "bad.cudf",
                 "Package: aa\nVersion: zero\n\nProblem: pb\n")
    assert cli.main(["check", path]) == 0
    assert cli.main(["check", path, "--strict"]) == 1
    assert "warning" in capsys.readouterr().err


def test_check_json(mta_path, capsys):
    assert cli.main(["check", mta_path, "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["packages"] == 2
    assert payload["recovered_errors"] == []
    assert payload["violations"] == []


def test_check_fatal_file(tmp_path):
    path = write(tmp_path, "nop.cudf", "Package: aa\nVersion: 1\n")
    assert cli.main(["check", path]) == 1


def test_missing_file_is_usage_error():
    assert cli.main(["check", "/no/such/file.cudf"]) == 2


# -- fmt ----------------------------------------------------------------------

def test_fmt_idempotent(mta_path, tmp_path, capsysbinary):
    assert cli.main(["fmt", mta_path]) == 0
    once = capsysbinary.readouterr().out
    path2 = tmp_path / "once.cudf"
    path2.write_bytes(once)
    assert cli.main(["fmt", str(path2)]) == 0
    assert capsysbinary.readouterr().out == once


def test_fmt_fatal(tmp_path, capsysbinary):
    path = write(tmp_path, "two.cudf", "Problem: one\n\nProblem: two\n")
    assert cli.main(["fmt", path]) == 1


# -- solve + verify -----------------------------------------------------------

def test_solve_then_verify(mta_path, tmp_path, capsys):
    out = str(tmp_path / "solution.cudf")
    assert cli.main(
        ["solve", mta_path, "--criterion", "min-new", "--out", out]
    ) == 0
    assert "cost: 0" in capsys.readouterr().out
    assert cli.main(
        ["verify", "--problem", mta_path, "--solution", out]
    ) == 0
    entries = textio.parse_solution(Path(out).read_bytes())
    assert [key for key, _ in entries] == [("postfix", 2)]


def test_solve_to_stdout(mta_path, capsysbinary):
    assert cli.main(["solve", mta_path, "--criterion", "min-new"]) == 0
    out = capsysbinary.readouterr().out
    assert b"Package: postfix" in out


def test_verify_rejects_bad_solution(mta_path, tmp_path, capsys):
    bad = write(tmp_path, "bad.sol",
                "Package: sendmail\nVersion: 1\nInstalled: true\n\n"
                "Package: postfix\nVersion: 2\nInstalled: true\n")
    code = cli.main(["verify", "--problem", mta_path, "--solution", bad,
                     "--json"])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False
    clauses = {item["clause"] for item in payload["violations"]}
    assert "consistency/conflicts" in clauses
    assert "remove" in clauses


def test_verify_unknown_key_is_usage_error(mta_path, tmp_path):
    bad = write(tmp_path, "bad.sol",
                "Package: exim\nVersion: 9\nInstalled: true\n")
    assert cli.main(["verify", "--problem", mta_path, "--solution", bad]) == 2


def test_solve_unsatisfiable(tmp_path):
    path = write(tmp_path, "unsat.cudf",
                 "Package: aa\nVersion: 1\nDepends: bb\n\n"
                 "Problem: pb\nInstall: aa\n")
    assert cli.main(["solve", path, "--criterion", "min-new"]) == 1


def test_solve_budget_exhausted(mta_path):
    assert cli.main(
        ["solve", mta_path, "--criterion", "min-new", "--budget", "1"]
    ) == 3


def test_cost_flag_exclusivity(mta_path):
    assert cli.main(["cost", mta_path]) == 2
    assert cli.main(["cost", mta_path, "--criterion", "min-removed",
                     "--cost-property", "Cost"]) == 2


def test_cost_presets_and_properties(tmp_path, capsys):
    path = write(
        tmp_path, "sized.cudf",
        "Package: aa\nVersion: 1\nInstalled: true\nInstalled-Size: 40\n\n"
        "Package: bb\nVersion: 1\nInstalled-Size: 7\n\n"
        "Problem: pb\n",
    )
    assert cli.main(["cost", path, "--criterion", "installed-size"]) == 0
    assert capsys.readouterr().out.strip() == "40"
    assert cli.main(["cost", path, "--criterion", "min-removed"]) == 0
    assert capsys.readouterr().out.strip() == "-1"
    assert cli.main(["cost", path, "--cost-property", "Installed-Size"]) == 0
    assert capsys.readouterr().out.strip() == "40"


def test_cost_missing_size_property(tmp_path):
    path = write(tmp_path, "bare.cudf",
                 "Package: aa\nVersion: 1\nInstalled: true\n\nProblem: pb\n")
    assert cli.main(["cost", path, "--criterion", "installed-size"]) == 2


# -- dudf ---------------------------------------------------------------------

def dudf_fixture(tmp_path):
    doc = dudf.DudfDocument(
        timestamp="Tue, 18 Aug 2026 09:30:00 +0200",
        uid="cli-test-1",
        distribution="examplix 9.2",
        installer=("exampkg", "1.4"),
        meta_installer=("exampkg-frontend", "0.9"),
        problem=DudfProblem(
            package_status=PackageStatus(
                installer=Extensional("Package: core\nVersion: 1\n")
            ),
            package_universe=(
                PackageList("cudf-stanzas",
                            Extensional("Package: core\nVersion: 2\n")),
            ),
            action=Extensional("Install: core >= 2"),
        ),
    )
    path = tmp_path / "sub.dudf.xml"
    path.write_bytes(dudf.dudf_to_xml(doc))
    return str(path)


def test_dudf_validate_and_show(tmp_path, capsys):
    path = dudf_fixture(tmp_path)
    assert cli.main(["dudf", "validate", path]) == 0
    assert cli.main(["dudf", "show", path]) == 0
    out = capsys.readouterr().out
    assert "uid: cli-test-1" in out
    assert "sole problem" in out


def test_dudf_validate_rejects_broken_xml(tmp_path):
    path = tmp_path / "broken.xml"
    path.write_bytes(b"<not-dudf/>")
    assert cli.main(["dudf", "validate", str(path)]) == 1


def test_dudf_convert_roundtrips_through_check(tmp_path, capsysbinary):
    path = dudf_fixture(tmp_path)
    assert cli.main(["dudf", "convert", path]) == 0
    data = capsysbinary.readouterr().out
    converted = tmp_path / "converted.cudf"
    converted.write_bytes(data)
    assert cli.main(["check", str(converted), "--strict"]) == 0
