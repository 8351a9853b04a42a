def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after the run."""
    try:
        import test_acceptance
    except ImportError:
        return
    labels = test_acceptance.CRITERIA_LABELS
    results = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            name = report.location[2]
            if name in labels:
                results[name] = "PASS" if outcome == "passed" else "FAIL"
    if not results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, (number, label) in sorted(labels.items(), key=lambda kv: kv[1][0]):
        if name in results:
            terminalreporter.write_line(
                f"{results[name]} criterion {number:2d}: {label}"
            )
