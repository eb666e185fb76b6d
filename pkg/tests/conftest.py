from __future__ import annotations

import re

_acceptance_reports: dict[str, bool] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        name = report.nodeid.split("::")[-1]
        name = re.sub(r"\[.*\]$", "", name)  # fold parametrised cases
        passed = report.passed and _acceptance_reports.get(name, True)
        _acceptance_reports[name] = passed


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_reports:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance_reports, key=_criterion_key):
        number, label = _criterion_key(name), _criterion_label(name)
        verdict = "PASS" if _acceptance_reports[name] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number} ({label}): {verdict}")


def _criterion_key(name: str) -> int:
    match = re.search(r"criterion_(\d+)", name)
    return int(match.group(1)) if match else 99


def _criterion_label(name: str) -> str:
    return re.sub(r"^test_criterion_\d+_", "", name)
