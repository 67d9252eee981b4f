"""Shared pytest hooks.

Collects the outcome of each acceptance criterion test and prints one
pass/fail line per criterion in the terminal summary, so the acceptance
status is visible even when every test passes.
"""

_CRITERION_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    parts = name.split("_")
    # test_criterion_<NN>_<label words...>
    try:
        number = int(parts[2])
    except (IndexError, ValueError):
        return
    label = " ".join(parts[3:])
    outcome = "PASS" if report.passed else "FAIL"
    _CRITERION_RESULTS[number] = (label, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_RESULTS):
        label, outcome = _CRITERION_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} ({label}): {outcome}")
