import re

_criteria: dict[str, list[tuple[str, str]]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+)", report.nodeid)
    if not m or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    _criteria.setdefault(m.group(1), []).append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria, key=int):
        results = _criteria[num]
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        detail = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {num}: {status} [{len(results) - len(failed)}/{len(results)} checks]{detail}")
