import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _results[int(m.group(1))] = (m.group(2).replace("_", " "), report.outcome, report.duration, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        name, outcome, dur, detail = _results[n]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {n:2d} {status}  {name} ({dur:.1f} s)"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
