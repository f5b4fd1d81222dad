"""Collects one pass/fail line per acceptance criterion.

A criterion may be split over several tests; it passes only if every one of
them passes.
"""

_results: dict = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    number, title = marker.args
    entry = _results.setdefault(number, {"title": title, "ok": True, "parts": []})
    if call.when == "call" or call.excinfo is not None:
        passed = call.excinfo is None
        if call.when == "call" or not passed:
            entry["parts"].append((item.name, passed))
            entry["ok"] = entry["ok"] and passed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE [{status}] {number:2d} {entry['title']}")
        for name, passed in entry["parts"]:
            if not passed:
                terminalreporter.write_line(f"    failed: {name}")
