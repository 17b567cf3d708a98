import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_results: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    cid, title = marker.args
    entry = _results.setdefault(cid, {"title": title, "ok": True, "seconds": 0.0, "n": 0})
    entry["ok"] = entry["ok"] and report.passed
    entry["seconds"] += report.duration
    entry["n"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_results, key=lambda c: int(c[2:])):
        e = _results[cid]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(
            f"{cid} {status} ({e['n']} checks, {e['seconds']:.2f}s) {e['title']}")
