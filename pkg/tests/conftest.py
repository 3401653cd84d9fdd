import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


def pytest_runtest_logreport(report):
    marker = dict(report.user_properties).get("acceptance")
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        details = dict(report.user_properties).get("detail", "")
        _acceptance[(number, report.nodeid)] = (title, report.outcome, details)


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            item.user_properties.append(("acceptance", tuple(marker.args)))


@pytest.fixture
def detail(request):
    """Record measured values shown next to the acceptance line."""
    def note(text):
        props = request.node.user_properties
        props[:] = [p for p in props if p[0] != "detail"]
        props.append(("detail", text))
    return note


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (number, _), (title, outcome, details) in sorted(_acceptance.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome.upper())
        line = f"[{status}] {number}. {title}"
        if details:
            line += f"  ({details})"
        terminalreporter.write_line(line)
