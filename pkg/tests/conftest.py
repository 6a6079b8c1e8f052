from __future__ import annotations

import pytest

from rpes.textformat import FIXTURES, load_fixture

_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            number, title = m.args
            _criteria.setdefault(number, (title, []))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    item_criterion = getattr(report, "criterion", None)
    if item_criterion is not None:
        _criteria[item_criterion][1].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def e0():
    return load_fixture("e0")


@pytest.fixture(scope="session")
def e1():
    return load_fixture("e1")


@pytest.fixture(scope="session")
def e2():
    return load_fixture("e2")


@pytest.fixture(scope="session")
def e3():
    return load_fixture("e3")


@pytest.fixture(scope="session")
def e4():
    return load_fixture("e4")
