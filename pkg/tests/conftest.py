import pytest

from selfaffine.affine_core import validate_system
from selfaffine.files import load_fixture
from selfaffine.neighbor_set import compute

_criteria: list[tuple[str, str, str]] = []


@pytest.fixture(scope="session")
def example():
    """The three diag(3,4) carpets, keyed 'd1', 'd2', 'd3'."""
    return {k: load_fixture(k).to_system() for k in ("d1", "d2", "d3")}


@pytest.fixture(scope="session")
def cantor():
    return validate_system([[3]], [[0], [2]])


@pytest.fixture(scope="session")
def dyadic():
    return validate_system([[2]], [[0], [1]])


@pytest.fixture(scope="session")
def neighbors(example, cantor, dyadic):
    systems = {**example, "cantor": cantor, "dyadic": dyadic}
    return {k: compute(s) for k, s in systems.items()}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "PASS" if rep.passed else "FAIL"
        _criteria.append((mark.args[0], status, mark.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, text in sorted(_criteria, key=lambda r: [int(c) if c.isdigit() else c for c in r[0]]):
        terminalreporter.write_line(f"{status}  criterion {label}: {text}")
