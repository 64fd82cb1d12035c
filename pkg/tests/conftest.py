import pytest

from qhcodes.codes import ProjectiveSystem, weight_distribution
from qhcodes.fields import build_field
from qhcodes.varieties import VEps, enumerate_variety

# criterion number -> (ok, detail), filled by the acceptance tests
CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "property: invariant checks runnable on their own (-m property)")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def tower3():
    return build_field(3)


@pytest.fixture(scope="session")
def tower5():
    return build_field(5)


@pytest.fixture(scope="session")
def v3(tower3):
    return enumerate_variety(VEps.of(tower3, 3))


@pytest.fixture(scope="session")
def v4(tower3):
    return enumerate_variety(VEps.of(tower3, 4))


@pytest.fixture(scope="session")
def v3_e5(tower5):
    return enumerate_variety(VEps.of(tower5, 3))


@pytest.fixture(scope="session")
def sys3(v3):
    return ProjectiveSystem.from_pointset(v3)


@pytest.fixture(scope="session")
def sys4(v4):
    return ProjectiveSystem.from_pointset(v4)


@pytest.fixture(scope="session")
def table3(sys3):
    return weight_distribution(sys3)
