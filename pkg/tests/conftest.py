import numpy as np
import pytest

from birkhoff_lab.core import BistochasticMatrix, cyclic_permutation, flat_matrix, identity

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        previous = _CRITERIA.get(number)
        # a criterion spread over several tests passes only if all of them pass
        if previous is None or previous[0] == "PASS":
            _CRITERIA[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")


@pytest.fixture
def q_matrix():
    return BistochasticMatrix(0.5 * np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float))


@pytest.fixture
def w3():
    return flat_matrix(3)


@pytest.fixture
def i3():
    return identity(3)


@pytest.fixture
def pi3():
    return cyclic_permutation(3, 1)
