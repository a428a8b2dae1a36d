import numpy as np
import pytest

_CRITERIA = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def criterion_log():
    """Collects one ``(label, passed, detail)`` entry per acceptance criterion."""

    def log(label, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip()
        _CRITERIA.append(line)
        print(line)
        return passed

    return log


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
