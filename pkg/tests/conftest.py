import numpy as np
import pytest

from wavecrit.spectral import GridSpec

# criterion number -> summary line, filled by test_acceptance
_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def grid2():
    return GridSpec(2, 32)


@pytest.fixture(scope="session")
def acceptance_log():
    def record(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} | {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
