import numpy as np
import pytest

from softnc.convcode import TURBO_RSC, build_trellis


@pytest.fixture(scope="session")
def trellis():
    return build_trellis(TURBO_RSC)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one acceptance line: ``report(number, title, passed, detail)``."""

    def _report(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, bool(passed), detail))
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{number}] {'PASS' if passed else 'FAIL'} {title}: {detail}")
