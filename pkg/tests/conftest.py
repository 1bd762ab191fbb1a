import warnings

import pytest

from tlevy.errors import ScaleSeparationWarning

_ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    """Store a pass/fail line for the terminal summary."""
    def _record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
    return _record


@pytest.fixture(autouse=True)
def _quiet_scale_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScaleSeparationWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
