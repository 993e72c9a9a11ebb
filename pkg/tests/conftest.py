import pytest

from oddsrate.testing import Method, calibrate_many


class CalibrationCache:
    """Null distributions computed once per session and shared across tests."""

    def __init__(self):
        self._store = {}

    def get(self, method, n, reps=10_000, seed=0):
        key = (n, reps, seed)
        if key not in self._store:
            self._store[key] = calibrate_many([Method.KT, Method.KS], n, reps, seed, workers=4)
        return self._store[key][Method(method)]


@pytest.fixture(scope="session")
def calibrations():
    return CalibrationCache()


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
