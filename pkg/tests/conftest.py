import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

SUITE_BUDGET = 120.0
_RESULTS = {}
_START = time.perf_counter()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def record():
    """``record(criterion, ok, detail)`` stores one acceptance line."""
    def _record(criterion, ok, detail=""):
        _RESULTS[criterion] = (bool(ok), detail)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    elapsed = time.perf_counter() - _START
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_RESULTS):
        ok, detail = _RESULTS[key]
        tr.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    ok = elapsed < SUITE_BUDGET
    tr.write_line(f"suite runtime: {'PASS' if ok else 'FAIL'}  {elapsed:.1f} s "
                  f"(budget {SUITE_BUDGET:.0f} s)")


def pytest_sessionfinish(session, exitstatus):
    if _RESULTS and time.perf_counter() - _START >= SUITE_BUDGET and exitstatus == 0:
        session.exitstatus = 1
