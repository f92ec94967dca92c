import time

import pytest

from defexp.expansion import compute_tables

# criterion number -> (passed, detail), filled in by the acceptance tests
ACCEPTANCE_RESULTS = {}
BUILD_SECONDS = {}


@pytest.fixture(scope="session")
def table10():
    return compute_tables(10)


@pytest.fixture(scope="session")
def table64():
    t0 = time.perf_counter()
    pt = compute_tables(64)
    BUILD_SECONDS[64] = time.perf_counter() - t0
    return pt


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
