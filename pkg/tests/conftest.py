import time
from contextlib import contextmanager

import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Context manager that times one acceptance criterion and records PASS/FAIL."""

    @contextmanager
    def run(number: int, title: str, limit: float = None):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            within = limit is None or elapsed < limit
            budget = f" (limit {limit:g} s)" if limit is not None else ""
            status = "PASS" if ok and within else "FAIL"
            line = f"criterion {number} {status}: {title} in {elapsed:.2f} s{budget}"
            _RESULTS[number] = line
            print(line)
        assert within, f"criterion {number} took {elapsed:.2f} s, limit {limit} s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        terminalreporter.write_line(_RESULTS[number])
