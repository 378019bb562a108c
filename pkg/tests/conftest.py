import time
from contextlib import contextmanager

import pytest

_RESULTS: list[str] = []


@contextmanager
def _track(name: str, limit: float | None):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"FAIL  {name}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        _RESULTS.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        line = f"FAIL  {name}: took {elapsed:.2f}s, limit {limit:.0f}s"
        _RESULTS.append(line)
        print(line)
        pytest.fail(line)
    line = f"PASS  {name} ({elapsed:.2f}s)"
    _RESULTS.append(line)
    print(line)


@pytest.fixture
def criterion():
    """``with criterion("name", limit=seconds): ...`` records one result line."""
    return _track


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in _RESULTS:
            terminalreporter.write_line(line)
