import functools

import pytest

from annealgap.spectrum import saddle_search


@functools.lru_cache(maxsize=None)
def cached_saddle(j, p=3):
    """Saddle results are expensive at large j and shared between tests."""
    return saddle_search(j, p)


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _report(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return _report
