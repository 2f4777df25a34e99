import functools

import pytest

from dcalg.cli import read_input
from dcalg.dsl import parse
from dcalg.algebra import build_truncated_algebra


@functools.lru_cache(maxsize=None)
def corpus(name):
    return parse(read_input(name)[0])


@functools.lru_cache(maxsize=None)
def algebra(name, w_max, marked=None):
    p = corpus(name).presentation
    if marked is not None:
        p = p.with_marked(marked)
    return build_truncated_algebra(p, w_max)


@pytest.fixture
def load():
    return corpus


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(results):
        ok, detail = results[i]
        terminalreporter.write_line(f"criterion {i}: {'PASS' if ok else 'FAIL'} ({detail})")
