from __future__ import annotations

import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from viewcheck.checker import check_source  # noqa: E402
from viewcheck.cli import corpus_root  # noqa: E402

CORPUS_FILES = ("fig2_array.vats", "fig9_arraymap.vats", "reverse_demo.vats",
                "fig11_refs.vats", "fig12_pair_sum.vats", "circlist.vats")


@lru_cache(maxsize=None)
def checked(name: str):
    path = corpus_root() / name
    out = check_source(path.read_text(), str(path))
    assert out.ok, [d.render() for d in out.diagnostics]
    return out


def check_text(text: str, file: str = "<test>"):
    return check_source(text, file)


ARRAY_VIEW = """
dataview arrayView (type, int, addr) =
  | {a:type, l:addr} ArrayNone (a, 0, l)
  | {a:type, n:int, l:addr | n >= 0}
      ArraySome (a, n+1, l) of (a @ l, arrayView (a, n, l+1))
"""


@pytest.fixture
def corpus():
    return checked


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
