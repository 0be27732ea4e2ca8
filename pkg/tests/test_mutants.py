from __future__ import annotations

import os
import re
from collections import Counter
from pathlib import Path

import pytest

from mutation_cases import KINDS, MUTANTS
from viewcheck.checker import check_source

GOLDEN = Path(__file__).parent / "golden" / "mutants.txt"


def diagnostics(m):
    text, _, _ = m.apply()
    return check_source(text, m.file).diagnostics


def normalized(m) -> list[str]:
    """Rendered diagnostics with fresh-name counters removed."""
    return [re.sub(r"#\d+", "#", d.render()) for d in diagnostics(m)]


def test_mutants_are_distinct_and_cover_every_kind():
    assert len({m.name for m in MUTANTS}) == len(MUTANTS) >= 40
    assert len({(m.file, m.old, m.new, m.occurrence) for m in MUTANTS}) == len(MUTANTS)
    assert set(Counter(m.kind for m in MUTANTS)) == set(KINDS)


@pytest.mark.parametrize("m", MUTANTS, ids=lambda m: m.name)
def test_mutant_rejected_in_edited_region(m):
    diags = diagnostics(m)
    assert diags, "mutant accepted"
    lo, hi = m.region()
    assert any(d.span and lo <= d.span.line <= hi for d in diags), [d.render() for d in diags]


def test_golden_diagnostics():
    got = "".join(f"== {m.name}\n" + "".join(f"{line}\n" for line in normalized(m))
                  for m in MUTANTS)
    if os.environ.get("VIEWCHECK_REGEN_GOLDEN") or not GOLDEN.exists():
        GOLDEN.parent.mkdir(exist_ok=True)
        GOLDEN.write_text(got)
    assert got == GOLDEN.read_text()
