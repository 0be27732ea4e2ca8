from __future__ import annotations

import dataclasses
import re

import pytest

from conftest import CORPUS_FILES, checked
from viewcheck.erasure import erase, erase_fundef, erase_program, fundef_surface
from viewcheck.parser import parse_program
from viewcheck.printer import pp_decl
from viewcheck.syntax import Param, PVar

REFERENCE = {
    "getFirst": "fun getFirst (p) = let val x = getPtr p in x end",
    "get": "fun get (p, i) = let val x = getFirst (p + i) in x end",
}


def binders(node, out):
    if isinstance(node, (Param, PVar)) and node.name not in out:
        out.append(node.name)
    if dataclasses.is_dataclass(node):
        for f in dataclasses.fields(node):
            binders(getattr(node, f.name), out)
    elif isinstance(node, (tuple, list)):
        for x in node:
            binders(x, out)
    return out


def alpha_normal(decl) -> str:
    """Printed form with bound names replaced by their binding order."""
    names = {n: f"_v{k}" for k, n in enumerate(binders(decl, []))}
    return re.sub(r"[A-Za-z_][A-Za-z0-9_']*", lambda m: names.get(m.group(0), m.group(0)),
                  pp_decl(decl))


def erased_decl(name):
    return fundef_surface(erase_fundef(checked("fig2_array.vats").funs[name]))


@pytest.mark.parametrize("name", sorted(REFERENCE))
def test_erasure_matches_reference_form(name):
    (reference,) = parse_program(REFERENCE[name]).decls
    assert alpha_normal(erased_decl(name)) == alpha_normal(reference)


def test_alpha_normal_distinguishes_free_names():
    (a,) = parse_program("fun f (p) = g p").decls
    (b,) = parse_program("fun f (q) = h q").decls
    (c,) = parse_program("fun f (q) = g q").decls
    assert alpha_normal(a) == alpha_normal(c) != alpha_normal(b)


@pytest.mark.parametrize("name", CORPUS_FILES)
def test_erasure_is_idempotent(name):
    cp = checked(name)
    for fd in cp.funs.values():
        once = erase_fundef(fd)
        assert erase_fundef(once) == once
    if cp.main is not None:
        assert erase(erase(cp.main)) == erase(cp.main)


def test_proof_free_code_is_unchanged():
    fd = checked("fig9_arraymap.vats").funs["succ"]
    assert erase(fd.body) == fd.body


def test_erased_program_has_no_proofs():
    text = erase_program(checked("fig2_array.vats"))
    assert "getPtr p" in text
    assert "prfun" not in text and "splitLemma" not in text and "|" not in text
    assert parse_program(text).decls
