from __future__ import annotations

import pytest

from conftest import ARRAY_VIEW, check_text
from viewcheck.diagnostics import ViewcheckError
from viewcheck.linear import normalize
from viewcheck.parser import parse_program, parse_static
from viewcheck.statics import StaticEnv, elab_static, entails, satisfiable, sort_check
from viewcheck.syntax import (
    SAddr, SCon, SExists, SInt, SOp, Sort, SVar, VAt, VBox, VTAnd,
)
from viewcheck.views import declare_abbrev, elaborate_dataview, expand_viewdef

ADDR, INT, BOOL, TYPE = Sort.ADDR, Sort.INT, Sort.BOOL, Sort.TYPE


def prop(text, sigma):
    return elab_static(StaticEnv(), sigma, parse_static(text), BOOL)[0]


# -- sorts ----------------------------------------------------------------------


def test_address_plus_integer_is_an_address():
    assert sort_check({"l": ADDR, "i": INT}, parse_static("l + i")) == ADDR


def test_equation_is_boolean():
    assert sort_check({}, parse_static("0 == 0")) == BOOL


def test_at_view_needs_an_address():
    with pytest.raises(ViewcheckError):
        sort_check({"a": TYPE}, parse_static("a @ a"))


def test_unbound_static_variable():
    with pytest.raises(ViewcheckError):
        sort_check({}, parse_static("n + 1"))


# -- linear normal forms ----------------------------------------------------------


def test_normalize_collects_terms():
    lf = normalize(SOp("+", (SOp("+", (SVar("l"), SInt(1))), SOp("-", (SVar("i"), SInt(1))))))
    assert lf.const == 0 and lf.coeffs == {SVar("l"): 1, SVar("i"): 1}


def test_nonlinear_product_is_one_opaque_atom():
    lf = normalize(SOp("*", (SVar("i"), SVar("j"))))
    assert lf.const == 0 and len(lf.terms) == 1 and lf.terms[0][1] == 1


def test_address_constant_offset():
    lf = normalize(SOp("+", (SAddr(3), SInt(2))))
    assert lf.is_const() and lf.const == 5


# -- entailment -------------------------------------------------------------------


@pytest.mark.parametrize("hyps, goal, expected", [
    (["n >= 0", "~(n == 0)"], "n - 1 >= 0", True),
    (["0 <= i", "i <= n"], "n - i >= 0", True),
    (["i >= 0"], "i > 0", False),
    (["x != 3", "x >= 3", "x <= 4"], "x == 4", True),
    (["2 * x == 1"], "false", True),
    (["x * y >= 1"], "x * y >= 0", True),
])
def test_entails(hyps, goal, expected):
    sigma = {v: INT for v in "inxy"}
    assert entails(sigma, [prop(h, sigma) for h in hyps], prop(goal, sigma)) is expected


@pytest.mark.parametrize("hyps, expected", [
    (["n > 0", "n == 0"], False),
    ([], True),
    (["0 <= i", "i <= n", "i == 0", "n == 0"], True),
])
def test_satisfiable(hyps, expected):
    sigma = {"i": INT, "n": INT}
    assert satisfiable(sigma, [prop(h, sigma) for h in hyps]) is expected


def test_satisfiable_agrees_with_enumeration():
    sigma = {"i": INT, "n": INT}
    hyps = [prop(h, sigma) for h in ("0 <= i", "i <= n", "i == 0", "n == 0")]
    models = [(i, n) for i in range(4) for n in range(4) if 0 <= i <= n and i == 0 and n == 0]
    assert satisfiable(sigma, hyps) is bool(models)


def test_addresses_are_non_negative():
    sigma = {"l": ADDR}
    assert entails(sigma, [], prop("l >= 0", sigma))


def test_entailment_is_monotone():
    sigma = {"i": INT, "n": INT}
    hyps = [prop("0 <= i", sigma), prop("i < n", sigma)]
    goal = prop("n > 0", sigma)
    assert entails(sigma, hyps, goal)
    assert entails(sigma, hyps + [prop("n < 7", sigma)], goal)


# -- dataviews and abbreviations ---------------------------------------------------


def _decls(text):
    env = StaticEnv()
    sigs = {}
    for d in parse_program(text).decls:
        if hasattr(d, "clauses") or type(d).__name__ == "DDataview":
            for s in elaborate_dataview(env, d):
                sigs[s.name] = s
        else:
            declare_abbrev(env, d)
    return env, sigs


def test_array_constructors():
    _, sigs = _decls(ARRAY_VIEW)
    none, some = sigs["ArrayNone"], sigs["ArraySome"]
    assert none.args == () and none.head.args[1] == SInt(0)
    assert [n for n, _ in some.binders] == ["a", "n", "l"]
    assert some.guards == (SOp(">=", (SVar("n"), SInt(0))),)
    assert some.args[0] == VAt(SVar("a"), SVar("l"))
    assert some.args[1] == SCon("arrayView", (SVar("a"), SVar("n"),
                                              SOp("+", (SVar("l"), SInt(1)))))
    assert some.head.args[1] == SOp("+", (SVar("n"), SInt(1)))


LIST = """
dataview slsegView (type, int, addr, addr) =
  | {a:type, l:addr} SlsegNone (a, 0, l, l)
  | {a:type, n:int, first:addr, next:addr, last:addr | n >= 0, first <> null}
    SlsegSome (a, n+1, first, last) of ((a, ptr next) @ first, slsegView (a, n, next, last))
viewdef sllistView (a:type, n:int, l:addr) = slsegView (a, n, l, null)
viewdef circlistView (a:type, n:int, l:addr) = slsegView (a, n, l, l)
"""


def test_segment_constructors():
    _, sigs = _decls(LIST)
    none = sigs["SlsegNone"]
    assert none.head.args[1:] == (SInt(0), SVar("l"), SVar("l"))


def test_viewdef_expansion():
    env, _ = _decls(LIST)
    t, l = SCon("Int"), SVar("l")
    assert expand_viewdef(env, "sllistView", (t, SInt(3), l)) == \
        SCon("slsegView", (t, SInt(3), l, SAddr(0)))
    assert expand_viewdef(env, "circlistView", (t, SVar("n"), l)) == \
        SCon("slsegView", (t, SVar("n"), l, l))


def test_ref_typedef():
    env, _ = _decls("typedef ref (a: type) = [l:addr] '(!(a @ l) | ptr l)")
    t, _ = elab_static(env, {}, parse_static("ref (Int)"), Sort.VIEWTYPE)
    assert isinstance(t, SExists) and t.sort == ADDR
    assert t.body == VTAnd(VBox(VAt(SCon("Int"), SVar(t.var))), SCon("ptr", (SVar(t.var),)))


def test_recursive_viewdef_is_rejected():
    out = check_text(LIST + "viewdef loopView (n:int, l:addr) = loopView (n, l)\n")
    assert not out.ok

