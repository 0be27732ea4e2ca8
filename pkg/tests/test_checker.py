from __future__ import annotations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import ARRAY_VIEW, check_text, checked
from viewcheck.context import Ctx
from viewcheck.core import Lit, PConT, PLocT, PTupT, PUnitT, PVarT, Unit, Var
from viewcheck.diagnostics import ViewcheckError
from viewcheck.parser import parse_static
from viewcheck.printer import pp_static
from viewcheck.runtime import _checker
from viewcheck.statics import elab_static, satisfiable
from viewcheck.syntax import SAddr, Sort, VAt, VOne, VTensor
from viewcheck.typecheck import builtin_signature

SIGMA = {"a": Sort.TYPE, "n": Sort.INT, "l": Sort.ADDR}


def elab(text, sort=Sort.VIEW, sigma=SIGMA):
    return elab_static(checked("fig2_array.vats").env, sigma, parse_static(text), sort)[0]


def fresh(hyps=("n >= 0",)):
    c = _checker(checked("fig2_array.vats"))
    return c, Ctx(dict(SIGMA), tuple(elab(h, Sort.BOOL) for h in hyps), {}, {})


def with_proofs(c, ctx, **views):
    for name, text in views.items():
        ctx = ctx.with_proof(c.bind(name, elab(text), False))
    return ctx


def rules(text):
    return {d.rule for d in check_text(text).diagnostics}


# -- proofs -------------------------------------------------------------------


def test_array_some_consumes_both_components():
    c, ctx = fresh()
    ctx = with_proofs(c, ctx, pf1="a @ l", pf2="arrayView (a, n, l+1)")
    c.check_proof(ctx, PConT("ArraySome", None, (PVarT("pf1"), PVarT("pf2"))),
                  elab("arrayView (a, n+1, l)"))
    assert c.live == set()


def test_array_none():
    c, ctx = fresh(())
    c.check_proof(ctx, PConT("ArrayNone", None, ()), elab("arrayView (a, 0, l)"))


def test_array_some_needs_its_guard():
    c, ctx = fresh(())
    ctx = with_proofs(c, ctx, pf1="a @ l", pf2="arrayView (a, n, l+1)")
    with pytest.raises(ViewcheckError):
        c.check_proof(ctx, PConT("ArraySome", None, (PVarT("pf1"), PVarT("pf2"))),
                      elab("arrayView (a, n+1, l)"))


def test_proof_used_twice():
    c, ctx = fresh()
    ctx = with_proofs(c, ctx, pf="a @ l")
    with pytest.raises(ViewcheckError, match="more than once"):
        c.synth_proof(ctx, PTupT((PVarT("pf"), PVarT("pf"))))


def test_vw_var():
    c, ctx = fresh()
    ctx = with_proofs(c, ctx, x="a @ l")
    _, v = c.synth_proof(ctx, PVarT("x"))
    assert v == elab("a @ l") and c.live == set()


def test_vw_addr_records_the_location():
    c, ctx = fresh()
    c.loc_types[3] = elab("Int", Sort.TYPE)
    _, v = c.synth_proof(ctx, PLocT(3))
    assert v == VAt(elab("Int", Sort.TYPE), SAddr(3))
    assert c.linear_locs == [3]
    with pytest.raises(ViewcheckError, match="more than once"):
        c.synth_proof(ctx, PLocT(3))


def test_vw_unit():
    c, ctx = fresh()
    _, v = c.synth_proof(ctx, PUnitT())
    assert v == VOne() and c.linear_locs == []


def test_tensor_synthesis():
    c, ctx = fresh()
    ctx = with_proofs(c, ctx, x="a @ l", y="a @ l+1")
    _, v = c.synth_proof(ctx, PTupT((PVarT("x"), PVarT("y"))))
    assert isinstance(v, VTensor) and len(v.items) == 2


# -- pattern matching and totality ------------------------------------------

FIRST = ARRAY_VIEW + """
fun first {a:type, n:int, l:addr | %s} (pf: arrayView (a,n,l) | p: ptr l): '(arrayView (a,n,l) | a) =
  let
     prval ArraySome (pf1, pf2) = pf
     val '(pf1 | x) = getPtr (pf1 | p)
  in '(ArraySome (pf1, pf2) | x) end
"""


def test_match_exhaustive_under_guard():
    assert check_text(FIRST % "n > 0").ok


def test_match_missing_constructor():
    assert "exhaustive" in rules(FIRST % "n >= 0")


def test_null_test_refutes_empty_segment():
    assert checked("reverse_demo.vats").ok


def test_split_lemma_is_total():
    assert "splitLemma" in checked("fig2_array.vats").prfuns


def test_nonrecursive_prfun_needs_no_metric():
    assert check_text(ARRAY_VIEW + """
prfun wrap {a:type, l:addr} (pf: a @ l): arrayView (a, 1, l) = ArraySome (pf, ArrayNone ())
""").ok


def test_non_decreasing_metric():
    text = ARRAY_VIEW + """
prfun f {a:type, i:int, l:addr | i >= 0} .<i>. (pf: arrayView (a, i, l)): arrayView (a, i, l) =
  f {a, i, l} (pf)
"""
    assert "totality" in rules(text)


def test_recursive_prfun_without_metric():
    text = ARRAY_VIEW + """
prfun f {a:type, i:int, l:addr | i >= 0} (pf: arrayView (a, i, l)): arrayView (a, i, l) =
  f {a, i, l} (pf)
"""
    assert "totality" in rules(text)


# -- dynamic typing -----------------------------------------------------------


def test_get_first_type():
    ty = pp_static(checked("fig2_array.vats").funs["getFirst"].ftype)
    assert "n > 0" in ty and "arrayView" in ty and "ptr" in ty


def test_reverse_is_length_preserving():
    ty = pp_static(checked("reverse_demo.vats").funs["reverse"].ftype)
    assert "-> [l:addr] '(slsegView(a, n, l, null)" in ty


def test_literals_and_unit():
    c, ctx = fresh()
    assert pp_static(c.synth_dyn(ctx, Lit(5))[1]) == "int(5)"
    assert pp_static(c.synth_dyn(ctx, Unit())[1]) == "unit"


def test_intuitionistic_variable_is_not_consumed():
    c, ctx = fresh()
    ctx = ctx.with_dyn(c.bind("x", elab("Int", Sort.TYPE), True, kind="dyn"))
    assert c.synth_dyn(ctx, Var("x"))[1] == elab("Int", Sort.TYPE)
    assert c.synth_dyn(ctx, Var("x"))[1] == elab("Int", Sort.TYPE)


@pytest.mark.parametrize("name, parts", [
    ("getPtr", ["@", "ptr"]),
    ("isNull", ["ptr(l) -> bool(l == null)"]),
    ("alloc", ["i >= 0", "l <> null", "arrayView(unit, i, l)"]),
    ("free", ["arrayView", ">= 0"]),
])
def test_builtin_signatures(name, parts):
    text = pp_static(builtin_signature(name))
    for p in parts:
        assert p in text, text


def test_unknown_builtin():
    with pytest.raises(Exception):
        builtin_signature("launchMissiles")


WRITE = ARRAY_VIEW + """
fun put {l:addr} (pf: Int @ l | p: ptr l): '(Bool @ l | unit) = setPtr (pf | p, true)
"""


def test_write_changes_the_stored_type():
    assert check_text(WRITE).ok


IF = ARRAY_VIEW + """
fun g {l:addr} (pf: Int @ l | p: ptr l, b: Bool): '(Int @ l | Int) =
  if b then getPtr (pf | p) else %s
"""


def test_if_branches_agree():
    assert check_text(IF % "getPtr (pf | p)").ok


def test_if_branches_disagree():
    text = ARRAY_VIEW + """
fun g {l:addr} (pf: Int @ l | p: ptr l, b: Bool): Int =
  if b then let val _ = free (ArraySome (pf, ArrayNone ()) | p, 1) in 0 end else 0
"""
    assert "ty-if" in rules(text)


def test_refs_use_invariant_functions():
    assert {"getRef", "setRef"} <= set(checked("fig11_refs.vats").funs) | set(
        checked("fig11_refs.vats").sigs)


REFS = open(checked("fig11_refs.vats").file).read().split("val main")[0]


def test_boxed_proof_is_duplicable():
    assert check_text(REFS + """
fun twice {a:type} (r: ref a): '(a, a) =
  let val '(pf | p) = r in '(getPtr0 (pf | (*none*) | p), getPtr0 (pf | (*none*) | p)) end
""").ok


def test_boxed_then_freed_is_rejected():
    assert "vw-sub" in rules(REFS + """
fun bad {a:type} (r: ref a): unit =
  let val '(pf | p) = r in free (ArraySome (pf, ArrayNone ()) | p, 1) end
""")


def test_invariant_function_must_preserve_its_view():
    assert "ty-sub" in rules(REFS + """
fun setBad {l:addr} (pf: Int @ l | (*none*) | p: ptr l, x: Bool): unit =
  setPtr (pf | p, x)
""")


# -- weakening: an extra consistent hypothesis never breaks a checked program --

FIG2 = open(checked("fig2_array.vats").file).read().split("val main")[0]
GUARD = "{a:type, n:int, i:int, l:addr | 0 <= i, i < n}"


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-6, 6))
def test_weakening(cn, ci, k):
    sigma = {"n": Sort.INT, "i": Sort.INT}
    extra = f"{cn} * n + {ci} * i <= {k}"
    hyps = [elab(h, Sort.BOOL, sigma) for h in ("0 <= i", "i < n", extra)]
    assume(satisfiable(sigma, hyps))
    text = FIG2.replace(GUARD, GUARD[:-1] + ", " + extra + "}")
    assert text != FIG2
    out = check_text(text)
    assert out.ok, [d.render() for d in out.diagnostics]


@pytest.mark.parametrize("name", ["fig2_array.vats", "fig9_arraymap.vats", "reverse_demo.vats",
                                  "fig11_refs.vats", "fig12_pair_sum.vats", "circlist.vats"])
def test_closed_pure_values_hold_no_locations(name):
    assert checked(name).prop1_violations == []
