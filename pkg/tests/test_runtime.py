from __future__ import annotations

import time

import pytest

from conftest import check_text, checked
from viewcheck.core import Cst, DPVar, DPWild, Let, Lit, LocV, PLocT, Read, Unit, VTup, Write
from viewcheck.erasure import erase, erased_text
from viewcheck.parser import parse_static
from viewcheck.runtime import (
    FuelExhausted, Machine, Store, Stuck, Value, entails_view, run, store_typing_check,
)
from viewcheck.statics import StaticEnv, elab_static
from viewcheck.syntax import SAddr, Sort


def typ(text):
    return elab_static(StaticEnv(), {}, parse_static(text), Sort.TYPE)[0]


def program(main, base="fig9_arraymap.vats"):
    head = open(checked(base).file).read().split("val main")[0]
    out = check_text(head + "val main =\n" + main)
    assert out.ok, [d.render() for d in out.diagnostics]
    return out


def cells_from(store, loc, n):
    return [store.cells[loc + k].value for k in range(n)]


def list_from(store, loc):
    out = []
    while loc:
        out.append(store.cells[loc].value)
        loc = store.cells[loc + 1].loc
    return out


def final_loc(res):
    return erase(res.outcome.term).loc


# -- single steps ---------------------------------------------------------------


def test_read_step_returns_proof_and_value():
    m = Machine(checked("fig2_array.vats"), instrumented=True)
    out = m.step(Store({1: Lit(3)}, 2), Read(PLocT(1), LocV(1)))
    assert out.rule == "read" and out.term == VTup(PLocT(1), Lit(3))


def test_write_step_updates_the_store():
    m = Machine(checked("fig2_array.vats"), instrumented=False)
    store = Store({1: Lit(3)}, 2)
    out = m.step(store, Write(None, LocV(1), Lit(7)))
    assert out.term == Unit() and store.cells == {1: Lit(7)}
    assert out.note == "ST[l_1 := 7]"


def test_dangling_read_is_stuck():
    m = Machine(checked("fig2_array.vats"), instrumented=False)
    assert isinstance(m.step(Store({}, 1), Read(None, LocV(4))), Stuck)


def test_free_then_read_is_stuck():
    # ill-typed by construction: the checker would reject the read after free
    p = Cst("alloc", None, None, (Lit(1),))
    term = Let(DPVar("p"), p,
               Let(DPWild(), Cst("free", None, None, (LocV(1), Lit(1))), Read(None, LocV(1))))
    res = run(checked("fig2_array.vats"), term=term)
    assert isinstance(res.outcome, Stuck) and "dangling" in res.outcome.reason
    assert res.store.cells == {}


def test_fuel():
    out = check_text("fun loop (x: Int): Int = loop (x)\nval main = loop (1)\n")
    res = run(out, fuel=50)
    assert isinstance(res.outcome, FuelExhausted) and res.steps == 50


# -- whole programs against independent oracles --------------------------------


def test_array_map_example():
    res = run(program("""
  let
     val '(pf | p) = alloc (3)
     val '(pf | _) = fill (pf | p, 3, 0)
     prval ArraySome (pf1, ArraySome (pf2, ArraySome (pf3, ArrayNone ()))) = pf
     val '(pf1 | _) = setPtr (pf1 | p, 10)
     val '(pf2 | _) = setPtr (pf2 | p + 1, 20)
     val '(pf3 | _) = setPtr (pf3 | p + 2, 30)
     prval pf = ArraySome {Int} (pf1, ArraySome {Int} (pf2, ArraySome {Int} (pf3, ArrayNone ())))
     val '(pf | _) = arrayMap (pf | p, 3, succ)
  in '(pf | p) end
"""))
    assert cells_from(res.store, final_loc(res), 3) == [11, 21, 31]


@pytest.mark.parametrize("mode", [False, True])
def test_array_map_matches_map(mode):
    cp = checked("fig9_arraymap.vats")
    t0 = time.perf_counter()
    res = run(cp, instrumented=mode)
    assert time.perf_counter() - t0 < 1.0
    assert cells_from(res.store, final_loc(res), 5) == [x + 1 for x in range(10, 15)]


REV = "let val '(pf | p) = build ({n}) {rest} end\n"


@pytest.mark.parametrize("n", [0, 1, 3, 10])
def test_reverse_matches_list_reversal(n):
    built = run(program(REV.format(n=n, rest="in '(pf | p)"), "reverse_demo.vats"))
    before = list_from(built.store, final_loc(built))
    assert before == list(range(n, 0, -1))
    t0 = time.perf_counter()
    res = run(program(REV.format(n=n, rest="val '(pf | q) = reverse (pf | p) in '(pf | q)"),
                      "reverse_demo.vats"))
    assert time.perf_counter() - t0 < 1.0
    assert list_from(res.store, final_loc(res)) == before[::-1]
    assert len(res.store.cells) == 2 * n


def test_reverse_demo_example():
    res = run(checked("reverse_demo.vats"))
    assert list_from(res.store, final_loc(res)) == [1, 2, 3]


@pytest.mark.parametrize("name, expected", [
    ("fig2_array.vats", "20"), ("fig11_refs.vats", "6"), ("fig12_pair_sum.vats", "'(1, true, false)"),
])
def test_corpus_values(name, expected):
    for mode in (False, True):
        res = run(checked(name), instrumented=mode)
        assert isinstance(res.outcome, Value)
        assert erased_text(res.outcome.term) == expected


@pytest.mark.parametrize("name", ["fig2_array.vats", "reverse_demo.vats", "fig12_pair_sum.vats"])
def test_instrumented_oracle_holds_every_step(name):
    res = run(checked(name), instrumented=True, check_every=1)
    assert res.oracle_failures == [] and res.oracle_checks == res.steps + 1


# -- store typing and store entailment -----------------------------------------


def test_store_typing():
    cp = checked("fig2_array.vats")
    assert store_typing_check(cp, Store({1: Lit(3)}), {1: typ("Int")})
    assert store_typing_check(cp, Store({}), {})
    assert not store_typing_check(cp, Store({1: Lit(3)}), {1: typ("Bool")})
    assert not store_typing_check(cp, Store({1: Lit(3)}), {})
    assert not store_typing_check(cp, Store({}), {1: typ("Int")})


def test_store_entailment():
    cp = checked("fig2_array.vats")
    three = Store({1: Lit(1), 2: Lit(2), 3: Lit(3)})
    assert entails_view(cp, three, "arrayView (Int, 3, l)", {"l": SAddr(1)})
    assert not entails_view(cp, three, "arrayView (Int, 2, l)", {"l": SAddr(1)})
    assert not entails_view(cp, three, "arrayView (Bool, 3, l)", {"l": SAddr(1)})
    assert entails_view(cp, Store({}), "arrayView (Int, 0, l)", {"l": SAddr(1)})


def test_store_entailment_of_a_list():
    cp = checked("reverse_demo.vats")
    lst = Store({1: Lit(5), 2: LocV(3), 3: Lit(6), 4: LocV(0)})
    assert entails_view(cp, lst, "sllistView (Int, 2, l)", {"l": SAddr(1)})
    assert not entails_view(cp, lst, "sllistView (Int, 1, l)", {"l": SAddr(1)})
