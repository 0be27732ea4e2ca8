"""Sort checking, substitution and entailment for static terms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .diagnostics import SortError
from .linear import LinForm, entails as _entails, normalize, satisfiable as _satisfiable
from .syntax import (
    CMP_OPS, INT_T, UNIT_T, BOOL_T, TOP_T, SAddr, SAssert, SBool, SCon, SExists, SForall,
    SGuard, SInt, SList, SMeta, SOp, Sort, Static, STuple, SVar, TArrow, TTuple, VAt,
    VBox, VLolli, VOne, VTAnd, VTensor, VTImp, product, s_add, tensor,
)

__all__ = [
    "LinForm", "normalize", "entails", "satisfiable", "sort_check", "StaticEnv",
    "elab_static", "subst_static", "free_svars", "fresh_name", "children", "rebuild",
]

_counter = itertools.count(1)


def fresh_name(base: str) -> str:
    base = base.split("#")[0]
    return f"{base}#{next(_counter)}"


def entails(sigma, hyps, goal) -> bool:
    return _entails(sigma, tuple(hyps), goal)


def satisfiable(sigma, hyps) -> bool:
    return _satisfiable(sigma, tuple(hyps))


# ---------------------------------------------------------------------------
# generic traversal


def children(s: Static) -> tuple:
    if isinstance(s, (SOp, SCon)):
        return s.args
    if isinstance(s, (TTuple, VTensor)):
        return s.items
    if isinstance(s, (TArrow, VLolli)):
        return (s.dom, s.cod)
    if isinstance(s, VAt):
        return (s.typ, s.addr)
    if isinstance(s, VTAnd):
        return (s.view, s.vt)
    if isinstance(s, VTImp):
        return (s.view, s.vt)
    if isinstance(s, (SGuard, SAssert)):
        return (s.prop, s.body)
    if isinstance(s, (SForall, SExists)):
        return (s.body,)
    if isinstance(s, VBox):
        return (s.view,)
    if isinstance(s, STuple):
        return s.left + s.right
    if isinstance(s, SList):
        return s.items
    return ()


def rebuild(s: Static, kids: tuple) -> Static:
    if isinstance(s, (SOp, SCon)):
        return replace(s, args=tuple(kids))
    if isinstance(s, (TTuple, VTensor, SList)):
        return replace(s, items=tuple(kids))
    if isinstance(s, (TArrow, VLolli)):
        return replace(s, dom=kids[0], cod=kids[1])
    if isinstance(s, VAt):
        return replace(s, typ=kids[0], addr=kids[1])
    if isinstance(s, (VTAnd, VTImp)):
        return replace(s, view=kids[0], vt=kids[1])
    if isinstance(s, (SGuard, SAssert)):
        return replace(s, prop=kids[0], body=kids[1])
    if isinstance(s, (SForall, SExists)):
        return replace(s, body=kids[0])
    if isinstance(s, VBox):
        return replace(s, view=kids[0])
    if isinstance(s, STuple):
        n = len(s.left)
        return replace(s, left=tuple(kids[:n]), right=tuple(kids[n:]))
    return s


def free_svars(s: Static) -> set[str]:
    if isinstance(s, SVar):
        return {s.name}
    if isinstance(s, (SForall, SExists)):
        return free_svars(s.body) - {s.var}
    out: set[str] = set()
    for k in children(s):
        out |= free_svars(k)
    return out


def has_meta(s: Static) -> bool:
    if isinstance(s, SMeta):
        return True
    return any(has_meta(k) for k in children(s))


def subst_static(s: Static, mapping: dict) -> Static:
    """Capture-avoiding substitution of static variables (by name)."""
    if not mapping:
        return s
    if isinstance(s, SVar):
        return mapping.get(s.name, s)
    if isinstance(s, (SForall, SExists)):
        inner = {k: v for k, v in mapping.items() if k != s.var}
        if not inner:
            return s
        var, body = s.var, s.body
        clash = set()
        for v in inner.values():
            clash |= free_svars(v)
        if var in clash:
            new = fresh_name(var)
            body = subst_static(body, {var: SVar(new)})
            var = new
        return replace(s, var=var, body=subst_static(body, inner))
    kids = children(s)
    if not kids:
        return s
    return rebuild(s, tuple(subst_static(k, mapping) for k in kids))


def map_static(s: Static, f: Callable[[Static], Optional[Static]]) -> Static:
    """Bottom-up rewrite where ``f`` may replace a node (returning None keeps it)."""
    r = f(s)
    if r is not None:
        return r
    kids = children(s)
    if not kids:
        return s
    return rebuild(s, tuple(map_static(k, f) for k in kids))


# ---------------------------------------------------------------------------
# sort checking / elaboration


@dataclass
class Abbrev:
    kind: str  # "viewdef" | "typedef"
    name: str
    params: tuple[tuple[str, Sort], ...]
    body: Static
    sort: Sort


@dataclass
class StaticEnv:
    """Declared static constructors: dataview heads and abbreviations."""

    dataviews: dict[str, tuple[Sort, ...]] = field(default_factory=dict)
    abbrevs: dict[str, Abbrev] = field(default_factory=dict)


_BASE_TYPES = {"Int": INT_T, "Bool": BOOL_T, "unit": UNIT_T, "top": TOP_T}
_INDEXED = {"int": Sort.INT, "bool": Sort.BOOL, "ptr": Sort.ADDR}


def is_subsort(actual: Sort, expected: Sort) -> bool:
    return actual == expected or (actual == Sort.TYPE and expected == Sort.VIEWTYPE)


def sort_check(sigma: dict, s: Static, env: Optional[StaticEnv] = None) -> Sort:
    return elab_static(env or StaticEnv(), sigma, s)[1]


def elab_static(env: StaticEnv, sigma: dict, s: Static,
                expect: Optional[Sort] = None) -> tuple[Static, Sort]:
    """Resolve names, expand abbreviations and multi-views; return (term, sort)."""
    term, sort = _elab(env, sigma, s, expect)
    if expect is not None and not is_subsort(sort, expect):
        if expect == Sort.ADDR and sort == Sort.INT and isinstance(term, SInt) and term.value >= 0:
            return SAddr(term.value, span=term.span), Sort.ADDR
        raise SortError("sort", f"expected a static term of sort {expect}, found sort {sort}",
                        s.span)
    return term, sort


def _err(msg: str, s: Static):
    raise SortError("sort", msg, s.span)


def _elab(env: StaticEnv, sigma: dict, s: Static, expect: Optional[Sort]):
    if isinstance(s, SInt):
        if expect == Sort.ADDR and s.value >= 0:
            return SAddr(s.value, span=s.span), Sort.ADDR
        return s, Sort.INT
    if isinstance(s, SBool):
        return s, Sort.BOOL
    if isinstance(s, SAddr):
        return s, Sort.ADDR
    if isinstance(s, SVar):
        if s.name not in sigma:
            _err(f"unbound static variable '{s.name}'", s)
        return s, sigma[s.name]
    if isinstance(s, SMeta):
        return s, expect or Sort.INT
    if isinstance(s, SCon):
        return _elab_con(env, sigma, s)
    if isinstance(s, SOp):
        return _elab_op(env, sigma, s, expect)
    if isinstance(s, VAt):
        addr, _ = elab_static(env, sigma, s.addr, Sort.ADDR)
        if isinstance(s.typ, SList):
            views = []
            for i, item in enumerate(s.typ.items):
                t, _ = elab_static(env, sigma, item, Sort.TYPE)
                views.append(VAt(t, s_add(addr, SInt(i)), span=s.span))
            return tensor(views), Sort.VIEW
        t, _ = elab_static(env, sigma, s.typ, Sort.TYPE)
        return VAt(t, addr, span=s.span), Sort.VIEW
    if isinstance(s, VBox):
        v, _ = elab_static(env, sigma, s.view, Sort.VIEW)
        return VBox(v, span=s.span), Sort.VIEW
    if isinstance(s, STuple):
        if s.bar:
            views = [elab_static(env, sigma, v, Sort.VIEW)[0] for v in s.left]
            vals = [elab_static(env, sigma, v, Sort.VIEWTYPE) for v in s.right]
            return VTAnd(tensor(views), product(t for t, _ in vals), span=s.span), Sort.VIEWTYPE
        if not s.left:
            return (VOne(span=s.span), Sort.VIEW) if expect == Sort.VIEW else (UNIT_T, Sort.TYPE)
        items = [elab_static(env, sigma, v) for v in s.left]
        sorts = {so for _, so in items}
        if sorts == {Sort.VIEW}:
            return VTensor(tuple(t for t, _ in items), span=s.span) if len(items) > 1 \
                else items[0][0], Sort.VIEW
        if sorts <= {Sort.TYPE, Sort.VIEWTYPE}:
            so = Sort.VIEWTYPE if Sort.VIEWTYPE in sorts else Sort.TYPE
            return product(t for t, _ in items), so
        _err("tuple mixes views and types; separate views with '|'", s)
    if isinstance(s, SList):
        _err("a parenthesised list of types is only allowed left of '@'", s)
    if isinstance(s, TArrow):
        dom, _ = elab_static(env, sigma, s.dom, Sort.VIEWTYPE)
        cod, _ = elab_static(env, sigma, s.cod, Sort.VIEWTYPE)
        return TArrow(dom, cod, s.once, span=s.span), Sort.TYPE
    if isinstance(s, TTuple):
        items = [elab_static(env, sigma, t, Sort.VIEWTYPE) for t in s.items]
        so = Sort.VIEWTYPE if any(x == Sort.VIEWTYPE for _, x in items) else Sort.TYPE
        return TTuple(tuple(t for t, _ in items), span=s.span), so
    if isinstance(s, VTensor):
        return VTensor(tuple(elab_static(env, sigma, v, Sort.VIEW)[0] for v in s.items),
                       span=s.span), Sort.VIEW
    if isinstance(s, VOne):
        return s, Sort.VIEW
    if isinstance(s, VTAnd):
        v, _ = elab_static(env, sigma, s.view, Sort.VIEW)
        t, _ = elab_static(env, sigma, s.vt, Sort.VIEWTYPE)
        return VTAnd(v, t, span=s.span), Sort.VIEWTYPE
    if isinstance(s, VLolli):
        d, _ = elab_static(env, sigma, s.dom, Sort.VIEW)
        c, _ = elab_static(env, sigma, s.cod, Sort.VIEW)
        return VLolli(d, c, span=s.span), Sort.VIEW
    if isinstance(s, VTImp):
        v, _ = elab_static(env, sigma, s.view, Sort.VIEW)
        t, _ = elab_static(env, sigma, s.vt, Sort.VIEWTYPE)
        return VTImp(v, t, s.once, span=s.span), Sort.TYPE
    if isinstance(s, (SGuard, SAssert)):
        p, _ = elab_static(env, sigma, s.prop, Sort.BOOL)
        b, so = elab_static(env, sigma, s.body, expect)
        return replace(s, prop=p, body=b), so
    if isinstance(s, (SForall, SExists)):
        inner = dict(sigma)
        inner[s.var] = s.sort
        b, so = elab_static(env, inner, s.body, expect)
        return replace(s, body=b), so
    _err(f"unexpected static term {type(s).__name__}", s)


def _elab_con(env: StaticEnv, sigma: dict, s: SCon):
    name, args = s.name, s.args
    if not args and name in sigma:
        return SVar(name, span=s.span), sigma[name]
    if name in _BASE_TYPES:
        if args:
            _err(f"type '{name}' takes no arguments", s)
        return SCon(name, (), span=s.span), Sort.TYPE
    if name in _INDEXED:
        if len(args) != 1:
            _err(f"'{name}' takes exactly one static argument", s)
        a, _ = elab_static(env, sigma, args[0], _INDEXED[name])
        return SCon(name, (a,), span=s.span), Sort.TYPE
    if name in env.dataviews:
        sorts = env.dataviews[name]
        if len(args) != len(sorts):
            _err(f"dataview '{name}' expects {len(sorts)} arguments, got {len(args)}", s)
        out = tuple(elab_static(env, sigma, a, so)[0] for a, so in zip(args, sorts))
        return SCon(name, out, span=s.span), Sort.VIEW
    if name in env.abbrevs:
        ab = env.abbrevs[name]
        if len(args) != len(ab.params):
            _err(f"'{name}' expects {len(ab.params)} arguments, got {len(args)}", s)
        out = [elab_static(env, sigma, a, so)[0] for a, (_, so) in zip(args, ab.params)]
        mapping = {p: a for (p, _), a in zip(ab.params, out)}
        return subst_static(ab.body, mapping), ab.sort
    if not args:
        _err(f"unbound static variable '{name}'", s)
    _err(f"unknown static constructor '{name}'", s)


_ARITH = {"+", "-", "*", "/", "neg"}


def _elab_op(env: StaticEnv, sigma: dict, s: SOp, expect: Optional[Sort]):
    op = s.op
    if op == "*" and len(s.args) == 2:
        # T1 * T2 is a product type when the operands are types
        first, so = elab_static(env, sigma, s.args[0])
        if so in (Sort.TYPE, Sort.VIEWTYPE):
            second, so2 = elab_static(env, sigma, s.args[1], Sort.VIEWTYPE)
            items = first.items if isinstance(first, TTuple) else (first,)
            out_sort = Sort.VIEWTYPE if Sort.VIEWTYPE in (so, so2) else Sort.TYPE
            return TTuple(items + (second,), span=s.span), out_sort
    if op in _ARITH:
        if op == "neg":
            a, _ = elab_static(env, sigma, s.args[0], Sort.INT)
            return SOp(op, (a,), span=s.span), Sort.INT
        a, sa = elab_static(env, sigma, s.args[0])
        if sa not in (Sort.INT, Sort.ADDR):
            _err(f"operator '{op}' expects integer or address operands, found {sa}", s.args[0])
        if sa == Sort.ADDR and op in ("+", "-"):
            b, sb = elab_static(env, sigma, s.args[1])
            if sb not in (Sort.INT, Sort.ADDR) or (op == "+" and sb == Sort.ADDR):
                _err(f"address offset must be an integer, found {sb}", s.args[1])
            res = Sort.INT if sb == Sort.ADDR else Sort.ADDR
            return SOp(op, (a, b), span=s.span), res
        if sa == Sort.ADDR:
            _err(f"operator '{op}' is not defined on addresses", s)
        if op == "+":
            # i + l is the same address as l + i
            b, sb = elab_static(env, sigma, s.args[1])
            if sb == Sort.ADDR:
                return SOp(op, (a, b), span=s.span), Sort.ADDR
            if sb != Sort.INT:
                _err(f"operator '{op}' expects integer operands, found {sb}", s.args[1])
            return SOp(op, (a, b), span=s.span), Sort.INT
        b, _ = elab_static(env, sigma, s.args[1], Sort.INT)
        return SOp(op, (a, b), span=s.span), Sort.INT
    if op in CMP_OPS:
        a, sa = elab_static(env, sigma, s.args[0])
        if sa == Sort.BOOL and op in ("==", "!="):
            b, _ = elab_static(env, sigma, s.args[1], Sort.BOOL)
            return SOp(op, (a, b), span=s.span), Sort.BOOL
        if sa not in (Sort.INT, Sort.ADDR):
            _err(f"comparison expects integer or address operands, found {sa}", s.args[0])
        b, sb = elab_static(env, sigma, s.args[1], sa)
        return SOp(op, (a, b), span=s.span), Sort.BOOL
    if op in ("not", "&&", "||", "=>"):
        args = tuple(elab_static(env, sigma, a, Sort.BOOL)[0] for a in s.args)
        return SOp(op, args, span=s.span), Sort.BOOL
    _err(f"unknown static operator '{op}'", s)

