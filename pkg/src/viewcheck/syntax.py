"""Abstract syntax: static terms, the surface program tree, and sorts.

Static terms cover addresses, integers, propositions, types, views and
viewtypes; which of these a node denotes is decided by sort checking.
Every node carries a ``span`` that is excluded from equality, so two trees
compare equal modulo source positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def contains_line(self, line: int) -> bool:
        return self.line <= line <= self.end_line

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def join(a: Optional[Span], b: Optional[Span]) -> Optional[Span]:
    if a is None:
        return b
    if b is None:
        return a
    return Span(a.line, a.col, b.end_line, b.end_col)


def _span():
    return field(default=None, compare=False, repr=False)


class Sort(Enum):
    ADDR = "addr"
    BOOL = "bool"
    INT = "int"
    VIEW = "view"
    TYPE = "type"
    VIEWTYPE = "viewtype"

    def __str__(self) -> str:
        return self.value


SORT_NAMES = {s.value: s for s in Sort}
SORT_NAMES["t@ype"] = Sort.TYPE


# ---------------------------------------------------------------------------
# static terms


class Static:
    span: Optional[Span]


@dataclass(frozen=True)
class SVar(Static):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SInt(Static):
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SBool(Static):
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SAddr(Static):
    """Address constant l_n; ``null`` is l_0."""

    index: int
    span: Optional[Span] = _span()


INT_OPS = {"+", "-", "*", "/", "neg"}
CMP_OPS = {"<=", ">=", "<", ">", "==", "!="}
BOOL_OPS = {"not", "&&", "||", "=>"}


@dataclass(frozen=True)
class SOp(Static):
    """Integer/address arithmetic, comparisons and propositional connectives."""

    op: str
    args: tuple[Static, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SCon(Static):
    """Named constructor application: Int, int(I), ptr(L), unit, top, dataviews,
    viewdef and typedef abbreviations."""

    name: str
    args: tuple[Static, ...] = ()
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TTuple(Static):
    """Product type T1 * ... * Tn (n >= 2)."""

    items: tuple[Static, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TArrow(Static):
    """Function type; ``once`` selects the ->0 arrow that may capture linear context."""

    dom: Static
    cod: Static
    once: bool = False
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VAt(Static):
    typ: Static
    addr: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VOne(Static):
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VTensor(Static):
    items: tuple[Static, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VLolli(Static):
    """Linear implication between views (the type of proof functions)."""

    dom: Static
    cod: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VTAnd(Static):
    """Viewtype V /\\ VT: a proof of V coupled with a value of VT."""

    view: Static
    vt: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VTImp(Static):
    """V => VT (pure) or V -o0 VT (once)."""

    view: Static
    vt: Static
    once: bool = False
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SGuard(Static):
    """B => X: usable only where B is entailed."""

    prop: Static
    body: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SAssert(Static):
    """B /\\ X: carries the fact B."""

    prop: Static
    body: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SForall(Static):
    var: str
    sort: Sort
    body: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SExists(Static):
    var: str
    sort: Sort
    body: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VBox(Static):
    view: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class STuple(Static):
    """Surface '(...) tuple in a static position, resolved by sort checking
    into a tensor, a product, or a V /\\ T pair."""

    left: tuple[Static, ...]
    right: tuple[Static, ...]
    bar: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SList(Static):
    """Surface parenthesised list, only meaningful left of ``@``."""

    items: tuple[Static, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SMeta(Static):
    """Unification variable used while inferring static arguments."""

    name: str
    span: Optional[Span] = _span()


# Type constants.
INT_T = SCon("Int")
BOOL_T = SCon("Bool")
UNIT_T = SCon("unit")
TOP_T = SCon("top")
TRUE = SBool(True)
FALSE = SBool(False)
NULL = SAddr(0)


def s_not(b: Static) -> Static:
    return SOp("not", (b,))


def s_and(*bs: Static) -> Static:
    out: Optional[Static] = None
    for b in bs:
        out = b if out is None else SOp("&&", (out, b))
    return TRUE if out is None else out


def s_eq(a: Static, b: Static) -> Static:
    return SOp("==", (a, b))


def s_add(a: Static, b: Static) -> Static:
    if isinstance(b, SInt) and b.value == 0:
        return a
    return SOp("+", (a, b))


def tensor(items) -> Static:
    items = tuple(items)
    if not items:
        return VOne()
    if len(items) == 1:
        return items[0]
    return VTensor(items)


def product(items) -> Static:
    items = tuple(items)
    if not items:
        return UNIT_T
    if len(items) == 1:
        return items[0]
    return TTuple(items)


# ---------------------------------------------------------------------------
# surface expressions (proofs and dynamic terms share one grammar)


class Expr:
    span: Optional[Span]


@dataclass(frozen=True)
class EVar(Expr):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EInt(Expr):
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EBool(Expr):
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ETuple(Expr):
    """'(p1, ... | v1, ...); without a bar all items sit in ``left``."""

    left: tuple[Expr, ...]
    right: tuple[Expr, ...]
    bar: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ECall(Expr):
    """f {statics} (g1 | g2 | g3): up to three argument groups."""

    fn: Expr
    sargs: Optional[tuple[Static, ...]]
    groups: tuple[tuple[Expr, ...], ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EBinOp(Expr):
    op: str
    left: Expr
    right: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EIf(Expr):
    cond: Expr
    then: Expr
    els: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ESif(Expr):
    """Static conditional on a proposition, used to build proofs."""

    prop: Static
    then: Expr
    els: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ELet(Expr):
    decls: tuple["Decl", ...]
    body: Expr
    span: Optional[Span] = _span()


# patterns


class Pat:
    span: Optional[Span]


@dataclass(frozen=True)
class PVar(Pat):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PWild(Pat):
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PTuple(Pat):
    left: tuple[Pat, ...]
    right: tuple[Pat, ...]
    bar: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PCon(Pat):
    name: str
    args: tuple[Pat, ...]
    span: Optional[Span] = _span()


# declarations


@dataclass(frozen=True)
class Quant:
    """One {a:s, ... | B, ...} block; binders and guards may each be empty."""

    binders: tuple[tuple[str, Sort], ...]
    guards: tuple[Static, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Param:
    name: str
    typ: Optional[Static]
    span: Optional[Span] = _span()


class Decl:
    span: Optional[Span]


@dataclass(frozen=True)
class DVal(Decl):
    pat: Pat
    expr: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DPrval(Decl):
    pat: Pat
    expr: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DFun(Decl):
    """fun/prfun definition. ``groups`` follows the call-site convention:
    one group = all dynamic (fun) or all proof (prfun); two = proofs | values;
    three = invariant proofs | proofs | values."""

    kind: str
    name: str
    quants: tuple[Quant, ...]
    metric: Optional[tuple[Static, ...]]
    groups: tuple[tuple[Param, ...], ...]
    result: Optional[Static]
    body: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ConClause:
    quant: Optional[Quant]
    name: str
    indices: tuple[Static, ...]
    args: Optional[tuple[Static, ...]]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DDataview(Decl):
    name: str
    sorts: tuple[Sort, ...]
    clauses: tuple[ConClause, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DAbbrev(Decl):
    """viewdef or typedef."""

    kind: str
    name: str
    params: tuple[tuple[str, Sort], ...]
    body: Static
    span: Optional[Span] = _span()


@dataclass
class Program:
    decls: list[Decl]
    file: str = "<input>"

    def __eq__(self, other):
        return isinstance(other, Program) and self.decls == other.decls


Node = Union[Static, Expr, Pat, Decl, Program, Quant, Param, ConClause]
