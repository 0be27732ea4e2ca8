"""Core terms: the formal proof and dynamic languages, plus desugaring from
the surface tree.

Proof terms and dynamic terms are separate families.  The checker turns a
desugared term into an *elaborated* one in the same families, filling in
static arguments, existential packages and opened witnesses; the runtime
evaluates elaborated terms, and the checker accepts them again unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Optional, Union

from .diagnostics import CheckError
from .syntax import (
    DFun, DPrval, DVal, EBinOp, EBool, ECall, EIf, EInt, ELet, ESif, ETuple, EVar, PCon,
    PTuple, PVar, PWild, Span, Static,
)


def _span():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# proof terms


@dataclass(frozen=True)
class PVarT:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PLocT:
    """Location proof constant; produced only by the runtime."""

    loc: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PUnitT:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PTupT:
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PConT:
    name: str
    sargs: Optional[tuple]
    args: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PCallT:
    """Application of a proof function."""

    fn: str
    sargs: Optional[tuple]
    arg: "Proof"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PLetT:
    pat: "PPat"
    rhs: "Proof"
    body: "Proof"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PSifT:
    prop: Static
    then: "Proof"
    els: "Proof"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PBoxT:
    """viewbox: turns a proof of V into a persistent proof of !V."""

    proof: "Proof"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PBorrowT:
    """Runtime-only: a boxed proof lent to an invariant-preserving call."""

    proof: "Proof"
    span: Optional[Span] = _span()


Proof = Union[PVarT, PLocT, PUnitT, PTupT, PConT, PCallT, PLetT, PSifT, PBoxT, PBorrowT]


# proof patterns


@dataclass(frozen=True)
class PPVar:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PPWild:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PPTup:
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PPCon:
    """Constructor pattern.  After checking, ``binds`` lists, per constructor
    binder, the skolem name it was opened as (None when it was substituted)."""

    name: str
    args: tuple
    binds: Optional[tuple] = None
    span: Optional[Span] = _span()


PPat = Union[PPVar, PPWild, PPTup, PPCon]


# dynamic patterns


@dataclass(frozen=True)
class DPVar:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DPWild:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DPTup:
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DPVT:
    """'(proof patterns | value patterns)."""

    proof: PPat
    dyn: "DPat"
    span: Optional[Span] = _span()


DPat = Union[DPVar, DPWild, DPTup, DPVT]


# ---------------------------------------------------------------------------
# dynamic terms


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Lit:
    value: Union[int, bool]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Unit:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Tup:
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class VTup:
    """A proof coupled with a value: the introduction form of V /\\ VT."""

    proof: Optional[Proof]
    dyn: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Cst:
    """Builtin constant application (arithmetic, alloc, free, isNull, ...)."""

    name: str
    sargs: Optional[tuple]
    proof: Optional[Proof]
    args: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Read:
    proof: Optional[Proof]
    ptr: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Write:
    proof: Optional[Proof]
    ptr: "Dyn"
    val: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App:
    fn: "Dyn"
    sargs: Optional[tuple]
    proof: Optional[Proof]
    arg: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class InvApp:
    """Call of a V-invariant function with a boxed proof of V; yields only the value."""

    fn: "Dyn"
    sargs: Optional[tuple]
    proof: Optional[Proof]
    arg: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class InvRet:
    """Runtime-only: drops the returned invariant proof of an invariant call."""

    body: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    cond: "Dyn"
    then: "Dyn"
    els: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Sif:
    prop: Static
    then: "Dyn"
    els: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Let:
    """val pat = rhs in body; ``opened`` names the witnesses when rhs has an
    existential type and the pattern destructures it."""

    pat: DPat
    rhs: "Dyn"
    body: "Dyn"
    opened: tuple = ()
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PrLet:
    pat: PPat
    proof: Proof
    body: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FunDef:
    """A fun/prfun definition.  Parameter types are surface statics before
    checking and elaborated statics afterwards (``elaborated`` is then set,
    and ``ftype`` holds the full quantified type)."""

    kind: str
    name: str
    binders: tuple
    guards: tuple
    metric: Optional[tuple]
    proof_params: tuple  # ((name, type), ...)
    dyn_params: tuple
    n_inv: int
    result: Optional[Static]
    body: object
    elaborated: bool = False
    ftype: Optional[Static] = None
    span: Optional[Span] = _span()

    @property
    def ppat(self) -> PPat:
        pats = tuple(PPWild() if n == "_" else PPVar(n) for n, _ in self.proof_params)
        if len(pats) == 1:
            return pats[0]
        return PPTup(pats)

    @property
    def dpat(self) -> DPat:
        pats = tuple(DPWild() if n == "_" else DPVar(n) for n, _ in self.dyn_params)
        if len(pats) == 1:
            return pats[0]
        return DPTup(pats)


@dataclass(frozen=True)
class LetFun:
    fd: FunDef
    body: "Dyn"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FixV:
    """A (recursive) local function value."""

    fd: FunDef
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ExPack:
    witnesses: tuple
    body: "Dyn"
    typ: Static
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class LocV:
    """Runtime pointer value l_n."""

    loc: int
    span: Optional[Span] = _span()


Dyn = Union[Var, Lit, Unit, Tup, VTup, Cst, Read, Write, App, InvApp, InvRet, If, Sif, Let,
            PrLet, LetFun, FixV, ExPack, LocV]


# ---------------------------------------------------------------------------
# desugaring


BUILTINS = {
    "alloc", "free", "isNull", "ipred", "isucc", "igt", "ilt", "ige", "ile", "ieq", "ineq",
    "imod", "+", "-", "*", "/",
}

INFIX_TO_BUILTIN = {
    "=": "ieq", "==": "ieq", "<>": "ineq", "!=": "ineq", "<": "ilt", ">": "igt", "<=": "ile",
    ">=": "ige",
}


@dataclass
class Names:
    """What each global name denotes, for the syntax-directed split between
    proofs and values."""

    ctors: set = field(default_factory=set)
    prfuns: set = field(default_factory=set)
    funs: set = field(default_factory=set)


class Desugarer:
    def __init__(self, names: Names):
        self.names = names

    def error(self, msg: str, node, rule: str = "desugar"):
        raise CheckError(rule, msg, getattr(node, "span", None))

    # -- functions ----------------------------------------------------------

    def fundef(self, d: DFun) -> FunDef:
        binders, guards = [], []
        for q in d.quants:
            binders.extend(q.binders)
            guards.extend(q.guards)
        groups = d.groups
        if d.kind == "prfun":
            if len(groups) != 1:
                self.error("a proof function takes a single group of proof parameters", d)
            proof_params, dyn_params, n_inv = groups[0], (), 0
        elif len(groups) == 1:
            proof_params, dyn_params, n_inv = (), groups[0], 0
        elif len(groups) == 2:
            proof_params, dyn_params, n_inv = groups[0], groups[1], 0
        else:
            proof_params, dyn_params, n_inv = groups[0] + groups[1], groups[2], len(groups[0])
        for p in tuple(proof_params) + tuple(dyn_params):
            if p.typ is None:
                self.error(f"parameter '{p.name}' of '{d.name}' needs a type annotation", p,
                           "signature")
        if d.result is None:
            self.error(f"'{d.name}' needs a result type annotation", d, "signature")
        body = self.proof(d.body) if d.kind == "prfun" else self.dyn(d.body)
        return FunDef(d.kind, d.name, tuple(binders), tuple(guards), d.metric,
                      tuple((p.name, p.typ) for p in proof_params),
                      tuple((p.name, p.typ) for p in dyn_params), n_inv, d.result, body,
                      span=d.span)

    # -- patterns -----------------------------------------------------------

    def ppat(self, p) -> PPat:
        if isinstance(p, PVar):
            return PPVar(p.name, span=p.span)
        if isinstance(p, PWild):
            return PPWild(span=p.span)
        if isinstance(p, PCon):
            if p.name not in self.names.ctors:
                self.error(f"unknown proof constructor '{p.name}'", p, "pattern")
            return PPCon(p.name, tuple(self.ppat(a) for a in p.args), span=p.span)
        if isinstance(p, PTuple):
            if p.bar:
                self.error("a proof pattern cannot contain '|'", p, "pattern")
            if len(p.left) == 1:
                return self.ppat(p.left[0])
            return PPTup(tuple(self.ppat(a) for a in p.left), span=p.span)
        self.error("bad proof pattern", p, "pattern")

    def dpat(self, p) -> DPat:
        if isinstance(p, PVar):
            return DPVar(p.name, span=p.span)
        if isinstance(p, PWild):
            return DPWild(span=p.span)
        if isinstance(p, PTuple):
            if p.bar:
                proofs = tuple(self.ppat(a) for a in p.left)
                dyns = tuple(self.dpat(a) for a in p.right)
                pp = proofs[0] if len(proofs) == 1 else PPTup(proofs, span=p.span)
                dp = dyns[0] if len(dyns) == 1 else DPTup(dyns, span=p.span)
                return DPVT(pp, dp, span=p.span)
            if len(p.left) == 1:
                return self.dpat(p.left[0])
            return DPTup(tuple(self.dpat(a) for a in p.left), span=p.span)
        if isinstance(p, PCon):
            self.error("constructor patterns bind proofs; use 'prval'", p, "pattern")
        self.error("bad pattern", p, "pattern")

    # -- proofs -------------------------------------------------------------

    def proof(self, e) -> Proof:
        if isinstance(e, EVar):
            if e.name in self.names.ctors:
                return PConT(e.name, None, (), span=e.span)
            return PVarT(e.name, span=e.span)
        if isinstance(e, ETuple):
            if e.bar:
                self.error("a value tuple '( .. | .. ) appears where a proof is expected", e,
                           "proof-syntax")
            return self.ptuple(e.left, e.span)
        if isinstance(e, ECall) and isinstance(e.fn, EVar):
            name = e.fn.name
            if len(e.groups) > 1:
                self.error(f"'{name}' applied to value arguments inside a proof", e, "proof-syntax")
            args = e.groups[0] if e.groups else ()
            if name == "viewbox":
                if len(args) != 1 or e.sargs is not None:
                    self.error("viewbox takes exactly one proof", e, "viewbox")
                return PBoxT(self.proof(args[0]), span=e.span)
            if name in self.names.ctors:
                return PConT(name, e.sargs, tuple(self.proof(a) for a in args), span=e.span)
            if name in self.names.prfuns:
                return PCallT(name, e.sargs, self.ptuple(args, e.span), span=e.span)
            self.error(f"'{name}' is not a proof constructor or proof function", e.fn,
                       "proof-syntax")
        if isinstance(e, ELet):
            body = self.proof(e.body)
            for d in reversed(e.decls):
                if not isinstance(d, DPrval):
                    self.error("only 'prval' bindings are allowed inside proofs", d,
                               "proof-syntax")
                body = PLetT(self.ppat(d.pat), self.proof(d.expr), body, span=d.span)
            return body
        if isinstance(e, ESif):
            return PSifT(e.prop, self.proof(e.then), self.proof(e.els), span=e.span)
        self.error("a dynamic expression appears where a proof is expected", e, "proof-syntax")

    def ptuple(self, items, span) -> Proof:
        if not items:
            return PUnitT(span=span)
        if len(items) == 1:
            return self.proof(items[0])
        return PTupT(tuple(self.proof(a) for a in items), span=span)

    # -- dynamic terms ------------------------------------------------------

    def dtuple(self, items, span) -> Dyn:
        if not items:
            return Unit(span=span)
        if len(items) == 1:
            return self.dyn(items[0])
        return Tup(tuple(self.dyn(a) for a in items), span=span)

    def dyn(self, e) -> Dyn:
        if isinstance(e, EVar):
            if e.name in self.names.ctors or e.name in self.names.prfuns:
                self.error(f"proof '{e.name}' used as a value", e, "proof-syntax")
            return Var(e.name, span=e.span)
        if isinstance(e, EInt):
            return Lit(e.value, span=e.span)
        if isinstance(e, EBool):
            return Lit(e.value, span=e.span)
        if isinstance(e, ETuple):
            if e.bar:
                return VTup(self.ptuple(e.left, e.span), self.dtuple(e.right, e.span), span=e.span)
            return self.dtuple(e.left, e.span)
        if isinstance(e, EBinOp):
            name = INFIX_TO_BUILTIN.get(e.op, e.op)
            return Cst(name, None, None, (self.dyn(e.left), self.dyn(e.right)), span=e.span)
        if isinstance(e, EIf):
            return If(self.dyn(e.cond), self.dyn(e.then), self.dyn(e.els), span=e.span)
        if isinstance(e, ESif):
            self.error("'sif' forms proofs; use 'if' on a dynamic condition", e, "sif-proof")
        if isinstance(e, ELet):
            return self.let(list(e.decls), self.dyn(e.body))
        if isinstance(e, ECall):
            return self.call(e)
        self.error("unsupported expression", e)

    def let(self, decls, body) -> Dyn:
        for d in reversed(decls):
            if isinstance(d, DVal):
                body = Let(self.dpat(d.pat), self.dyn(d.expr), body, span=d.span)
            elif isinstance(d, DPrval):
                body = PrLet(self.ppat(d.pat), self.proof(d.expr), body, span=d.span)
            elif isinstance(d, DFun):
                if d.kind != "fun":
                    self.error("proof functions must be declared at top level", d)
                body = LetFun(self.fundef(d), body, span=d.span)
            else:
                self.error("only val/prval/fun declarations may appear in 'let'", d)
        return body

    def call(self, e: ECall) -> Dyn:
        if not isinstance(e.fn, EVar):
            self.error("only named functions can be applied", e)
        name = e.fn.name
        groups = e.groups
        if name in self.names.ctors or name in self.names.prfuns or name == "viewbox":
            self.error(f"proof '{name}' used as a value", e.fn, "proof-syntax")
        if not groups:
            self.error(f"'{name}' needs arguments", e)
        if name in ("getPtr", "setPtr") and len(groups) == 2 and e.sargs is None:
            proof = self.ptuple(groups[0], e.span)
            args = groups[1]
            if name == "getPtr":
                if len(args) != 1:
                    self.error("getPtr takes one pointer argument", e, "ty-read")
                return Read(proof, self.dyn(args[0]), span=e.span)
            if len(args) != 2:
                self.error("setPtr takes a pointer and a value", e, "ty-write")
            return Write(proof, self.dyn(args[0]), self.dyn(args[1]), span=e.span)
        if name in BUILTINS and name not in self.names.funs:
            if len(groups) > 2:
                self.error(f"builtin '{name}' takes at most a proof group and a value group", e)
            proof = self.ptuple(groups[0], e.span) if len(groups) == 2 else None
            return Cst(name, e.sargs, proof, tuple(self.dyn(a) for a in groups[-1]), span=e.span)
        if len(groups) == 1:
            proof, arg = PUnitT(span=e.span), self.dtuple(groups[0], e.span)
        elif len(groups) == 2:
            proof, arg = self.ptuple(groups[0], e.span), self.dtuple(groups[1], e.span)
        else:
            proof = self.ptuple(groups[0] + groups[1], e.span)
            arg = self.dtuple(groups[2], e.span)
        return App(Var(name, span=e.fn.span), e.sargs, proof, arg, span=e.span)


CORE_NODES = (PVarT, PLocT, PUnitT, PTupT, PConT, PCallT, PLetT, PSifT, PBoxT, PBorrowT, PPVar,
              PPWild, PPTup, PPCon, DPVar, DPWild, DPTup, DPVT, Var, Lit, Unit, Tup, VTup, Cst,
              Read, Write, App, InvApp, InvRet, If, Sif, Let, PrLet, FunDef, LetFun, FixV, ExPack,
              LocV)


def map_statics(t, f):
    """Apply ``f`` to every static term inside a core term (no binder awareness)."""
    if isinstance(t, tuple):
        return tuple(map_statics(x, f) for x in t)
    if isinstance(t, CORE_NODES):
        changes = {}
        for fl in fields(t):
            if fl.name == "span":
                continue
            old = getattr(t, fl.name)
            new = map_statics(old, f)
            if new is not old:
                changes[fl.name] = new
        return replace(t, **changes) if changes else t
    if isinstance(t, Static):
        return f(t)
    return t


