"""Binder-aware substitution of closed values, proofs and statics into core terms."""

from __future__ import annotations

from dataclasses import replace

from .core import (
    App, Cst, DPTup, DPVar, DPVT, ExPack, FixV, FunDef, If, InvApp, InvRet, Let, LetFun,
    Lit, LocV, PBorrowT, PBoxT, PCallT, PConT, PLetT, PLocT, PPCon, PPTup, PPVar, PrLet,
    PSifT, PTupT, PUnitT, PVarT, Read, Sif, Tup, Unit, Var, VTup, Write,
)
from .statics import subst_static


def ppat_names(p, out=None):
    """(proof variables, static skolems) bound by a proof pattern."""
    out = out if out is not None else (set(), set())
    if isinstance(p, PPVar):
        out[0].add(p.name)
    elif isinstance(p, PPTup):
        for i in p.items:
            ppat_names(i, out)
    elif isinstance(p, PPCon):
        out[1].update(b for b in (p.binds or ()) if b)
        for i in p.args:
            ppat_names(i, out)
    return out


def dpat_names(p, out=None):
    """(dynamic variables, proof variables, static skolems) bound by a pattern."""
    out = out if out is not None else (set(), set(), set())
    if isinstance(p, DPVar):
        out[0].add(p.name)
    elif isinstance(p, DPTup):
        for i in p.items:
            dpat_names(i, out)
    elif isinstance(p, DPVT):
        pv, sk = ppat_names(p.proof)
        out[1].update(pv)
        out[2].update(sk)
        dpat_names(p.dyn, out)
    return out


class Subst:
    """Simultaneous substitution; every substituted term is closed, so only
    shadowing (not capture) needs care."""

    def __init__(self, dyn=None, proof=None, stat=None):
        self.dyn = dyn or {}
        self.proof = proof or {}
        self.stat = stat or {}

    def empty(self) -> bool:
        return not (self.dyn or self.proof or self.stat)

    def without(self, dyn=(), proof=(), stat=()) -> "Subst":
        if not (set(dyn) & self.dyn.keys() or set(proof) & self.proof.keys()
                or set(stat) & self.stat.keys()):
            return self
        return Subst({k: v for k, v in self.dyn.items() if k not in dyn},
                     {k: v for k, v in self.proof.items() if k not in proof},
                     {k: v for k, v in self.stat.items() if k not in stat})

    def s(self, st):
        if st is None or not self.stat:
            return st
        return subst_static(st, self.stat)

    def ss(self, sts):
        if sts is None or not self.stat:
            return sts
        return tuple(subst_static(x, self.stat) for x in sts)

    # -- proofs -------------------------------------------------------------

    def p(self, t):
        if t is None or self.empty():
            return t
        if isinstance(t, PVarT):
            return self.proof.get(t.name, t)
        if isinstance(t, (PLocT, PUnitT)):
            return t
        if isinstance(t, PTupT):
            return PTupT(tuple(self.p(i) for i in t.items), span=t.span)
        if isinstance(t, PConT):
            return PConT(t.name, self.ss(t.sargs), tuple(self.p(i) for i in t.args), span=t.span)
        if isinstance(t, PCallT):
            return PCallT(t.fn, self.ss(t.sargs), self.p(t.arg), span=t.span)
        if isinstance(t, PLetT):
            pv, sk = ppat_names(t.pat)
            inner = self.without(proof=pv, stat=sk)
            return PLetT(t.pat, self.p(t.rhs), inner.p(t.body), span=t.span)
        if isinstance(t, PSifT):
            return PSifT(self.s(t.prop), self.p(t.then), self.p(t.els), span=t.span)
        if isinstance(t, PBoxT):
            return PBoxT(self.p(t.proof), span=t.span)
        if isinstance(t, PBorrowT):
            return PBorrowT(self.p(t.proof), span=t.span)
        raise TypeError(type(t).__name__)

    # -- dynamic terms ------------------------------------------------------

    def d(self, t):
        if self.empty():
            return t
        if isinstance(t, Var):
            return self.dyn.get(t.name, t)
        if isinstance(t, (Lit, Unit, LocV)):
            return t
        if isinstance(t, Tup):
            return Tup(tuple(self.d(i) for i in t.items), span=t.span)
        if isinstance(t, VTup):
            return VTup(self.p(t.proof), self.d(t.dyn), span=t.span)
        if isinstance(t, Cst):
            return Cst(t.name, self.ss(t.sargs), self.p(t.proof), tuple(self.d(a) for a in t.args),
                       span=t.span)
        if isinstance(t, Read):
            return Read(self.p(t.proof), self.d(t.ptr), span=t.span)
        if isinstance(t, Write):
            return Write(self.p(t.proof), self.d(t.ptr), self.d(t.val), span=t.span)
        if isinstance(t, (App, InvApp)):
            return type(t)(self.d(t.fn), self.ss(t.sargs), self.p(t.proof), self.d(t.arg),
                           span=t.span)
        if isinstance(t, InvRet):
            return InvRet(self.d(t.body), span=t.span)
        if isinstance(t, If):
            return If(self.d(t.cond), self.d(t.then), self.d(t.els), span=t.span)
        if isinstance(t, Sif):
            return Sif(self.s(t.prop), self.d(t.then), self.d(t.els), span=t.span)
        if isinstance(t, Let):
            dv, pv, sk = dpat_names(t.pat)
            inner = self.without(dyn=dv, proof=pv, stat=set(sk) | set(t.opened))
            return Let(t.pat, self.d(t.rhs), inner.d(t.body), t.opened, span=t.span)
        if isinstance(t, PrLet):
            pv, sk = ppat_names(t.pat)
            inner = self.without(proof=pv, stat=sk)
            return PrLet(t.pat, self.p(t.proof), inner.d(t.body), span=t.span)
        if isinstance(t, LetFun):
            fd = self.fundef(t.fd)
            return LetFun(fd, self.without(dyn={t.fd.name}).d(t.body), span=t.span)
        if isinstance(t, FixV):
            return FixV(self.fundef(t.fd), span=t.span)
        if isinstance(t, ExPack):
            return ExPack(self.ss(t.witnesses), self.d(t.body), self.s(t.typ), span=t.span)
        raise TypeError(type(t).__name__)

    def fundef(self, fd: FunDef) -> FunDef:
        inner = self.without(dyn={n for n, _ in fd.dyn_params} | {fd.name},
                             proof={n for n, _ in fd.proof_params},
                             stat={n for n, _ in fd.binders})
        if inner.empty():
            return fd
        body = inner.p(fd.body) if fd.kind == "prfun" else inner.d(fd.body)
        return replace(
            fd, guards=inner.ss(fd.guards),
            proof_params=tuple((n, inner.s(t)) for n, t in fd.proof_params),
            dyn_params=tuple((n, inner.s(t)) for n, t in fd.dyn_params),
            result=inner.s(fd.result), metric=inner.ss(fd.metric), body=body,
            ftype=self.s(fd.ftype))

