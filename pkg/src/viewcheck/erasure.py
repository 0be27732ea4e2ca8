"""Proof erasure: drop proofs, proof functions and static annotations."""

from __future__ import annotations

from dataclasses import replace

from .core import (
    App, Cst, DPTup, DPVar, DPVT, DPWild, ExPack, FixV, FunDef, If, InvApp, InvRet, Let, LetFun,
    Lit, LocV, PrLet, Read, Sif, Tup, Unit, Var, VTup, Write,
)
from .printer import pp_decl, pp_expr
from .syntax import (
    DFun, DVal, EBinOp, EBool, ECall, EIf, EInt, ELet, ETuple, EVar, Param, PTuple, PVar, PWild,
)


def erase(t):
    """Erase a checked (or runtime) dynamic term to its proof-free core."""
    if isinstance(t, (Var, Lit, Unit, LocV)):
        return t
    if isinstance(t, Tup):
        return Tup(tuple(erase(i) for i in t.items), span=t.span)
    if isinstance(t, VTup):
        return erase(t.dyn)
    if isinstance(t, Cst):
        return Cst(t.name, None, None, tuple(erase(a) for a in t.args), span=t.span)
    if isinstance(t, Read):
        return Read(None, erase(t.ptr), span=t.span)
    if isinstance(t, Write):
        return Write(None, erase(t.ptr), erase(t.val), span=t.span)
    if isinstance(t, (App, InvApp)):
        return App(erase(t.fn), None, None, erase(t.arg), span=t.span)
    if isinstance(t, (InvRet, ExPack)):
        return erase(t.body)
    if isinstance(t, If):
        return If(erase(t.cond), erase(t.then), erase(t.els), span=t.span)
    if isinstance(t, Sif):
        return Sif(t.prop, erase(t.then), erase(t.els), span=t.span)
    if isinstance(t, Let):
        return Let(erase_dpat(t.pat), erase(t.rhs), erase(t.body), span=t.span)
    if isinstance(t, PrLet):
        return erase(t.body)
    if isinstance(t, LetFun):
        return LetFun(erase_fundef(t.fd), erase(t.body), span=t.span)
    if isinstance(t, FixV):
        return FixV(erase_fundef(t.fd), span=t.span)
    raise TypeError(f"cannot erase {type(t).__name__}")


def erase_dpat(p):
    if isinstance(p, DPVT):
        return erase_dpat(p.dyn)
    if isinstance(p, DPTup):
        return DPTup(tuple(erase_dpat(i) for i in p.items), span=p.span)
    return p


def erase_fundef(fd: FunDef) -> FunDef:
    return replace(fd, binders=(), guards=(), metric=None, proof_params=(),
                   dyn_params=tuple((n, None) for n, _ in fd.dyn_params), n_inv=0,
                   result=None, body=erase(fd.body), ftype=None)


# ---------------------------------------------------------------------------
# rendering erased terms in surface syntax


_INFIX = {"+", "-", "*", "/", "igt", "ilt", "ige", "ile", "ieq", "ineq", "imod"}


def to_surface(t):
    if isinstance(t, Var):
        return EVar(t.name)
    if isinstance(t, Lit):
        return EBool(t.value) if isinstance(t.value, bool) else EInt(t.value)
    if isinstance(t, Unit):
        return ETuple((), (), False)
    if isinstance(t, LocV):
        return EVar("null" if t.loc == 0 else f"l_{t.loc}")
    if isinstance(t, Tup):
        return ETuple(tuple(to_surface(i) for i in t.items), (), False)
    if isinstance(t, Cst):
        args = tuple(to_surface(a) for a in t.args)
        if t.name in _INFIX and len(args) == 2:
            return EBinOp(t.name, args[0], args[1])
        return ECall(EVar(t.name), None, (args,))
    if isinstance(t, Read):
        return ECall(EVar("getPtr"), None, ((to_surface(t.ptr),),))
    if isinstance(t, Write):
        return ECall(EVar("setPtr"), None, ((to_surface(t.ptr), to_surface(t.val)),))
    if isinstance(t, App):
        arg = t.arg
        args = arg.items if isinstance(arg, Tup) else () if isinstance(arg, Unit) else (arg,)
        return ECall(to_surface(t.fn), None, (tuple(to_surface(a) for a in args),))
    if isinstance(t, If):
        return EIf(to_surface(t.cond), to_surface(t.then), to_surface(t.els))
    if isinstance(t, Let):
        decls, body = [], t
        while isinstance(body, (Let, LetFun)):
            if isinstance(body, Let):
                decls.append(DVal(pat_surface(body.pat), to_surface(body.rhs)))
            else:
                decls.append(fundef_surface(body.fd))
            body = body.body
        return ELet(tuple(decls), to_surface(body))
    if isinstance(t, LetFun):
        return ELet((fundef_surface(t.fd),), to_surface(t.body))
    if isinstance(t, FixV):
        return EVar(t.fd.name)
    raise TypeError(f"not an erased term: {type(t).__name__}")


def pat_surface(p):
    if isinstance(p, DPVar):
        return PVar(p.name)
    if isinstance(p, DPWild):
        return PWild()
    if isinstance(p, DPTup):
        return PTuple(tuple(pat_surface(i) for i in p.items), (), False)
    raise TypeError(type(p).__name__)


def fundef_surface(fd: FunDef) -> DFun:
    params = tuple(Param(n, None) for n, _ in fd.dyn_params)
    return DFun("fun", fd.name, (), None, (params,), None, to_surface(fd.body))


def erase_program(checked) -> str:
    """The erased program text: functions and main only."""
    parts = []
    for fd in checked.funs.values():
        parts.append(pp_decl(fundef_surface(erase_fundef(fd))))
    if checked.main is not None:
        parts.append(pp_decl(DVal(PVar("main"), to_surface(erase(checked.main)))))
    return "\n\n".join(parts) + "\n"


def erased_text(t) -> str:
    return pp_expr(to_surface(erase(t)))
