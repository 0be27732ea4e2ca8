"""Assigning viewtypes to dynamic terms, builtin signatures, and checking
whole programs."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .context import (
    Ctx, flat_views, is_linear_type, is_persistent_view, strip_vt,
)
from .core import (
    App, Cst, DPTup, DPVar, DPVT, DPWild, ExPack, FixV, FunDef, If, InvApp, InvRet, Let, LetFun,
    Lit, LocV, PBorrowT, PBoxT, PConT, PLocT, PrLet, PTupT, PUnitT, PVarT, Read, Sif, Tup, Unit,
    Var, VTup, Write, map_statics,
)
from .diagnostics import CheckError
from .printer import pp_static
from .proofcheck import ProofChecker
from .statics import StaticEnv, elab_static, free_svars, has_meta, subst_static
from .syntax import (
    BOOL_T, INT_T, TOP_T, UNIT_T, SAddr, SAssert, SBool, SCon, SExists, SForall, SGuard, SInt,
    SOp, Sort, Static, SVar, TArrow, TTuple, VAt, VBox, VLolli, VOne, VTAnd, product,
    s_not, tensor,
)


def _ptr(l):
    return SCon("ptr", (l,))


def _int(i):
    return SCon("int", (i,))


def _bool(b):
    return SCon("bool", (b,))


def builtin_signature(name: str) -> Static:
    """The constant type of a builtin with a formal signature."""
    i, l, t = SVar("i"), SVar("l"), SVar("a")
    if name == "getPtr":
        return SForall("l", Sort.ADDR, SForall("a", Sort.TYPE, TArrow(
            VTAnd(VAt(t, l), _ptr(l)), VTAnd(VAt(t, l), t))))
    if name == "setPtr":
        return SForall("l", Sort.ADDR, SForall("a", Sort.TYPE, TArrow(
            VTAnd(VAt(TOP_T, l), TTuple((_ptr(l), t))), VTAnd(VAt(t, l), UNIT_T))))
    if name == "alloc":
        return SForall("i", Sort.INT, SGuard(SOp(">=", (i, SInt(0))), TArrow(
            _int(i), SExists("l", Sort.ADDR, SAssert(SOp("!=", (l, SAddr(0))), VTAnd(
                SCon("arrayView", (UNIT_T, i, l)), _ptr(l)))))))
    if name == "free":
        return SForall("a", Sort.TYPE, SForall("i", Sort.INT, SForall("l", Sort.ADDR, SGuard(
            SOp(">=", (i, SInt(0))), TArrow(
                VTAnd(SCon("arrayView", (t, i, l)), TTuple((_ptr(l), _int(i)))), UNIT_T)))))
    if name == "isNull":
        return SForall("l", Sort.ADDR, TArrow(_ptr(l), _bool(SOp("==", (l, SAddr(0))))))
    raise KeyError(name)


_CMP = {"igt": ">", "ilt": "<", "ige": ">=", "ile": "<=", "ieq": "==", "ineq": "!="}


def _index_of(t: Static, con: str):
    if isinstance(t, SCon) and t.name == con and len(t.args) == 1:
        return t.args[0]
    return None


@dataclass
class CheckedProgram:
    file: str
    env: StaticEnv
    sigs: dict
    dataview_ctors: dict
    prfuns: dict  # name -> view of the proof function
    prfun_defs: dict  # name -> elaborated FunDef
    funs: dict  # name -> elaborated FunDef
    main: Optional[object] = None
    main_type: Optional[Static] = None
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class Checker(ProofChecker):
    """Bidirectional elaborating checker for proofs and dynamic terms."""

    def __init__(self, env: StaticEnv, sigs: dict, dataview_ctors: dict, prfuns: dict,
                 funs: dict):
        super().__init__()
        self.env = env
        self.sigs = sigs
        self.dataview_ctors = dataview_ctors
        self.prfuns = prfuns
        self.funs = funs  # name -> FunDef with ftype
        self.prop1_checks = 0
        self.prop1_violations: list = []

    # -- entry points with the purity monitor ----------------------------------

    def check_dyn(self, ctx: Ctx, t, expected: Static):
        before = len(self.linear_locs)
        out = self._check(ctx, t, expected)
        self._purity(t, expected, before)
        return out

    def synth_dyn(self, ctx: Ctx, t):
        before = len(self.linear_locs)
        out, typ = self._synth(ctx, t)
        self._purity(t, typ, before)
        return out, typ

    def _purity(self, t, typ, before):
        if not self.is_closed_value(t):
            return
        typ = self.resolve(typ)
        if is_linear_type(typ):
            return
        self.prop1_checks += 1
        delta = self.linear_locs[before:]
        if delta:
            self.prop1_violations.append((t, typ, tuple(delta)))
            self.fail("purity", f"a value of pure type {pp_static(typ)} holds location "
                                f"proofs {delta}", getattr(t, "span", None))

    def resolve_term(self, t):
        return map_statics(t, self.resolve)

    def is_closed_value(self, t) -> bool:
        if isinstance(t, (Lit, Unit, LocV, FixV)):
            return True
        if isinstance(t, Var):
            return t.name == "null" or t.name in self.funs
        if isinstance(t, Tup):
            return all(self.is_closed_value(i) for i in t.items)
        if isinstance(t, VTup):
            return self.is_closed_proof(t.proof) and self.is_closed_value(t.dyn)
        if isinstance(t, ExPack):
            return self.is_closed_value(t.body)
        return False

    def is_closed_proof(self, p) -> bool:
        if p is None or isinstance(p, (PLocT, PUnitT)):
            return True
        if isinstance(p, PTupT):
            return all(self.is_closed_proof(q) for q in p.items)
        if isinstance(p, PConT):
            return all(self.is_closed_proof(q) for q in p.args)
        if isinstance(p, (PBoxT, PBorrowT)):
            return self.is_closed_proof(p.proof)
        return False

    # -- checking mode -----------------------------------------------------------

    def _check(self, ctx: Ctx, t, expected: Static):
        expected = strip_vt(self.resolve(expected))
        if isinstance(expected, SExists) and isinstance(t, (VTup, Tup, Lit, Unit)):
            return self.pack_intro(ctx, t, expected)
        if isinstance(t, Let):
            return self.let_dyn(ctx, t, expected)[0]
        if isinstance(t, PrLet):
            return self.prlet_dyn(ctx, t, expected)[0]
        if isinstance(t, LetFun):
            return self.letfun_dyn(ctx, t, expected)[0]
        if isinstance(t, If):
            return self.if_dyn(ctx, t, expected)[0]
        if isinstance(t, Sif):
            return self.sif_dyn(ctx, t, expected)[0]
        if isinstance(t, VTup):
            if isinstance(expected, VTAnd):
                proof = self.check_proof(ctx, t.proof or PUnitT(), expected.view)
                dyn = self.check_dyn(ctx, t.dyn, expected.vt)
                return VTup(proof, dyn, span=t.span)
            if t.proof is None or isinstance(t.proof, PUnitT):
                return VTup(t.proof, self.check_dyn(ctx, t.dyn, expected), span=t.span)
        if isinstance(t, Tup) and isinstance(expected, TTuple) and \
                len(t.items) == len(expected.items):
            return Tup(tuple(self.check_dyn(ctx, a, e) for a, e in zip(t.items, expected.items)),
                       span=t.span)
        if isinstance(t, (App, InvApp)):
            out, typ = self.app_dyn(ctx, t, expected)
            return self.coerce(ctx, out, typ, expected, t.span)
        out, typ = self.synth_dyn(ctx, t)
        return self.coerce(ctx, out, typ, expected, getattr(t, "span", None))

    def coerce(self, ctx: Ctx, term, actual: Static, expected: Static, span):
        expected, actual = self.resolve(expected), self.resolve(actual)
        if isinstance(expected, SExists) and not isinstance(actual, SExists):
            body, props, metas = self.inst_exists(expected)
            self.subtype(ctx, actual, body, "ty-exists+", span)
            return self.finish_pack(ctx, term, expected, props, metas, span)
        self.subtype(ctx, actual, expected, "ty-sub", span)
        return term

    def pack_intro(self, ctx: Ctx, t, expected: SExists):
        body, props, metas = self.inst_exists(expected)
        inner = self.check_dyn(ctx, t, body)
        return self.finish_pack(ctx, inner, expected, props, metas, t.span)

    def finish_pack(self, ctx, term, expected, props, metas, span):
        self.settle(span)
        ws = tuple(self.resolve(m) for m in metas)
        if any(has_meta(w) for w in ws):
            self.fail("ty-exists+", "cannot infer the witness of an existential type", span,
                      pp_static(expected))
        for p in props:
            self.require(ctx, p, "ty-exists+", "property of the existential package", span)
        self.log("ty-exists+", f"{', '.join(pp_static(w) for w in ws)} : {pp_static(expected)}")
        return ExPack(ws, term, self.resolve(expected), span=span)

    # -- synthesis mode ------------------------------------------------------------

    def _synth(self, ctx: Ctx, t):
        if isinstance(t, Var):
            return self.var_dyn(ctx, t)
        if isinstance(t, Lit):
            if isinstance(t.value, bool):
                return t, _bool(SBool(t.value))
            return t, _int(SInt(t.value))
        if isinstance(t, Unit):
            return t, UNIT_T
        if isinstance(t, LocV):
            return t, _ptr(SAddr(t.loc))
        if isinstance(t, Tup):
            items, types = [], []
            for a in t.items:
                a2, ty = self.synth_dyn(ctx, a)
                items.append(a2)
                types.append(ty)
            return Tup(tuple(items), span=t.span), TTuple(tuple(types))
        if isinstance(t, VTup):
            proof, v = self.synth_proof(ctx, t.proof or PUnitT())
            dyn, ty = self.synth_dyn(ctx, t.dyn)
            return VTup(proof, dyn, span=t.span), VTAnd(v, ty)
        if isinstance(t, Cst):
            return self.cst_dyn(ctx, t)
        if isinstance(t, Read):
            return self.read_dyn(ctx, t)
        if isinstance(t, Write):
            return self.write_dyn(ctx, t)
        if isinstance(t, (App, InvApp)):
            return self.app_dyn(ctx, t, None)
        if isinstance(t, InvRet):
            body, ty = self.synth_dyn(ctx, t.body)
            ty = self.resolve(ty)
            if not isinstance(ty, VTAnd):
                self.fail("ty-inv", "invariant call did not return its proof", t.span)
            return InvRet(body, span=t.span), ty.vt
        if isinstance(t, If):
            return self.if_dyn(ctx, t, None)
        if isinstance(t, Sif):
            return self.sif_dyn(ctx, t, None)
        if isinstance(t, Let):
            return self.let_dyn(ctx, t, None)
        if isinstance(t, PrLet):
            return self.prlet_dyn(ctx, t, None)
        if isinstance(t, LetFun):
            return self.letfun_dyn(ctx, t, None)
        if isinstance(t, FixV):
            fd = self.check_fundef(ctx.pure(), t.fd, local=True)
            return FixV(fd, span=t.span), fd.ftype
        if isinstance(t, ExPack):
            typ = self.resolve(t.typ)
            body = typ
            ws = list(t.witnesses)
            props = []
            while isinstance(body, (SExists, SAssert)):
                if isinstance(body, SExists):
                    if not ws:
                        self.fail("ty-exists+", "too few witnesses", t.span)
                    body = subst_static(body.body, {body.var: ws.pop(0)})
                else:
                    props.append(body.prop)
                    body = body.body
            inner = self.check_dyn(ctx, t.body, body)
            for p in props:
                self.require(ctx, p, "ty-exists+", "property of the existential package", t.span)
            return ExPack(t.witnesses, inner, typ, span=t.span), typ
        self.fail("ty-synth", f"cannot synthesize a type for {type(t).__name__}",
                  getattr(t, "span", None))

    def var_dyn(self, ctx: Ctx, t: Var):
        b = ctx.dyns.get(t.name)
        if b is not None:
            self.consume(b, "ty-var", t.span)
            return t, b.typ
        if t.name == "null":
            return t, _ptr(SAddr(0))
        fd = self.funs.get(t.name)
        if fd is not None:
            return t, fd.ftype
        if t.name in ("getPtr", "setPtr"):
            self.fail("ty-var", f"'{t.name}' must be applied as {t.name} (proof | args)", t.span)
        self.fail("ty-var", f"unbound variable '{t.name}'", t.span)

    # -- builtins -------------------------------------------------------------------

    def cst_dyn(self, ctx: Ctx, t: Cst):
        name = t.name
        if name in ("alloc", "free", "isNull"):
            if name == "alloc" or name == "free":
                if "arrayView" not in self.env.dataviews or \
                        not {"ArrayNone", "ArraySome"} <= set(self.sigs):
                    self.fail("ty-cst", f"'{name}' needs the arrayView dataview to be declared",
                              t.span)
            arg = t.args[0] if len(t.args) == 1 else Tup(t.args, span=t.span)
            proof, arg2, typ, _ = self.apply(ctx, builtin_signature(name), t.sargs,
                                             t.proof, arg, None, t.span, "ty-cst")
            args = arg2.items if len(t.args) != 1 else (arg2,)
            return Cst(name, t.sargs, proof, tuple(args), span=t.span), typ
        if t.proof is not None and not isinstance(t.proof, PUnitT):
            self.fail("ty-cst", f"builtin '{name}' takes no proofs", t.span)
        args, types = [], []
        for a in t.args:
            a2, ty = self.synth_dyn(ctx, a)
            args.append(a2)
            types.append(strip_vt(self.resolve(ty)))
        out = Cst(name, t.sargs, t.proof, tuple(args), span=t.span)
        return out, self.cst_type(name, types, t.span)

    def cst_type(self, name: str, types, span) -> Static:
        arity = 1 if name in ("ipred", "isucc") else 2
        if len(types) != arity:
            self.fail("ty-cst", f"'{name}' takes {arity} argument(s)", span)
        ints = [_index_of(x, "int") for x in types]
        ptrs = [_index_of(x, "ptr") for x in types]
        bools = [_index_of(x, "bool") for x in types]

        def is_int(k):
            return ints[k] is not None or types[k] == INT_T

        if name in ("ipred", "isucc"):
            if ints[0] is not None:
                return _int(SOp("-" if name == "ipred" else "+", (ints[0], SInt(1))))
            if is_int(0):
                return INT_T
        elif name in ("+", "-"):
            if ptrs[0] is not None and ints[1] is not None:
                return _ptr(SOp(name, (ptrs[0], ints[1])))
            if name == "-" and ptrs[0] is not None and ptrs[1] is not None:
                return _int(SOp("-", (ptrs[0], ptrs[1])))
            if ints[0] is not None and ints[1] is not None:
                return _int(SOp(name, (ints[0], ints[1])))
            if is_int(0) and is_int(1):
                return INT_T
        elif name == "*":
            if ints[0] is not None and ints[1] is not None:
                return _int(SOp("*", (ints[0], ints[1])))
            if is_int(0) and is_int(1):
                return INT_T
        elif name in ("/", "imod"):
            if is_int(0) and is_int(1):
                return INT_T
        elif name in _CMP:
            op = _CMP[name]
            if ints[0] is not None and ints[1] is not None:
                return _bool(SOp(op, (ints[0], ints[1])))
            if is_int(0) and is_int(1):
                return BOOL_T
            if op in ("==", "!="):
                if ptrs[0] is not None and ptrs[1] is not None:
                    return _bool(SOp(op, (ptrs[0], ptrs[1])))
                if bools[0] is not None and bools[1] is not None:
                    return _bool(SOp(op, (bools[0], bools[1])))
                if all(x is not None or y == BOOL_T for x, y in zip(bools, types)):
                    return BOOL_T
        self.fail("ty-cst", f"builtin '{name}' cannot be applied to "
                            f"{', '.join(pp_static(x) for x in types)}", span)

    def read_dyn(self, ctx: Ctx, t: Read):
        proof, v = self.synth_proof(ctx, t.proof or PUnitT())
        v = strip_vt(self.resolve(v))
        ptr, pt = self.synth_dyn(ctx, t.ptr)
        loc = _index_of(strip_vt(self.resolve(pt)), "ptr")
        if loc is None:
            self.fail("ty-read", f"getPtr needs a pointer, found {pp_static(pt)}", t.span)
        if not isinstance(v, VAt):
            what = "a boxed" if isinstance(v, VBox) else "a"
            self.fail("ty-read", f"getPtr needs a proof of T@L, found {what} proof of "
                                 f"{pp_static(v)}", t.span)
        self.equal_index(ctx, v.addr, loc, Sort.ADDR, "ty-read", t.span)
        return Read(proof, ptr, span=t.span), VTAnd(v, v.typ)

    def write_dyn(self, ctx: Ctx, t: Write):
        proof, v = self.synth_proof(ctx, t.proof or PUnitT())
        v = strip_vt(self.resolve(v))
        ptr, pt = self.synth_dyn(ctx, t.ptr)
        val, vt = self.synth_dyn(ctx, t.val)
        loc = _index_of(strip_vt(self.resolve(pt)), "ptr")
        if loc is None:
            self.fail("ty-write", f"setPtr needs a pointer, found {pp_static(pt)}", t.span)
        if not isinstance(v, VAt):
            what = "a boxed" if isinstance(v, VBox) else "a"
            self.fail("ty-write", f"setPtr needs a proof of T@L, found {what} proof of "
                                  f"{pp_static(v)}", t.span)
        self.equal_index(ctx, v.addr, loc, Sort.ADDR, "ty-write", t.span)
        vt = strip_vt(self.resolve(vt))
        if is_linear_type(vt) or is_linear_type(v.typ):
            self.fail("ty-write", "only values of pure types can be stored", t.span)
        return Write(proof, ptr, val, span=t.span), VTAnd(VAt(vt, v.addr), UNIT_T)

    # -- application ------------------------------------------------------------------

    def apply(self, ctx: Ctx, ftype, sargs, proof, arg, expected, span, rule):
        body, args, guards = self.instantiate(ctx, ftype, sargs, span, rule)
        body = self.resolve(body)
        if not isinstance(body, TArrow):
            self.fail(rule, f"applying a non-function of type {pp_static(body)}", span)
        dom = strip_vt(self.resolve(body.dom))
        dview, dtype = (dom.view, dom.vt) if isinstance(dom, VTAnd) else (VOne(), dom)
        proof2 = self.check_proof(ctx, proof or PUnitT(span=span), dview)
        arg2 = self.check_dyn(ctx, arg, dtype)
        cod = self.resolve(body.cod)
        if expected is not None and has_meta(cod):
            exp = self.resolve(expected)
            if isinstance(cod, SExists) or not isinstance(exp, SExists):
                self.subtype(ctx, cod, exp, rule, span)
        self.discharge(ctx, guards, span, rule)
        return proof2, arg2, self.resolve(cod), tuple(self.resolve(a) for a in args)

    def discharge(self, ctx, guards, span, rule):
        self.settle(span)
        for g in guards:
            self.require(ctx, g, rule, "guard", span)

    def is_boxed_proof(self, ctx: Ctx, p) -> bool:
        if isinstance(p, PVarT):
            b = ctx.proofs.get(p.name)
            return b is not None and isinstance(self.resolve(b.typ), VBox)
        if isinstance(p, PBoxT):
            return True
        if isinstance(p, PTupT):
            return bool(p.items) and all(self.is_boxed_proof(ctx, q) for q in p.items)
        return False

    def app_dyn(self, ctx: Ctx, t, expected):
        fn, ftype = self.synth_dyn(ctx, t.fn)
        ftype = self.resolve(ftype)
        peeled = ftype
        while isinstance(peeled, (SForall, SGuard)):
            peeled = peeled.body
        if isinstance(peeled, TArrow):
            dom = strip_vt(peeled.dom)
            boxed_dom = isinstance(dom, VTAnd) and all(isinstance(x, VBox)
                                                       for x in flat_views(dom.view))
            if isinstance(t, InvApp) or (isinstance(dom, VTAnd) and not boxed_dom
                                         and self.is_boxed_proof(ctx, t.proof)):
                return self.inv_app(ctx, t, fn, ftype)
        proof, arg, cod, sargs = self.apply(ctx, ftype, t.sargs, t.proof, t.arg, expected,
                                            t.span, "ty-app")
        if has_meta(cod):
            self.fail("ty-app", "cannot infer the static arguments of this call", t.span,
                      pp_static(cod))
        return App(fn, sargs, proof, arg, span=t.span), cod

    def inv_app(self, ctx: Ctx, t, fn, ftype):
        """A function of type V/\\T1 -> V/\\T2 used with a boxed proof of V."""
        body, args, guards = self.instantiate(ctx, ftype, t.sargs, t.span, "ty-inv")
        dom, cod = strip_vt(body.dom), strip_vt(self.resolve(body.cod))
        if not isinstance(cod, VTAnd):
            self.fail("ty-inv", "a boxed proof is passed, but the function returns no view",
                      t.span)
        boxed = tensor(VBox(x) for x in flat_views(dom.view))
        proof = self.check_proof(ctx, t.proof, boxed)
        arg = self.check_dyn(ctx, t.arg, dom.vt)
        self.discharge(ctx, guards, t.span, "ty-inv")
        dv, cv = self.resolve(dom.view), self.resolve(cod.view)
        try:
            self.subtype(ctx, cv, dv, "ty-inv", t.span, equal=True)
        except CheckError:
            self.fail("ty-inv", f"the function does not preserve {pp_static(dv)} "
                                f"(returns {pp_static(cv)}), so it cannot take a boxed proof",
                      t.span)
        self.log("ty-inv", f"invariant {pp_static(dv)}")
        sargs = tuple(self.resolve(a) for a in args)
        return InvApp(fn, sargs, proof, arg, span=t.span), self.resolve(cod.vt)

    # -- control ----------------------------------------------------------------------

    def cond_prop(self, ctx: Ctx, t):
        c, ct = self.synth_dyn(ctx, t)
        ct = strip_vt(self.resolve(ct))
        b = _index_of(ct, "bool")
        if b is None and ct != BOOL_T:
            self.fail("ty-if", f"condition must be boolean, found {pp_static(ct)}",
                      getattr(t, "span", None))
        return c, b

    def if_dyn(self, ctx: Ctx, t: If, expected):
        cond, b = self.cond_prop(ctx, t.cond)
        ctx_t = ctx.with_hyp(b) if b is not None else ctx
        ctx_e = ctx.with_hyp(s_not(b)) if b is not None else ctx
        then, els, out = self.branches(ctx_t, ctx_e, t.then, t.els, expected, "ty-if", t.span)
        return If(cond, then, els, span=t.span), out

    def sif_dyn(self, ctx: Ctx, t: Sif, expected):
        prop = self.elab_prop(ctx, t.prop, t.span)
        then, els, out = self.branches(ctx.with_hyp(prop), ctx.with_hyp(s_not(prop)),
                                       t.then, t.els, expected, "ty-sif", t.span)
        return Sif(prop, then, els, span=t.span), out

    def branches(self, ctx_t, ctx_e, then, els, expected, rule, span):
        before = self.branch_state()
        if expected is not None:
            then2, out = self.check_dyn(ctx_t, then, expected), expected
        else:
            then2, out = self.synth_dyn(ctx_t, then)
        after_then = self.branch_state()
        self.restore(before)
        els2 = self.check_dyn(ctx_e, els, out)
        self.join_branches(ctx_t, ctx_e, after_then, rule, span)
        return then2, els2, out

    # -- binding forms ------------------------------------------------------------------

    def bind_dpat(self, ctx: Ctx, pat, typ: Static, span):
        typ = strip_vt(self.resolve(typ))
        if isinstance(pat, DPVar):
            b = self.bind(pat.name, typ, not is_linear_type(typ), pat.span or span, "value")
            return ctx.with_dyn(b), pat, [b]
        if isinstance(pat, DPWild):
            if is_linear_type(typ):
                self.fail("ty-let", f"a linear value of type {pp_static(typ)} is discarded by '_'",
                          pat.span or span)
            return ctx, pat, []
        if isinstance(pat, DPTup):
            items = typ.items if isinstance(typ, TTuple) else None
            if items is None or len(items) != len(pat.items):
                self.fail("ty-let", f"pattern of {len(pat.items)} values does not match "
                                    f"{pp_static(typ)}", pat.span or span)
            out, bindings = [], []
            for q, ty in zip(pat.items, items):
                ctx, q2, bs = self.bind_dpat(ctx, q, ty, span)
                out.append(q2)
                bindings.extend(bs)
            return ctx, DPTup(tuple(out), span=pat.span), bindings
        if isinstance(pat, DPVT):
            if isinstance(typ, VTAnd):
                view, vt = typ.view, typ.vt
            elif isinstance(typ, SExists):
                self.fail("ty-let", "an existential package must be opened by a pattern",
                          pat.span or span)
            else:
                view, vt = VOne(), typ
            ctx, pp, bs1 = self.bind_ppat(ctx, pat.proof, view, pat.span or span)
            ctx, dp, bs2 = self.bind_dpat(ctx, pat.dyn, vt, span)
            return ctx, DPVT(pp, dp, span=pat.span), bs1 + bs2
        self.fail("ty-let", "bad pattern", span)

    def let_dyn(self, ctx: Ctx, t: Let, expected):
        rhs, typ = self.synth_dyn(ctx, t.rhs)
        typ = strip_vt(self.resolve(typ))
        inner, opened = ctx, ()
        if isinstance(t.pat, (DPTup, DPVT)) and isinstance(typ, SExists):
            inner, typ, opened = self.open_exists(ctx, typ, t.opened)
            self.log("ty-exists-", f"open {', '.join(opened)}")
        inner, pat, bindings = self.bind_dpat(inner, t.pat, typ, t.span)
        body, out = self.scoped_body(ctx, inner, t.body, expected, opened)
        self.close_scope(bindings, "ty-let")
        return Let(pat, rhs, body, opened, span=t.span), out

    def prlet_dyn(self, ctx: Ctx, t: PrLet, expected):
        proof, view = self.synth_proof(ctx, t.proof)
        inner, pat, bindings = self.bind_ppat(ctx, t.pat, view, t.span)
        skolems = tuple(n for n in inner.sigma if n not in ctx.sigma)
        body, out = self.scoped_body(ctx, inner, t.body, expected, skolems)
        self.close_scope(bindings, "vw-let")
        return PrLet(pat, proof, body, span=t.span), out

    def scoped_body(self, ctx: Ctx, inner: Ctx, body, expected, skolems):
        if expected is not None:
            return self.check_dyn(inner, body, expected), expected
        body2, out = self.synth_dyn(inner, body)
        out = self.resolve(out)
        escaping = [k for k in skolems if k in free_svars(out)]
        if not escaping:
            return body2, out
        typ = out
        # facts learnt about the escaping skolems travel with the package
        for h in reversed([h for h in inner.hyps if h not in ctx.hyps
                           and free_svars(h) & set(escaping)]):
            typ = SAssert(h, typ)
        for k in reversed(escaping):
            typ = SExists(k, inner.sigma[k], typ)
        self.log("ty-exists+", f"pack escaping {', '.join(escaping)}")
        return ExPack(tuple(SVar(k) for k in escaping), body2, typ, span=body2.span), typ

    def letfun_dyn(self, ctx: Ctx, t: LetFun, expected):
        fd = self.check_fundef(ctx.pure(), t.fd, local=True)
        b = self.bind(fd.name, fd.ftype, True, fd.span, "value")
        inner = ctx.with_dyn(b)
        if expected is not None:
            return LetFun(fd, self.check_dyn(inner, t.body, expected), span=t.span), expected
        body, out = self.synth_dyn(inner, t.body)
        return LetFun(fd, body, span=t.span), out

    # -- function definitions -------------------------------------------------------------

    def fun_type(self, ctx: Ctx, fd: FunDef):
        """Elaborate the signature of ``fd`` under ``ctx``; returns (ctx', FunDef)."""
        sigma = dict(ctx.sigma)
        seen = set()
        for n, so in fd.binders:
            if n in seen:
                self.fail("sort", f"static variable '{n}' bound twice", fd.span)
            seen.add(n)
            sigma[n] = so
        inner = replace(ctx, sigma=sigma)
        guards = tuple(self.elab(sigma, g, Sort.BOOL) for g in fd.guards)
        for g in guards:
            inner = inner.with_hyp(g)
        pps = tuple((n, self.elab(sigma, ty, Sort.VIEW)) for n, ty in fd.proof_params)
        dps = tuple((n, self.elab(sigma, ty, Sort.VIEWTYPE)) for n, ty in fd.dyn_params)
        if fd.kind == "prfun":
            result = self.elab(sigma, fd.result, Sort.VIEW)
            arrow = VLolli(tensor(v for _, v in pps), result)
        else:
            result = strip_vt(self.elab(sigma, fd.result, Sort.VIEWTYPE))
            if fd.n_inv:
                inv = [v for _, v in pps[:fd.n_inv]]
                if isinstance(result, VTAnd):
                    result = VTAnd(tensor(inv + flat_views(result.view)), result.vt)
                else:
                    result = VTAnd(tensor(inv), result)
            dyn = product(t for _, t in dps)
            views = [v for _, v in pps]
            arrow = TArrow(VTAnd(tensor(views), dyn) if views else dyn, result)
        ftype = arrow
        for g in reversed(guards):
            ftype = SGuard(g, ftype)
        for n, so in reversed(fd.binders):
            ftype = SForall(n, so, ftype)
        metric = None
        if fd.metric is not None:
            metric = tuple(self.elab(sigma, m, Sort.INT) for m in fd.metric)
        out = replace(fd, guards=guards, proof_params=pps, dyn_params=dps, result=result,
                      metric=metric, ftype=ftype, elaborated=True)
        return inner, out

    def elab(self, sigma, s, sort):
        return elab_static(self.env, sigma, s, sort)[0]

    def check_fundef(self, ctx: Ctx, fd: FunDef, local: bool = False,
                     register=None) -> FunDef:
        """Check a fun/prfun body against its signature; ``ctx`` must be pure."""
        inner, sig = self.fun_type(ctx, fd)
        if register is not None:
            register(sig)
        if local:
            rec = self.bind(sig.name, sig.ftype, True, sig.span, "value")
            inner = inner.with_dyn(rec)
        bindings = []
        for n, v in sig.proof_params:
            if n == "_":
                if not is_persistent_view(v):
                    self.fail("vw-lam", f"proof parameter of view {pp_static(v)} is discarded",
                              sig.span)
                continue
            b = self.bind(n, v, is_persistent_view(v), sig.span)
            inner = inner.with_proof(b)
            bindings.append(b)
        for n, ty in sig.dyn_params:
            if n == "_":
                continue
            b = self.bind(n, ty, not is_linear_type(ty), sig.span, "value")
            inner = inner.with_dyn(b)
            bindings.append(b)
        if sig.kind == "prfun":
            self.metric_stack.append((sig.name, sig.metric or (), [n for n, _ in sig.binders]))
            try:
                body = self.check_proof(inner, sig.body, sig.result)
            finally:
                self.metric_stack.pop()
        else:
            body = self.check_dyn(inner, sig.body, sig.result)
        self.close_scope(bindings, "vw-lam" if sig.kind == "prfun" else "ty-lam")
        return replace(sig, body=body)

