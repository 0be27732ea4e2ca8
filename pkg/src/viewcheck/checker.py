"""Checking whole programs: declarations in order, one diagnostic per failing
declaration."""

from __future__ import annotations

from typing import Optional

from .context import Ctx
from .core import Desugarer, Names
from .diagnostics import CheckError, ViewcheckError
from .parser import parse_program
from .statics import StaticEnv
from .syntax import DAbbrev, DDataview, DFun, DPrval, DVal, Program, PVar
from .typecheck import Checker, CheckedProgram
from .views import declare_abbrev, elaborate_dataview


class ProgramChecker:
    """Holds the global tables while declarations are checked one by one."""

    def __init__(self, file: str = "<input>", trace: Optional[list] = None,
                 explain: bool = False):
        self.out = CheckedProgram(file, StaticEnv(), {}, {}, {}, {}, {})
        self.names = Names()
        self.trace = trace
        self.explain = explain
        self.queries: list = []
        self.prop1_checks = 0
        self.prop1_violations: list = []

    def checker(self) -> Checker:
        o = self.out
        c = Checker(o.env, o.sigs, o.dataview_ctors, o.prfuns, o.funs)
        c.trace = self.trace
        c.record_queries = self.explain
        return c

    def _absorb(self, c: Checker):
        self.prop1_checks += c.prop1_checks
        self.prop1_violations.extend(c.prop1_violations)
        self.queries.extend(c.queries)

    def declare(self, d) -> None:
        o = self.out
        if isinstance(d, DDataview):
            sigs = elaborate_dataview(o.env, d)
            o.dataview_ctors[d.name] = [s.name for s in sigs]
            for s in sigs:
                if s.name in o.sigs:
                    raise CheckError("redeclared", f"constructor '{s.name}' is already declared",
                                     d.span)
                o.sigs[s.name] = s
                self.names.ctors.add(s.name)
            return
        if isinstance(d, DAbbrev):
            declare_abbrev(o.env, d)
            return
        if isinstance(d, DFun):
            if d.name in o.funs or d.name in o.prfuns or d.name in o.sigs:
                raise CheckError("redeclared", f"'{d.name}' is already declared", d.span)
            (self.names.prfuns if d.kind == "prfun" else self.names.funs).add(d.name)
            fd = Desugarer(self.names).fundef(d)
            c = self.checker()
            try:
                if d.kind == "prfun":
                    def register(sig):
                        o.prfuns[sig.name] = sig.ftype
                    fd2 = c.check_fundef(Ctx.empty(), fd, register=register)
                    o.prfun_defs[d.name] = fd2
                else:
                    def register(sig):
                        o.funs[sig.name] = sig
                    fd2 = c.check_fundef(Ctx.empty(), fd, register=register)
                    o.funs[d.name] = fd2
            finally:
                self._absorb(c)
            return
        if isinstance(d, DVal):
            if not (isinstance(d.pat, PVar) and d.pat.name == "main"):
                raise CheckError("toplevel", "the only top-level value allowed is 'val main'",
                                 d.span)
            if o.main is not None:
                raise CheckError("redeclared", "'main' is already declared", d.span)
            e = Desugarer(self.names).dyn(d.expr)
            c = self.checker()
            try:
                term, typ = c.synth_dyn(Ctx.empty(), e)
                c.settle(d.span)
                term, typ = c.resolve_term(term), c.resolve(typ)
            finally:
                self._absorb(c)
            o.main, o.main_type = term, typ
            return
        if isinstance(d, DPrval):
            raise CheckError("toplevel", "'prval' is only allowed inside 'let'", d.span)
        raise CheckError("toplevel", f"unsupported declaration {type(d).__name__}",
                         getattr(d, "span", None))

    def run(self, prog: Program) -> CheckedProgram:
        for d in prog.decls:
            try:
                self.declare(d)
            except ViewcheckError as e:
                if e.span is None:
                    e.span = getattr(d, "span", None)
                self.out.diagnostics.append(e.diagnostic(prog.file))
        return self.out


def check_program(prog: Program, trace: Optional[list] = None,
                  explain: bool = False) -> CheckedProgram:
    pc = ProgramChecker(prog.file, trace, explain)
    out = pc.run(prog)
    out.prop1_checks = pc.prop1_checks
    out.prop1_violations = pc.prop1_violations
    out.queries = pc.queries
    return out


def check_source(text: str, file: str = "<input>", **kw) -> CheckedProgram:
    return check_program(parse_program(text, file), **kw)

