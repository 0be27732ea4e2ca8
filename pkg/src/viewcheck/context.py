"""Judgment contexts and the static unifier shared by the proof and type checkers.

A context holds the static variables (Sigma), the hypotheses (B-bar), the
proof variables (Pi) and the dynamic variables (Delta).  Linear bindings are
tracked by identity in the checker's ``live`` set; consuming a binding removes
it, so threading a context through sub-judgments is implicit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional

from .diagnostics import CheckError
from .printer import pp_static
from .statics import (
    StaticEnv, entails, fresh_name, has_meta, normalize, satisfiable, subst_static,
)
from .syntax import (
    BOOL_T, INT_T, TOP_T, SAddr, SAssert, SBool, SCon, SExists, SForall, SGuard, SInt,
    SMeta, SOp, Sort, Span, Static, SVar, TArrow, TTuple, VAt, VBox, VLolli, VOne, VTAnd,
    VTensor, VTImp,
)

_ids = itertools.count(1)


@dataclass(frozen=True)
class Binding:
    name: str
    typ: Static
    linear: bool
    id: int
    span: Optional[Span] = None
    kind: str = "proof"


@dataclass(frozen=True)
class Ctx:
    sigma: dict
    hyps: tuple
    proofs: dict
    dyns: dict

    @staticmethod
    def empty() -> "Ctx":
        return Ctx({}, (), {}, {})

    def with_svar(self, name: str, sort: Sort) -> "Ctx":
        sigma = dict(self.sigma)
        sigma[name] = sort
        return replace(self, sigma=sigma)

    def with_hyp(self, prop: Static) -> "Ctx":
        return replace(self, hyps=self.hyps + (prop,))

    def with_proof(self, b: Binding) -> "Ctx":
        proofs = dict(self.proofs)
        proofs[b.name] = b
        return replace(self, proofs=proofs)

    def with_dyn(self, b: Binding) -> "Ctx":
        dyns = dict(self.dyns)
        dyns[b.name] = b
        return replace(self, dyns=dyns)

    def pure(self) -> "Ctx":
        """Drop linear bindings: the context seen by a pure function body."""
        return replace(self,
                       proofs={k: b for k, b in self.proofs.items() if not b.linear},
                       dyns={k: b for k, b in self.dyns.items() if not b.linear})


# ---------------------------------------------------------------------------
# view / type classification


def flat_views(v: Static) -> list:
    """Tensor items with nested tensors flattened and units dropped."""
    if isinstance(v, VTensor):
        out = []
        for i in v.items:
            out.extend(flat_views(i))
        return out
    if isinstance(v, VOne):
        return []
    return [v]


def is_persistent_view(v: Static) -> bool:
    if isinstance(v, (VBox, VOne)):
        return True
    if isinstance(v, VTensor):
        return all(is_persistent_view(i) for i in v.items)
    if isinstance(v, SGuard):
        return is_persistent_view(v.body)
    return False


def is_linear_type(t: Static) -> bool:
    if isinstance(t, VTAnd):
        return not is_persistent_view(t.view) or is_linear_type(t.vt)
    if isinstance(t, TTuple):
        return any(is_linear_type(i) for i in t.items)
    if isinstance(t, (SExists, SForall)):
        return is_linear_type(t.body)
    if isinstance(t, (SGuard, SAssert)):
        return is_linear_type(t.body)
    if isinstance(t, TArrow):
        return t.once
    if isinstance(t, VTImp):
        return t.once
    if isinstance(t, (VAt, VTensor, VLolli)) or (isinstance(t, SCon) and t.name not in _TYPE_CONS):
        return True
    return False


_TYPE_CONS = {"Int", "Bool", "int", "bool", "ptr", "unit", "top"}


def strip_vt(t: Static) -> Static:
    """V /\\ T with an empty view is just T."""
    if isinstance(t, VTAnd) and not flat_views(t.view):
        return t.vt
    return t


# ---------------------------------------------------------------------------


class Unifier:
    """Meta-variables for omitted static arguments plus the subtyping and
    index-equality judgments.  Requires ``self.env`` (StaticEnv)."""

    env: StaticEnv

    def __init__(self):
        self.metas: dict[str, Optional[Static]] = {}
        self.meta_sorts: dict[str, Sort] = {}
        self.deferred: list = []
        self.queries: list = []  # (hyps, goal, verdict) for --explain-constraints
        self.record_queries = False

    # -- diagnostics --------------------------------------------------------

    def fail(self, rule: str, msg: str, span=None, constraint=None):
        raise CheckError(rule, msg, span, constraint)

    # -- metas --------------------------------------------------------------

    def new_meta(self, base: str, sort: Sort) -> SMeta:
        name = fresh_name(base)
        self.metas[name] = None
        self.meta_sorts[name] = sort
        return SMeta(name)

    def resolve(self, s: Static) -> Static:
        if isinstance(s, SMeta):
            v = self.metas.get(s.name)
            if v is None:
                return s
            r = self.resolve(v)
            self.metas[s.name] = r
            return r
        if not has_meta(s):
            return s
        from .statics import children, rebuild
        return rebuild(s, tuple(self.resolve(k) for k in children(s)))

    def assign(self, m: SMeta, value: Static, span=None):
        value = self.resolve(value)
        if value == m:
            return
        if _occurs(m.name, value):
            self.fail("unify", f"cyclic static argument for ?{m.name}", span)
        self.metas[m.name] = value

    # -- the solver, with logging -------------------------------------------

    def entail(self, ctx: Ctx, goal: Static) -> bool:
        goal = self.resolve(goal)
        ok = entails(ctx.sigma, ctx.hyps, goal)
        if self.record_queries:
            self.queries.append((ctx.hyps, goal, ok))
        return ok

    def require(self, ctx: Ctx, goal: Static, rule: str, msg: str, span):
        goal = self.resolve(goal)
        if has_meta(goal):
            self.fail(rule, f"{msg}: cannot infer the static arguments it mentions", span,
                      pp_static(goal))
        if not self.entail(ctx, goal):
            self.fail(rule, f"{msg}: constraint not entailed", span, pp_static(goal))

    def consistent(self, ctx: Ctx) -> bool:
        return satisfiable(ctx.sigma, ctx.hyps)

    # -- index equality -----------------------------------------------------

    def equal_index(self, ctx: Ctx, a: Static, b: Static, sort: Sort, rule: str, span) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if sort in (Sort.INT, Sort.ADDR):
            if has_meta(a) or has_meta(b):
                if not self._solve_linear(a, b, span):
                    self.deferred.append((ctx, a, b, sort, rule, span))
                return
            goal = SOp("==", (a, b))
            if not self.entail(ctx, goal):
                self.fail(rule, "index mismatch", span, pp_static(goal))
            return
        if sort == Sort.BOOL:
            if isinstance(a, SMeta):
                self.assign(a, b, span)
                return
            if isinstance(b, SMeta):
                self.assign(b, a, span)
                return
            if has_meta(a) or has_meta(b):
                self.deferred.append((ctx, a, b, sort, rule, span))
                return
            goal = SOp("&&", (SOp("=>", (a, b)), SOp("=>", (b, a))))
            if not self.entail(ctx, goal):
                self.fail(rule, "boolean index mismatch", span, pp_static(SOp("==", (a, b))))
            return
        # type/view arguments: structural
        self.subtype(ctx, a, b, rule, span, equal=True)

    def _solve_linear(self, a: Static, b: Static, span) -> bool:
        d = normalize(a) - normalize(b)
        for atom, c in d.terms:
            if isinstance(atom, SMeta) and abs(c) == 1:
                rest = d - _single(atom, c)
                if any(x == atom for x, _ in rest.terms):
                    continue
                # c*m + rest = 0  =>  m = -c*rest
                sol = rest.scale(-c).to_static()
                if isinstance(sol, SInt) and self.meta_sorts.get(atom.name) == Sort.ADDR \
                        and sol.value >= 0:
                    sol = SAddr(sol.value, span=sol.span)
                self.assign(atom, sol, span)
                return True
        return False

    def flush(self):
        """Retry deferred index equations; those still unsolved stay deferred."""
        progress = True
        while progress and self.deferred:
            progress = False
            pending, self.deferred = self.deferred, []
            for ctx, a, b, sort, rule, span in pending:
                a2, b2 = self.resolve(a), self.resolve(b)
                if not (has_meta(a2) or has_meta(b2)) or (sort != Sort.BOOL and
                                                          self._solve_linear(a2, b2, span)):
                    self.equal_index(ctx, a2, b2, sort, rule, span)
                    progress = True
                else:
                    self.deferred.append((ctx, a2, b2, sort, rule, span))

    def settle(self, span):
        self.flush()
        if self.deferred:
            ctx, a, b, sort, rule, sp = self.deferred[0]
            self.deferred = []
            self.fail(rule, "cannot infer static arguments", sp or span,
                      pp_static(SOp("==", (a, b))))

    # -- subtyping ----------------------------------------------------------

    def arg_sorts(self, name: str, n: int) -> tuple:
        if name in ("int",):
            return (Sort.INT,)
        if name in ("bool",):
            return (Sort.BOOL,)
        if name in ("ptr",):
            return (Sort.ADDR,)
        if name in self.env.dataviews:
            return self.env.dataviews[name]
        return (Sort.TYPE,) * n

    def subtype(self, ctx: Ctx, a: Static, e: Static, rule: str, span, equal: bool = False):
        """actual <= expected; with ``equal`` only index-equality coercions apply."""
        a, e = strip_vt(self.resolve(a)), strip_vt(self.resolve(e))
        if a == e and not has_meta(a):
            return
        if isinstance(e, SMeta):
            self.assign(e, a, span)
            return
        if isinstance(a, SMeta):
            self.assign(a, e, span)
            return
        mismatch = lambda: self.fail(  # noqa: E731
            rule, f"type mismatch: found {pp_static(a)}, expected {pp_static(e)}", span)
        if not equal:
            if e == TOP_T and not is_linear_type(a):
                return
            if e == INT_T and isinstance(a, SCon) and a.name == "int":
                return
            if e == BOOL_T and isinstance(a, SCon) and a.name == "bool":
                return
        if isinstance(e, SGuard) and not (isinstance(a, SGuard)):
            inner = ctx.with_hyp(e.prop)
            if not self.consistent(inner):
                return
            self.subtype(inner, a, e.body, rule, span, equal)
            return
        if isinstance(a, SGuard) and not isinstance(e, SGuard):
            self.require(ctx, a.prop, rule, "guard of the component", span)
            self.subtype(ctx, a.body, e, rule, span, equal)
            return
        if isinstance(a, SAssert) and not isinstance(e, SAssert):
            self.subtype(ctx.with_hyp(a.prop), a.body, e, rule, span, equal)
            return
        if isinstance(e, SAssert) and not isinstance(a, SAssert):
            self.subtype(ctx, a, e.body, rule, span, equal)
            self.require(ctx, e.prop, rule, "asserted property", span)
            return
        if type(a) is not type(e):
            if isinstance(e, (VTensor, VOne)) or isinstance(a, (VTensor, VOne)):
                fa, fe = flat_views(a), flat_views(e)
                if len(fa) == len(fe) and (len(fa) != 1 or fa[0] != a):
                    for x, y in zip(fa, fe):
                        self.subtype(ctx, x, y, rule, span, equal)
                    return
            mismatch()
        if isinstance(a, SCon):
            if a.name != e.name or len(a.args) != len(e.args):
                mismatch()
            for x, y, so in zip(a.args, e.args, self.arg_sorts(a.name, len(a.args))):
                self.equal_index(ctx, x, y, so, rule, span)
            return
        if isinstance(a, SVar):
            if a.name != e.name:
                mismatch()
            return
        if isinstance(a, (SInt, SBool)):
            if a != e:
                mismatch()
            return
        if isinstance(a, TTuple):
            if len(a.items) != len(e.items):
                mismatch()
            for x, y in zip(a.items, e.items):
                self.subtype(ctx, x, y, rule, span, equal)
            return
        if isinstance(a, (TArrow, VLolli)):
            if isinstance(a, TArrow) and a.once and not e.once:
                mismatch()
            self.subtype(ctx, e.dom, a.dom, rule, span, equal)
            self.subtype(ctx, a.cod, e.cod, rule, span, equal)
            return
        if isinstance(a, VAt):
            self.subtype(ctx, a.typ, e.typ, rule, span, equal)
            self.equal_index(ctx, a.addr, e.addr, Sort.ADDR, rule, span)
            return
        if isinstance(a, (VTensor, VOne)):
            fa, fe = flat_views(a), flat_views(e)
            if len(fa) != len(fe):
                mismatch()
            for x, y in zip(fa, fe):
                self.subtype(ctx, x, y, rule, span, equal)
            return
        if isinstance(a, VBox):
            self.subtype(ctx, a.view, e.view, rule, span, equal)
            return
        if isinstance(a, VTAnd):
            self.subtype(ctx, a.view, e.view, rule, span, equal)
            self.subtype(ctx, a.vt, e.vt, rule, span, equal)
            return
        if isinstance(a, VTImp):
            self.subtype(ctx, e.view, a.view, rule, span, equal)
            self.subtype(ctx, a.vt, e.vt, rule, span, equal)
            return
        if isinstance(a, (SGuard, SAssert)):
            self.equal_index(ctx, a.prop, e.prop, Sort.BOOL, rule, span)
            self.subtype(ctx.with_hyp(a.prop), a.body, e.body, rule, span, equal)
            return
        if isinstance(a, SForall):
            if a.sort != e.sort:
                mismatch()
            k = fresh_name(a.var)
            inner = ctx.with_svar(k, a.sort)
            self.subtype(inner, subst_static(a.body, {a.var: SVar(k)}),
                         subst_static(e.body, {e.var: SVar(k)}), rule, span, equal)
            return
        if isinstance(a, SExists):
            inner, body_a, _ = self.open_exists(ctx, a)
            body_e, obligations, _ = self.inst_exists(e)
            self.subtype(inner, body_a, body_e, rule, span, equal)
            self.settle(span)
            for p in obligations:
                self.require(inner, p, rule, "existential property", span)
            return
        mismatch()

    # -- quantifier helpers -------------------------------------------------

    def open_exists(self, ctx: Ctx, t: Static, names: tuple = ()):
        """Open an existential chain with skolems.  ``names`` (from an earlier
        check) are reused for the innermost quantifiers: re-checking a reduced
        term may add outer ones for skolems that now escape."""
        t = self.resolve(t)
        used = []
        depth, u = 0, t
        while isinstance(u, (SExists, SAssert)):
            depth += isinstance(u, SExists)
            u = u.body
        names = [None] * max(depth - len(names), 0) + list(names)[-depth:] if depth else []
        while isinstance(t, (SExists, SAssert)):
            if isinstance(t, SExists):
                k = (names.pop(0) if names else None) or fresh_name(t.var)
                ctx = ctx.with_svar(k, t.sort)
                t = subst_static(t.body, {t.var: SVar(k)})
                used.append(k)
            else:
                ctx = ctx.with_hyp(t.prop)
                t = t.body
        return ctx, t, tuple(used)

    def inst_exists(self, t: Static):
        """Instantiate an existential chain with metas; returns (body, props, metas)."""
        t = self.resolve(t)
        props, metas = [], []
        while isinstance(t, (SExists, SAssert)):
            if isinstance(t, SExists):
                m = self.new_meta(t.var, t.sort)
                metas.append(m)
                t = subst_static(t.body, {t.var: m})
            else:
                props.append(t.prop)
                t = t.body
        return t, props, metas

    def instantiate(self, ctx: Ctx, t: Static, sargs, span, rule: str):
        """Strip a forall/guard prefix.  Explicit static arguments are used in
        order; missing ones become metas.  Returns (body, args, guards)."""
        from .statics import elab_static
        t = self.resolve(t)
        given = list(sargs or ())
        args, guards = [], []
        while isinstance(t, (SForall, SGuard)):
            if isinstance(t, SForall):
                if given:
                    a, _ = elab_static(self.env, ctx.sigma, given.pop(0), t.sort)
                else:
                    a = self.new_meta(t.var, t.sort)
                args.append(a)
                t = subst_static(t.body, {t.var: a})
            else:
                guards.append(t.prop)
                t = t.body
        if given:
            self.fail(rule, "too many static arguments", span)
        return t, args, guards


def _single(atom, c):
    from .linear import LinForm
    return LinForm(0, ((atom, c),))


def _occurs(name: str, s: Static) -> bool:
    if isinstance(s, SMeta):
        return s.name == name
    from .statics import children
    return any(_occurs(name, k) for k in children(s))
