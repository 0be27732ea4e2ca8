"""Assigning views to proof terms: linear threading, constructor patterns,
exhaustiveness and totality of proof functions."""

from __future__ import annotations

from typing import Optional

from .context import (
    Binding, Ctx, Unifier, _ids, flat_views, is_persistent_view, strip_vt,
)
from .core import (
    PBorrowT, PBoxT, PCallT, PConT, PLetT, PLocT, PPCon, PPTup, PPVar, PPWild, PSifT, PTupT,
    PUnitT, PVarT,
)
from .printer import pp_static
from .statics import elab_static, fresh_name, subst_static
from .syntax import (
    TRUE, SCon, SGuard, SOp, Sort, Static, SVar, VAt, VBox, VLolli, VOne,
    VTensor, s_not,
)


def _conj(props) -> Static:
    out = None
    for p in props:
        out = p if out is None else SOp("&&", (out, p))
    return TRUE if out is None else out


class ProofChecker(Unifier):
    """Proof-level judgments.  State: ``live`` (ids of unconsumed linear
    bindings), ``linear_locs``/``boxed_locs`` (the LocResource of location
    constants met so far) and ``loc_types`` (the store type used for them)."""

    def __init__(self):
        super().__init__()
        self.live: set[int] = set()
        self.linear_locs: list[int] = []
        self.boxed_locs: set[int] = set()
        self.loc_types: dict[int, Static] = {}
        self.box_depth = 0
        self.metric_stack: list = []  # (prfun name, metric statics, sigma binder names)
        self.trace: Optional[list] = None

    # -- bookkeeping ----------------------------------------------------------

    def log(self, rule: str, what: str):
        if self.trace is not None:
            self.trace.append(f"{rule}: {what}")

    def bind(self, name: str, typ: Static, persistent: bool, span=None,
             kind: str = "proof") -> Binding:
        b = Binding(name, typ, not persistent, next(_ids), span, kind)
        if b.linear:
            self.live.add(b.id)
        return b

    def consume(self, b: Binding, rule: str, span):
        if not b.linear:
            return
        if b.id not in self.live:
            self.fail(rule, f"linear {b.kind} '{b.name}' is used more than once", span)
        self.live.discard(b.id)

    def close_scope(self, bindings, rule: str):
        for b in bindings:
            if b.linear and b.id in self.live:
                self.live.discard(b.id)
                self.fail(rule, f"linear {b.kind} '{b.name}' is never consumed", b.span)

    def branch_state(self):
        return set(self.live), list(self.linear_locs), set(self.boxed_locs)

    def restore(self, state):
        self.live, self.linear_locs, self.boxed_locs = set(state[0]), list(state[1]), set(state[2])

    def join_branches(self, ctx_then: Ctx, ctx_else: Ctx, after_then, rule: str, span):
        """Both branches must consume the same linear entries (unless one is dead code)."""
        live_t, locs_t, boxed_t = after_then
        dead_t = not self.consistent(ctx_then)
        dead_e = not self.consistent(ctx_else)
        if dead_e and not dead_t:
            self.restore(after_then)
            return
        if dead_t:
            return
        if live_t != self.live:
            names = self._names_of(live_t ^ self.live, ctx_then, ctx_else)
            self.fail(rule, "the branches consume different linear resources"
                            + (f" ({', '.join(sorted(names))})" if names else ""), span)
        if sorted(locs_t) != sorted(self.linear_locs):
            self.fail(rule, "the branches consume different location proofs", span)
        self.boxed_locs |= boxed_t

    @staticmethod
    def _names_of(ids, *ctxs):
        out = set()
        for c in ctxs:
            for b in list(c.proofs.values()) + list(c.dyns.values()):
                if b.id in ids:
                    out.add(b.name)
        return out

    # -- proofs -----------------------------------------------------------------

    def check_proof(self, ctx: Ctx, p, expected: Static):
        expected = strip_vt(self.resolve(expected))
        if isinstance(expected, SGuard) and not isinstance(p, (PVarT,)):
            inner = ctx.with_hyp(expected.prop)
            if not self.consistent(inner):
                self.log("vw-guard+", f"{pp_static(expected.prop)} unsatisfiable")
                if isinstance(p, PUnitT):
                    return p
                return self.synth_proof(ctx, p)[0]
            return self.check_proof(inner, p, expected.body)
        if isinstance(p, PTupT):
            items = self._split_expected(expected, len(p.items))
            if items is not None:
                return PTupT(tuple(self.check_proof(ctx, q, v) for q, v in zip(p.items, items)),
                             span=p.span)
        if isinstance(p, PUnitT):
            if flat_views(expected) == [] and isinstance(expected, (VOne, VTensor)):
                return p
        if isinstance(p, PConT):
            return self.con_proof(ctx, p, expected)[0]
        if isinstance(p, PCallT):
            return self.call_proof(ctx, p, expected)[0]
        if isinstance(p, PLetT):
            return self.let_proof(ctx, p, expected)[0]
        if isinstance(p, PSifT):
            return self.sif_proof(ctx, p, expected)[0]
        if isinstance(p, PBoxT) and isinstance(expected, VBox):
            return self.box_proof(ctx, p, expected.view)[0]
        q, v = self.synth_proof(ctx, p)
        self.subtype(ctx, v, expected, "vw-sub", p.span)
        return q

    def _split_expected(self, expected: Static, n: int):
        if isinstance(expected, VTensor) and len(expected.items) == n:
            return expected.items
        fl = flat_views(expected)
        if len(fl) == n:
            return fl
        return None

    def synth_proof(self, ctx: Ctx, p):
        if isinstance(p, PVarT):
            b = ctx.proofs.get(p.name)
            if b is None:
                self.fail("vw-var", f"unbound proof variable '{p.name}'", p.span)
            self.consume(b, "vw-var", p.span)
            return p, b.typ
        if isinstance(p, PUnitT):
            return p, VOne()
        if isinstance(p, PLocT):
            return p, self.loc_proof(p)
        if isinstance(p, PTupT):
            items, views = [], []
            for q in p.items:
                q2, v = self.synth_proof(ctx, q)
                items.append(q2)
                views.append(v)
            return PTupT(tuple(items), span=p.span), VTensor(tuple(views))
        if isinstance(p, PConT):
            return self.con_proof(ctx, p, None)
        if isinstance(p, PCallT):
            return self.call_proof(ctx, p, None)
        if isinstance(p, PLetT):
            return self.let_proof(ctx, p, None)
        if isinstance(p, PSifT):
            return self.sif_proof(ctx, p, None)
        if isinstance(p, PBoxT):
            return self.box_proof(ctx, p, None)
        if isinstance(p, PBorrowT):
            self.box_depth += 1
            try:
                q, v = self.synth_proof(ctx, p.proof)
            finally:
                self.box_depth -= 1
            v = self.resolve(v)
            if not isinstance(v, VBox):
                self.fail("ty-inv", "only a boxed proof can be lent to an invariant call", p.span)
            return PBorrowT(q, span=p.span), v.view
        self.fail("vw-synth", "cannot synthesize a view for this proof", getattr(p, "span", None))

    def loc_proof(self, p: PLocT) -> Static:
        from .syntax import SAddr
        t = self.loc_types.get(p.loc)
        if t is None:
            self.fail("vw-addr", f"location l{p.loc} is not in the store", p.span)
        if self.box_depth:
            if p.loc in self.linear_locs:
                self.fail("vw-addr", f"location l{p.loc} is both boxed and ephemeral", p.span)
            self.boxed_locs.add(p.loc)
        else:
            if p.loc in self.linear_locs or p.loc in self.boxed_locs:
                self.fail("vw-addr", f"location proof l{p.loc} is used more than once", p.span)
            self.linear_locs.append(p.loc)
        return VAt(t, SAddr(p.loc))

    def box_proof(self, ctx: Ctx, p: PBoxT, expected_inner: Optional[Static]):
        self.box_depth += 1
        try:
            if expected_inner is not None:
                q = self.check_proof(ctx, p.proof, expected_inner)
                v = expected_inner
            else:
                q, v = self.synth_proof(ctx, p.proof)
        finally:
            self.box_depth -= 1
        v = self.resolve(v)
        if is_persistent_view(v):
            self.fail("viewbox", "viewbox needs an ephemeral (linear) proof", p.span)
        self.log("viewbox", pp_static(v))
        return PBoxT(q, span=p.span), VBox(v)

    # -- constructors -----------------------------------------------------------

    def con_sig(self, name: str, span):
        sig = self.sigs.get(name)
        if sig is None:
            self.fail("vw-con", f"unknown proof constructor '{name}'", span)
        return sig

    def con_proof(self, ctx: Ctx, p: PConT, expected: Optional[Static]):
        sig = self.con_sig(p.name, p.span)
        body, sargs, guards = self.instantiate(ctx, sig.view(), p.sargs, p.span, "vw-con")
        assert isinstance(body, VLolli)
        if expected is not None:
            exp = self.resolve(expected)
            if isinstance(exp, SCon) and exp.name == sig.dataview:
                self.subtype(ctx, body.cod, exp, "vw-con", p.span)
        arg_views = sig.args
        mapping = {n: a for (n, _), a in zip(sig.binders, sargs)}
        arg_views = tuple(subst_static(v, mapping) for v in sig.args)
        if len(p.args) != len(arg_views):
            self.fail("vw-con", f"constructor '{p.name}' takes {len(arg_views)} proof(s), "
                                f"got {len(p.args)}", p.span)
        args = tuple(self.check_proof(ctx, q, v) for q, v in zip(p.args, arg_views))
        if expected is not None:
            self.subtype(ctx, body.cod, expected, "vw-con", p.span)
        self.settle(p.span)
        for g in guards:
            self.require(ctx, g, "vw-con", f"guard of constructor '{p.name}'", p.span)
        sargs = tuple(self.resolve(a) for a in sargs)
        self._no_metas(sargs, "vw-con", f"cannot infer the static arguments of '{p.name}'",
                       p.span)
        self.log("vw-con", f"{p.name} : {pp_static(self.resolve(body.cod))}")
        return PConT(p.name, sargs, args, span=p.span), self.resolve(body.cod)

    def _no_metas(self, statics, rule, msg, span):
        from .statics import has_meta
        for s in statics:
            if has_meta(self.resolve(s)):
                self.fail(rule, msg, span)

    # -- proof functions ----------------------------------------------------------

    def call_proof(self, ctx: Ctx, p: PCallT, expected: Optional[Static]):
        ftype = self.prfuns.get(p.fn)
        if ftype is None:
            self.fail("vw-app", f"unknown proof function '{p.fn}'", p.span)
        body, sargs, guards = self.instantiate(ctx, ftype, p.sargs, p.span, "vw-app")
        assert isinstance(body, VLolli)
        arg = self.check_proof(ctx, p.arg, body.dom)
        if expected is not None:
            self.subtype(ctx, body.cod, expected, "vw-app", p.span)
        self.settle(p.span)
        for g in guards:
            self.require(ctx, g, "vw-app", f"guard of '{p.fn}'", p.span)
        sargs = tuple(self.resolve(a) for a in sargs)
        self._no_metas(sargs, "vw-app", f"cannot infer the static arguments of '{p.fn}'", p.span)
        if self.metric_stack and self.metric_stack[-1][0] == p.fn:
            self.check_decrease(ctx, p.fn, sargs, p.span)
        return PCallT(p.fn, sargs, arg, span=p.span), self.resolve(body.cod)

    def check_decrease(self, ctx: Ctx, fn: str, sargs, span):
        """Lexicographic decrease of the metric at a recursive call."""
        _, metric, binders = self.metric_stack[-1]
        if not metric:
            self.fail("totality", f"recursive proof function '{fn}' needs a termination "
                                  f"metric .<...>.", span)
        mapping = {n: a for n, a in zip(binders, sargs)}
        new = [subst_static(m, mapping) for m in metric]
        options = []
        for k in range(len(metric)):
            eqs = [SOp("==", (new[j], metric[j])) for j in range(k)]
            options.append(_conj(eqs + [SOp("<", (new[k], metric[k])), SOp(">=", (new[k], _zero()))]))
        goal = options[0]
        for o in options[1:]:
            goal = SOp("||", (goal, o))
        self.log("totality", f"{fn}: {pp_static(goal)}")
        if not self.entail(ctx, goal):
            self.fail("totality", f"termination metric of '{fn}' does not decrease at this call",
                      span, pp_static(goal))

    # -- lets and sif -------------------------------------------------------------

    def let_proof(self, ctx: Ctx, p: PLetT, expected):
        rhs, v = self.synth_proof(ctx, p.rhs)
        inner, pat, bindings = self.bind_ppat(ctx, p.pat, v, p.span)
        if expected is not None:
            body = self.check_proof(inner, p.body, expected)
            out = expected
        else:
            body, out = self.synth_proof(inner, p.body)
        self.close_scope(bindings, "vw-let")
        return PLetT(pat, rhs, body, span=p.span), out

    def sif_proof(self, ctx: Ctx, p: PSifT, expected):
        prop = p.prop if getattr(p, "_elab", False) else self.elab_prop(ctx, p.prop, p.span)
        ctx_t, ctx_e = ctx.with_hyp(prop), ctx.with_hyp(s_not(prop))
        before = self.branch_state()
        if expected is not None:
            then = self.check_proof(ctx_t, p.then, expected)
            out = expected
        else:
            then, out = self.synth_proof(ctx_t, p.then)
        after_then = self.branch_state()
        self.restore(before)
        els = self.check_proof(ctx_e, p.els, out)
        self.join_branches(ctx_t, ctx_e, after_then, "vw-sif", p.span)
        return PSifT(prop, then, els, span=p.span), out

    def elab_prop(self, ctx: Ctx, prop: Static, span) -> Static:
        try:
            return elab_static(self.env, ctx.sigma, prop, Sort.BOOL)[0]
        except Exception as e:  # SortError carries its own span
            if getattr(e, "span", None) is None:
                e.span = span
            raise

    # -- proof patterns -------------------------------------------------------------

    def bind_ppat(self, ctx: Ctx, pat, view: Static, span):
        """Match ``pat`` against a proof of ``view``; returns (ctx', pattern, bindings)."""
        view = strip_vt(self.resolve(view))
        if isinstance(pat, PPVar):
            b = self.bind(pat.name, view, is_persistent_view(view), pat.span or span)
            return ctx.with_proof(b), pat, [b]
        if isinstance(pat, PPWild):
            if not is_persistent_view(view):
                self.fail("vw-let", f"a linear proof of {pp_static(view)} is discarded by '_'",
                          pat.span or span)
            return ctx, pat, []
        if isinstance(pat, PPTup):
            if isinstance(view, VBox):
                items = self._split_expected(view.view, len(pat.items))
                items = tuple(VBox(i) for i in items) if items is not None else None
            else:
                items = self._split_expected(view, len(pat.items))
            if items is None:
                self.fail("vw-let", f"pattern of {len(pat.items)} proofs does not match "
                                    f"{pp_static(view)}", pat.span or span)
            out, bindings = [], []
            for q, v in zip(pat.items, items):
                ctx, q2, bs = self.bind_ppat(ctx, q, v, span)
                out.append(q2)
                bindings.extend(bs)
            return ctx, PPTup(tuple(out), span=pat.span), bindings
        if isinstance(pat, PPCon):
            return self.match_con(ctx, pat, view, span)
        self.fail("vw-let", "bad proof pattern", span)

    def con_constraints(self, ctx: Ctx, sig, scrut: SCon, names=None):
        """Open constructor ``sig`` against the scrutinee indices.  Returns
        (ctx', mapping, binds, equations) where equations are index equalities."""
        mapping, binds = {}, []
        given = list(names) if names is not None else None
        for i, (b, sort) in enumerate(sig.binders):
            bare = [j for j, h in enumerate(sig.head.args) if h == SVar(b)]
            reuse = given[i] if given is not None else None
            if bare and reuse is None:
                mapping[b] = scrut.args[bare[0]]
                binds.append(None)
            else:
                k = reuse or fresh_name(b)
                ctx = ctx.with_svar(k, sort)
                mapping[b] = SVar(k)
                binds.append(k)
        eqs, type_eqs = [], []
        sorts = self.env.dataviews[sig.dataview]
        for h, idx, so in zip(sig.head.args, scrut.args, sorts):
            inst = subst_static(h, mapping)
            if inst == idx:
                continue
            if so in (Sort.INT, Sort.ADDR, Sort.BOOL):
                eqs.append(SOp("==", (inst, idx)))
            else:
                type_eqs.append((inst, idx))
        guards = [subst_static(g, mapping) for g in sig.guards]
        return ctx, mapping, tuple(binds), eqs + guards, type_eqs

    def match_con(self, ctx: Ctx, pat: PPCon, view: Static, span):
        sp = pat.span or span
        sig = self.con_sig(pat.name, sp)
        if not (isinstance(view, SCon) and view.name == sig.dataview):
            self.fail("vw-match", f"constructor '{pat.name}' builds {sig.dataview}, "
                                  f"but the proof has view {pp_static(view)}", sp)
        inner, mapping, binds, props, type_eqs = self.con_constraints(ctx, sig, view, pat.binds)
        for a, b in type_eqs:
            self.subtype(inner, a, b, "vw-match", sp, equal=True)
        for prop in props:
            inner = inner.with_hyp(prop)
        self.check_exhaustive(ctx, sig, view, sp)
        arg_views = tuple(subst_static(v, mapping) for v in sig.args)
        if len(arg_views) != len(pat.args):
            self.fail("vw-match", f"constructor '{pat.name}' has {len(arg_views)} proof "
                                  f"argument(s), pattern gives {len(pat.args)}", sp)
        out, bindings = [], []
        for q, v in zip(pat.args, arg_views):
            inner, q2, bs = self.bind_ppat(inner, q, v, span)
            out.append(q2)
            bindings.extend(bs)
        return inner, PPCon(pat.name, tuple(out), binds, span=pat.span), bindings

    def check_exhaustive(self, ctx: Ctx, sig, view: SCon, span):
        for other_name in self.dataview_ctors[sig.dataview]:
            if other_name == sig.name:
                continue
            other = self.sigs[other_name]
            octx, _, _, props, _ = self.con_constraints(ctx, other, view)
            if self.consistent(octx.with_hyp(_conj(props)) if props else octx):
                self.fail("exhaustive", f"pattern '{sig.name}' is not exhaustive: "
                                        f"'{other_name}' is possible here", span,
                          pp_static(_conj(list(ctx.hyps) + props)))
            self.log("exhaustive", f"{sig.name} excludes {other_name}")


def _zero():
    from .syntax import SInt
    return SInt(0)

