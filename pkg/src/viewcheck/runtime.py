"""Small-step evaluation over an explicit store, for erased and instrumented
(proof-carrying) terms, with the store-typing and subject-reduction oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .core import (
    App, Cst, DPTup, DPVar, DPVT, DPWild, ExPack, FixV, If, InvApp, InvRet, Let, LetFun,
    Lit, LocV, PBorrowT, PBoxT, PCallT, PConT, PLetT, PLocT, PPCon, PPTup, PPVar, PPWild, PrLet,
    PSifT, PTupT, PUnitT, PVarT, Read, Sif, Tup, Unit, Var, VTup, Write,
)
from .erasure import erase, erase_fundef
from .linear import eval_prop, normalize
from .statics import elab_static, subst_static
from .subst import Subst
from .context import Ctx
from .diagnostics import ViewcheckError
from .syntax import (
    SAddr, SBool, SCon, SInt, Sort, Static, SVar, TTuple, UNIT_T, VAt, VBox, VOne, VTensor,
    tensor,
)
from .typecheck import Checker, builtin_signature


@dataclass
class Store:
    cells: dict = field(default_factory=dict)
    cursor: int = 1

    def copy(self) -> "Store":
        return Store(dict(self.cells), self.cursor)

    def dump(self) -> list[str]:
        return [f"l_{k} = {_show(v)}" for k, v in sorted(self.cells.items())]


@dataclass
class Value:
    term: object
    steps: int = 0


@dataclass
class Step:
    store: Store
    term: object
    rule: str = ""
    span: object = None
    note: str = ""


@dataclass
class Stuck:
    reason: str
    span: object = None
    steps: int = 0


@dataclass
class FuelExhausted:
    term: object
    steps: int = 0


Result = Union[Value, Stuck, FuelExhausted]


class _Stuck(Exception):
    def __init__(self, reason: str, span=None):
        super().__init__(reason)
        self.reason = reason
        self.span = span


# ---------------------------------------------------------------------------
# values


def is_proof_value(p) -> bool:
    if p is None or isinstance(p, (PLocT, PUnitT)):
        return True
    if isinstance(p, PTupT):
        return all(is_proof_value(i) for i in p.items)
    if isinstance(p, PConT):
        return all(is_proof_value(i) for i in p.args)
    if isinstance(p, (PBoxT, PBorrowT)):
        return is_proof_value(p.proof)
    return False


def is_value(t, funs=()) -> bool:
    if isinstance(t, (Lit, Unit, LocV, FixV)):
        return True
    if isinstance(t, Var):
        return t.name in funs
    if isinstance(t, Tup):
        return all(is_value(i, funs) for i in t.items)
    if isinstance(t, VTup):
        return is_proof_value(t.proof) and is_value(t.dyn, funs)
    if isinstance(t, ExPack):
        return is_value(t.body, funs)
    return False


def solve_binders(sig, indices: tuple, partial: bool = False) -> Optional[dict]:
    """Closed static arguments for constructor ``sig`` producing ``indices``
    (with ``partial``, those determined by the head)."""
    env: dict = {}
    pending = list(zip(sig.head.args, indices))
    for _ in range(len(pending) + 1):
        rest = []
        for h, want in pending:
            h2 = subst_static(h, env)
            if isinstance(h2, SVar) and h2.name not in env:
                env[h2.name] = want
                continue
            try:
                lf = normalize(h2) - normalize(want)
            except Exception:
                rest.append((h, want))
                continue
            vars_ = [(a, c) for a, c in lf.terms if isinstance(a, SVar)]
            if len(vars_) == 1 and len(lf.terms) == 1 and abs(vars_[0][1]) == 1:
                (a, c), = vars_
                val = -lf.const * c
                sort = dict(sig.binders).get(a.name)
                env[a.name] = SAddr(val) if sort == Sort.ADDR and val >= 0 else SInt(val)
            elif lf.terms:
                rest.append((h, want))
        pending = rest
        if not pending:
            break
    if not partial and any(n not in env for n, _ in sig.binders):
        return None
    return env


# ---------------------------------------------------------------------------


class Machine:
    """Evaluator for one program.  ``instrumented`` keeps proofs and statics."""

    def __init__(self, checked, instrumented: bool = True):
        self.checked = checked
        self.instrumented = instrumented
        if instrumented:
            self.funs = dict(checked.funs)
        else:
            self.funs = {n: erase_fundef(fd) for n, fd in checked.funs.items()}
        self.prfuns = checked.prfun_defs
        self.sigs = checked.sigs
        self.boxed: set[int] = set()

    # -- proofs: normalized in one step when they reach a redex -------------

    def norm(self, p, depth: int = 0):
        if p is None or isinstance(p, (PLocT, PUnitT)):
            return p
        if depth > 10000:
            raise _Stuck("proof normalization does not terminate", getattr(p, "span", None))
        if isinstance(p, PTupT):
            return PTupT(tuple(self.norm(i, depth + 1) for i in p.items), span=p.span)
        if isinstance(p, PConT):
            return PConT(p.name, p.sargs, tuple(self.norm(i, depth + 1) for i in p.args),
                         span=p.span)
        if isinstance(p, PBoxT):
            q = self.norm(p.proof, depth + 1)
            self.boxed |= _locs(q)
            return PBoxT(q, span=p.span)
        if isinstance(p, PBorrowT):
            return PBorrowT(self.norm(p.proof, depth + 1), span=p.span)
        if isinstance(p, PCallT):
            fd = self.prfuns.get(p.fn)
            if fd is None:
                raise _Stuck(f"unknown proof function '{p.fn}'", p.span)
            arg = self.norm(p.arg, depth + 1)
            sub = Subst(stat={n: a for (n, _), a in zip(fd.binders, p.sargs or ())})
            self.match_ppat(fd.ppat, arg, sub)
            return self.norm(sub.p(fd.body), depth + 1)
        if isinstance(p, PLetT):
            rhs = self.norm(p.rhs, depth + 1)
            sub = Subst()
            self.match_ppat(p.pat, rhs, sub)
            return self.norm(sub.p(p.body), depth + 1)
        if isinstance(p, PSifT):
            try:
                b = eval_prop(p.prop)
            except Exception:
                raise _Stuck("static condition is not closed", p.span)
            return self.norm(p.then if b else p.els, depth + 1)
        if isinstance(p, PVarT):
            raise _Stuck(f"free proof variable '{p.name}'", p.span)
        raise _Stuck(f"not a proof: {type(p).__name__}", getattr(p, "span", None))

    def match_ppat(self, pat, p, sub: Subst):
        if isinstance(pat, PPVar):
            sub.proof[pat.name] = p
        elif isinstance(pat, PPWild):
            pass
        elif isinstance(pat, PPTup):
            items = p.items if isinstance(p, PTupT) else None
            if items is None and isinstance(p, PBoxT) and isinstance(p.proof, PTupT):
                items = tuple(PBoxT(i) for i in p.proof.items)
            if items is None and isinstance(p, PUnitT) and not pat.items:
                return
            if items is None or len(items) != len(pat.items):
                raise _Stuck("proof tuple pattern mismatch", pat.span)
            for q, v in zip(pat.items, items):
                self.match_ppat(q, v, sub)
        elif isinstance(pat, PPCon):
            if not isinstance(p, PConT) or p.name != pat.name:
                raise _Stuck(f"proof pattern '{pat.name}' does not match", pat.span)
            sig = self.sigs[pat.name]
            for (b, _), sk, arg in zip(sig.binders, pat.binds or (), p.sargs or ()):
                if sk:
                    sub.stat[sk] = arg
            for q, v in zip(pat.args, p.args):
                self.match_ppat(q, v, sub)
        else:
            raise _Stuck("bad proof pattern", getattr(pat, "span", None))

    def match_dpat(self, pat, v, sub: Subst, opened=()):
        if isinstance(v, ExPack) and (opened or not isinstance(pat, (DPVar, DPWild))):
            for name, w in zip(opened, v.witnesses):
                sub.stat[name] = w
            opened = opened[len(v.witnesses):]
            return self.match_dpat(pat, v.body, sub, opened)
        if isinstance(pat, DPVar):
            sub.dyn[pat.name] = v
        elif isinstance(pat, DPWild):
            pass
        elif isinstance(pat, DPTup):
            if not isinstance(v, Tup) or len(v.items) != len(pat.items):
                raise _Stuck("tuple pattern mismatch", pat.span)
            for q, x in zip(pat.items, v.items):
                self.match_dpat(q, x, sub)
        elif isinstance(pat, DPVT):
            if isinstance(v, VTup):
                self.match_ppat(pat.proof, v.proof, sub)
                self.match_dpat(pat.dyn, v.dyn, sub)
            else:
                self.match_ppat(pat.proof, PUnitT(), sub)
                self.match_dpat(pat.dyn, v, sub)
        else:
            raise _Stuck("bad pattern", getattr(pat, "span", None))

    # -- one step -------------------------------------------------------------

    def step(self, store: Store, t) -> Union[Step, Value, Stuck]:
        if self.value(t):
            return Value(t)
        self._store = store
        self._note = ""
        try:
            t2, rule, span = self._step(t)
        except _Stuck as s:
            return Stuck(s.reason, s.span)
        return Step(store, t2, rule, span, self._note)

    def value(self, t) -> bool:
        return is_value(t, self.funs)

    def _proof(self, p):
        """Normalize a pending proof; returns (proof, changed)."""
        if is_proof_value(p):
            self.boxed |= _boxed(p)
            return p, False
        return self.norm(p), True

    def _step(self, t):
        v = self.value
        if isinstance(t, Var):
            if t.name == "null":
                return LocV(0, span=t.span), "null", t.span
            raise _Stuck(f"free variable '{t.name}'", t.span)
        if isinstance(t, Tup):
            for i, x in enumerate(t.items):
                if not v(x):
                    x2, r, s = self._step(x)
                    return Tup(t.items[:i] + (x2,) + t.items[i + 1:], span=t.span), r, s
        if isinstance(t, VTup):
            p, changed = self._proof(t.proof)
            if changed:
                return VTup(p, t.dyn, span=t.span), "proof", t.span
            d, r, s = self._step(t.dyn)
            return VTup(p, d, span=t.span), r, s
        if isinstance(t, ExPack):
            b, r, s = self._step(t.body)
            return ExPack(t.witnesses, b, t.typ, span=t.span), r, s
        if isinstance(t, Cst):
            p, changed = self._proof(t.proof)
            if changed:
                return Cst(t.name, t.sargs, p, t.args, span=t.span), "proof", t.span
            for i, x in enumerate(t.args):
                if not v(x):
                    x2, r, s = self._step(x)
                    return Cst(t.name, t.sargs, p, t.args[:i] + (x2,) + t.args[i + 1:],
                               span=t.span), r, s
            return self.delta(t), t.name, t.span
        if isinstance(t, Read):
            p, changed = self._proof(t.proof)
            if changed:
                return Read(p, t.ptr, span=t.span), "proof", t.span
            if not v(t.ptr):
                x, r, s = self._step(t.ptr)
                return Read(p, x, span=t.span), r, s
            loc = self.loc_of(t.ptr, t.span)
            if loc not in self._store.cells:
                raise _Stuck(f"dangling read at l_{loc}", t.span)
            val = self._store.cells[loc]
            return (VTup(p, val, span=t.span) if self.instrumented else val), "read", t.span
        if isinstance(t, Write):
            p, changed = self._proof(t.proof)
            if changed:
                return Write(p, t.ptr, t.val, span=t.span), "proof", t.span
            if not v(t.ptr):
                x, r, s = self._step(t.ptr)
                return Write(p, x, t.val, span=t.span), r, s
            if not v(t.val):
                x, r, s = self._step(t.val)
                return Write(p, t.ptr, x, span=t.span), r, s
            loc = self.loc_of(t.ptr, t.span)
            if loc not in self._store.cells:
                raise _Stuck(f"dangling write at l_{loc}", t.span)
            self._store.cells[loc] = t.val
            self._note = f"ST[l_{loc} := {_show(t.val)}]"
            out = VTup(p, Unit(span=t.span), span=t.span) if self.instrumented else Unit(span=t.span)
            return out, "write", t.span
        if isinstance(t, (App, InvApp)):
            if not v(t.fn):
                x, r, s = self._step(t.fn)
                return type(t)(x, t.sargs, t.proof, t.arg, span=t.span), r, s
            p, changed = self._proof(t.proof)
            if changed:
                return type(t)(t.fn, t.sargs, p, t.arg, span=t.span), "proof", t.span
            if not v(t.arg):
                x, r, s = self._step(t.arg)
                return type(t)(t.fn, t.sargs, p, x, span=t.span), r, s
            if isinstance(t, InvApp):
                inner = App(t.fn, t.sargs, PBorrowT(p, span=t.span), t.arg, span=t.span)
                return InvRet(inner, span=t.span), "inv-app", t.span
            return self.beta(t.fn, t.sargs, p, t.arg, t.span)
        if isinstance(t, InvRet):
            if v(t.body):
                b = t.body
                while isinstance(b, ExPack):
                    b = b.body
                return (b.dyn if isinstance(b, VTup) else b), "inv-ret", t.span
            x, r, s = self._step(t.body)
            return InvRet(x, span=t.span), r, s
        if isinstance(t, If):
            if not v(t.cond):
                x, r, s = self._step(t.cond)
                return If(x, t.then, t.els, span=t.span), r, s
            c = t.cond
            while isinstance(c, (VTup, ExPack)):
                c = c.dyn if isinstance(c, VTup) else c.body
            if not isinstance(c, Lit) or not isinstance(c.value, bool):
                raise _Stuck("if on a non-boolean", t.span)
            return (t.then if c.value else t.els), "if", t.span
        if isinstance(t, Sif):
            try:
                b = eval_prop(t.prop)
            except Exception:
                raise _Stuck("static condition is not closed", t.span)
            return (t.then if b else t.els), "sif", t.span
        if isinstance(t, Let):
            if not v(t.rhs):
                x, r, s = self._step(t.rhs)
                return Let(t.pat, x, t.body, t.opened, span=t.span), r, s
            sub = Subst()
            self.match_dpat(t.pat, t.rhs, sub, t.opened)
            return sub.d(t.body), "let", t.span
        if isinstance(t, PrLet):
            p = self.norm(t.proof)
            sub = Subst()
            self.match_ppat(t.pat, p, sub)
            return sub.d(t.body), "prlet", t.span
        if isinstance(t, LetFun):
            return Subst(dyn={t.fd.name: FixV(t.fd, span=t.fd.span)}).d(t.body), "fix", t.span
        raise _Stuck(f"no rule for {type(t).__name__}", getattr(t, "span", None))

    def loc_of(self, t, span) -> int:
        while isinstance(t, (VTup, ExPack)):
            t = t.dyn if isinstance(t, VTup) else t.body
        if not isinstance(t, LocV):
            raise _Stuck("expected a pointer", span)
        return t.loc

    def beta(self, fn, sargs, proof, arg, span):
        if isinstance(fn, FixV):
            fd = fn.fd
            sub = Subst(dyn={fd.name: fn})
            rule = "fix-app"
        elif isinstance(fn, Var) and fn.name in self.funs:
            fd = self.funs[fn.name]
            sub = Subst()
            rule = "app"
        else:
            raise _Stuck("application of a non-function", span)
        if self.instrumented:
            for (n, _), a in zip(fd.binders, sargs or ()):
                sub.stat[n] = a
            self.match_ppat(fd.ppat, proof if proof is not None else PUnitT(), sub)
        self.match_dpat(fd.dpat, arg, sub)
        return sub.d(fd.body), rule, span

    # -- constants --------------------------------------------------------------

    def delta(self, t: Cst):
        name, args = t.name, [_strip(a) for a in t.args]
        if name == "alloc":
            n = _int_of(args[0], t.span)
            if n < 0:
                raise _Stuck("alloc of a negative size", t.span)
            base = self._store.cursor
            for i in range(n):
                self._store.cells[base + i] = Unit()
            self._store.cursor = base + max(n, 1)
            self._note = f"ST + {{{_range(base, n)} := ()}}" if n else ""
            if not self.instrumented:
                return LocV(base, span=t.span)
            return self.alloc_value(base, n, t.span)
        if name == "free":
            base, n = self.loc_of(args[0], t.span), _int_of(args[1], t.span)
            for i in range(n):
                if base + i not in self._store.cells:
                    raise _Stuck(f"dangling free at l_{base + i}", t.span)
            for i in range(n):
                del self._store.cells[base + i]
            self._note = f"ST - {{{_range(base, n)}}}" if n else ""
            return Unit(span=t.span)
        if name == "isNull":
            return Lit(self.loc_of(args[0], t.span) == 0, span=t.span)
        if name == "ipred":
            return Lit(_int_of(args[0], t.span) - 1, span=t.span)
        if name == "isucc":
            return Lit(_int_of(args[0], t.span) + 1, span=t.span)
        a, b = args
        if name in ("+", "-") and isinstance(a, LocV):
            if isinstance(b, LocV) and name == "-":
                return Lit(a.loc - b.loc, span=t.span)
            off = _int_of(b, t.span)
            k = a.loc + off if name == "+" else a.loc - off
            if k < 0:
                raise _Stuck("pointer arithmetic below null", t.span)
            return LocV(k, span=t.span)
        if name in ("ieq", "ineq"):
            x, y = _scalar(a), _scalar(b)
            return Lit((x == y) if name == "ieq" else (x != y), span=t.span)
        x, y = _int_of(a, t.span), _int_of(b, t.span)
        if name == "+":
            return Lit(x + y, span=t.span)
        if name == "-":
            return Lit(x - y, span=t.span)
        if name == "*":
            return Lit(x * y, span=t.span)
        if name in ("/", "imod"):
            if y == 0:
                raise _Stuck("division by zero", t.span)
            q = abs(x) // abs(y) * (1 if (x >= 0) == (y > 0) else -1)
            return Lit(q if name == "/" else x - y * q, span=t.span)
        cmp = {"igt": x > y, "ilt": x < y, "ige": x >= y, "ile": x <= y}
        if name in cmp:
            return Lit(cmp[name], span=t.span)
        raise _Stuck(f"undefined constant application '{name}'", t.span)

    def alloc_value(self, base: int, n: int, span):
        none_sig, some_sig = self.sigs["ArrayNone"], self.sigs["ArraySome"]
        proof = PConT("ArrayNone", _sargs(none_sig, (UNIT_T, SInt(0), SAddr(base + n))), ())
        for i in reversed(range(n)):
            idx = (UNIT_T, SInt(n - i), SAddr(base + i))
            proof = PConT("ArraySome", _sargs(some_sig, idx), (PLocT(base + i), proof))
        sig = builtin_signature("alloc")
        typ = subst_static(sig.body.body.cod, {"i": SInt(n)})
        return ExPack((SAddr(base),), VTup(proof, LocV(base, span=span), span=span), typ, span=span)


def _sargs(sig, indices):
    env = solve_binders(sig, indices)
    if env is None:
        raise _Stuck(f"cannot build a proof of {sig.dataview}")
    return tuple(env[n] for n, _ in sig.binders)


def _locs(p) -> set:
    if isinstance(p, PLocT):
        return {p.loc}
    out = set()
    for attr in ("items", "args"):
        for q in getattr(p, attr, ()) or ():
            out |= _locs(q)
    if isinstance(p, (PBoxT, PBorrowT)):
        out |= _locs(p.proof)
    return out


def _boxed(p, inside: bool = False) -> set:
    if isinstance(p, PLocT):
        return {p.loc} if inside else set()
    if isinstance(p, (PBoxT, PBorrowT)):
        return _boxed(p.proof, inside or isinstance(p, PBoxT))
    out = set()
    for q in getattr(p, "items", None) or getattr(p, "args", None) or ():
        out |= _boxed(q, inside)
    return out


def _strip(v):
    while isinstance(v, (VTup, ExPack)):
        v = v.dyn if isinstance(v, VTup) else v.body
    return v


def _scalar(v):
    if isinstance(v, Lit):
        return v.value
    if isinstance(v, LocV):
        return ("loc", v.loc)
    if isinstance(v, Unit):
        return ()
    raise _Stuck("comparison of non-scalar values", getattr(v, "span", None))


def _int_of(v, span) -> int:
    if isinstance(v, Lit) and not isinstance(v.value, bool):
        return v.value
    raise _Stuck("expected an integer", span)


# ---------------------------------------------------------------------------
# store typing and the subject-reduction oracle


def value_type(v) -> Static:
    """The most precise type of a closed stored value."""
    if isinstance(v, Lit):
        if isinstance(v.value, bool):
            return SCon("bool", (SBool(v.value),))
        return SCon("int", (SInt(v.value),))
    if isinstance(v, Unit):
        return UNIT_T
    if isinstance(v, LocV):
        return SCon("ptr", (SAddr(v.loc),))
    if isinstance(v, Tup):
        return TTuple(tuple(value_type(i) for i in v.items))
    raise TypeError(f"cannot type stored value {type(v).__name__}")


def _checker(checked):
    c = Checker(checked.env, checked.sigs, checked.dataview_ctors, checked.prfuns, checked.funs)
    c.trace = None
    return c


def store_typing_check(checked, store: Store, mu: dict) -> bool:
    """``ST : mu`` -- equal domains and every stored value checks at mu(l)."""
    cells = store.cells if isinstance(store, Store) else store
    if set(cells) != set(mu):
        return False
    for loc, v in cells.items():
        c = _checker(checked)
        try:
            c.check_dyn(Ctx.empty(), v, mu[loc])
            c.settle(None)
        except ViewcheckError:
            return False
    return True


@dataclass
class OracleReport:
    ok: bool
    message: str = ""
    prop1_checks: int = 0
    prop1_violations: int = 0


def subject_reduction(checked, store: Store, term, boxed: set) -> OracleReport:
    """Re-check the running term against the type of main under the current
    store, and require its LocResource to cover the store exactly."""
    c = _checker(checked)
    rep = _subject_reduction(checked, c, store, term, boxed)
    rep.prop1_checks, rep.prop1_violations = c.prop1_checks, len(c.prop1_violations)
    return rep


def _subject_reduction(checked, c, store: Store, term, boxed: set) -> OracleReport:
    mu = {l: value_type(v) for l, v in store.cells.items()}
    c.loc_types = dict(mu)
    try:
        c.check_dyn(Ctx.empty(), term, checked.main_type)
        c.settle(None)
    except ViewcheckError as e:
        return OracleReport(False, f"subject reduction: [{e.rule}] {e.message}")
    if not store_typing_check(checked, store, mu):
        return OracleReport(False, "store typing failed")
    linear = set(c.linear_locs)
    boxed |= c.boxed_locs
    boxed = boxed & set(store.cells)
    if len(linear) != len(c.linear_locs):
        return OracleReport(False, "a location proof is duplicated")
    if linear & boxed:
        return OracleReport(False, f"locations both linear and boxed: {sorted(linear & boxed)}")
    if linear | boxed != set(store.cells):
        missing = sorted(set(store.cells) - linear - boxed)
        extra = sorted((linear | boxed) - set(store.cells))
        return OracleReport(False, f"LocResource mismatch: leaked {missing}, dangling {extra}")
    return OracleReport(True)


# ---------------------------------------------------------------------------
# running


@dataclass
class RunResult:
    outcome: Result
    store: Store
    steps: int
    trace: list = field(default_factory=list)
    oracle_checks: int = 0
    oracle_failures: list = field(default_factory=list)
    prop1_checks: int = 0
    prop1_violations: int = 0


def run(checked, instrumented: bool = False, fuel: int = 10 ** 6, check_every: int = 0,
        trace: Optional[list] = None, term=None) -> RunResult:
    """Evaluate ``main`` (or ``term``) to a value, Stuck, or fuel exhaustion."""
    m = Machine(checked, instrumented)
    if term is None:
        term = checked.main if instrumented else erase(checked.main)
    store = Store()
    res = RunResult(None, store, 0)
    k = 0
    while True:
        if instrumented and check_every and k % check_every == 0:
            rep = subject_reduction(checked, store, term, m.boxed)
            res.oracle_checks += 1
            res.prop1_checks += rep.prop1_checks
            res.prop1_violations += rep.prop1_violations
            if not rep.ok:
                res.oracle_failures.append((k, rep.message))
            if trace is not None:
                trace.append(f"oracle @ step {k}: {'ok' if rep.ok else rep.message}")
        if m.value(term):
            res.outcome = Value(term, k)
            break
        if k >= fuel:
            res.outcome = FuelExhausted(term, k)
            break
        out = m.step(store, term)
        if isinstance(out, Stuck):
            out.steps = k
            res.outcome = out
            break
        k += 1
        if trace is not None:
            line = f"step {k}: {out.rule} @ {_span_text(out.span)}"
            trace.append(f"{line}  {out.note}" if out.note else line)
        term = out.term
    res.steps = k
    if trace is not None:
        res.trace = trace
    return res


def _range(base: int, n: int) -> str:
    return f"l_{base}" if n == 1 else f"l_{base}..l_{base + n - 1}"


def _show(v) -> str:
    from .erasure import erased_text
    return erased_text(v)


def _span_text(span) -> str:
    if span is None:
        return "?"
    return f"{span.line}:{span.col}"


# ---------------------------------------------------------------------------
# store entailment: ST |= V


def entails_view(checked, store, view, bind: Optional[dict] = None) -> bool:
    """Does the store satisfy the closed view exactly (every cell used once)?

    ``view`` is an elaborated static, or surface text elaborated in the
    program's environment with ``bind`` supplying closed statics for its free
    names.  Dataview constructors are unfolded by resource consumption;
    unfolding that consumes no cell is bounded by the store size."""
    cells = store.cells if isinstance(store, Store) else dict(store)
    if isinstance(view, str):
        from .parser import parse_static
        bind = bind or {}
        sigma = {n: (Sort.ADDR if isinstance(v, SAddr) else Sort.INT) for n, v in bind.items()}
        view, _ = elab_static(checked.env, sigma, parse_static(view), Sort.VIEW)
        view = subst_static(view, bind)
    return _ViewSearch(checked, cells).entails(view)


class _ViewSearch:
    def __init__(self, checked, cells: dict):
        self.checked = checked
        self.cells = cells
        self.bound = 2 * len(cells) + 2
        self.memo: dict = {}

    def entails(self, view) -> bool:
        return frozenset() in self.consume(view, frozenset(self.cells), 0)

    def consume(self, v, avail: frozenset, depth: int) -> frozenset:
        """All possible sets of cells left over after ``v`` consumes some of ``avail``."""
        key = (v, avail)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = frozenset()  # cycles consume nothing new
        out = frozenset(self._consume(v, avail, depth))
        self.memo[key] = out
        return out

    def _consume(self, v, avail, depth):
        if isinstance(v, VOne):
            return {avail}
        if isinstance(v, VTensor):
            rests = {avail}
            for item in v.items:
                rests = {r2 for r in rests for r2 in self.consume(item, r, depth)}
            return rests
        if isinstance(v, VBox):
            return {avail}
        if isinstance(v, VAt):
            loc = _closed_int(v.addr)
            if loc is None or loc not in avail or not self.has_type(self.cells[loc], v.typ):
                return set()
            return {avail - {loc}}
        if isinstance(v, SCon) and v.name in self.checked.dataview_ctors:
            if depth > self.bound:
                return set()
            out = set()
            for name in self.checked.dataview_ctors[v.name]:
                for args in self.unfold(self.checked.sigs[name], v):
                    out |= self.consume(tensor(args), avail, depth + 1)
            return out
        if isinstance(v, SCon) and v.name in self.checked.env.abbrevs:
            from .views import expand_viewdef
            return self.consume(expand_viewdef(self.checked.env, v.name, v.args), avail, depth)
        return set()

    def unfold(self, sig, v: SCon):
        """Argument views of every instance of ``sig`` whose head is ``v``."""
        known = solve_binders(sig, v.args, partial=True)
        missing = [(n, s) for n, s in sig.binders if n not in known]
        for n, s in missing:
            if s in (Sort.TYPE, Sort.VIEWTYPE, Sort.VIEW):
                return
        locs = sorted(self.cells) + [0]
        choices = [locs if s == Sort.ADDR else range(-1, len(self.cells) + 2) for _, s in missing]
        for combo in _product(choices):
            m = dict(known)
            for (n, s), val in zip(missing, combo):
                m[n] = SAddr(val) if s == Sort.ADDR else SInt(val)
            head = subst_static(sig.head, m)
            if any(not _same_index(a, b) for a, b in zip(head.args, v.args)):
                continue
            try:
                if not all(eval_prop(subst_static(g, m)) for g in sig.guards):
                    continue
            except Exception:
                continue
            yield tuple(subst_static(a, m) for a in sig.args)

    def has_type(self, value, typ) -> bool:
        c = _checker(self.checked)
        try:
            c.check_dyn(Ctx.empty(), value, typ)
            c.settle(None)
        except ViewcheckError:
            return False
        return True


def _product(choices):
    from itertools import product
    return product(*choices)


def _closed_int(s) -> Optional[int]:
    try:
        lf = normalize(s)
    except Exception:
        return None
    return lf.const if lf.is_const() else None


def _same_index(a, b) -> bool:
    if a == b:
        return True
    x, y = _closed_int(a), _closed_int(b)
    return x is not None and x == y
