"""Linear normal forms for integer/address statics and the entailment front-end."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterable, Optional

from . import omega
from .syntax import (
    CMP_OPS, FALSE, TRUE, SAddr, SBool, SInt, SMeta, SOp, Sort, Static, SVar,
)


@dataclass(frozen=True)
class LinForm:
    """``const + sum(coeff * atom)``; atoms are variables or opaque nonlinear terms."""

    const: int = 0
    terms: tuple = field(default=())  # ((atom, coeff), ...) sorted by repr(atom)

    @staticmethod
    def make(const: int, terms: dict) -> "LinForm":
        items = tuple(sorted(((a, c) for a, c in terms.items() if c), key=lambda ac: repr(ac[0])))
        return LinForm(const, items)

    @property
    def coeffs(self) -> dict:
        return dict(self.terms)

    def is_const(self) -> bool:
        return not self.terms

    def __add__(self, other: "LinForm") -> "LinForm":
        d = self.coeffs
        for a, c in other.terms:
            d[a] = d.get(a, 0) + c
        return LinForm.make(self.const + other.const, d)

    def scale(self, k: int) -> "LinForm":
        return LinForm.make(self.const * k, {a: c * k for a, c in self.terms})

    def __sub__(self, other: "LinForm") -> "LinForm":
        return self + other.scale(-1)

    def to_static(self) -> Static:
        out: Optional[Static] = None
        for atom, c in self.terms:
            if c == 1:
                term = atom
            elif c == -1:
                term = SOp("neg", (atom,))
            else:
                term = SOp("*", (SInt(c), atom))
            out = term if out is None else SOp("+", (out, term))
        if out is None:
            return SInt(self.const)
        if self.const > 0:
            return SOp("+", (out, SInt(self.const)))
        if self.const < 0:
            return SOp("-", (out, SInt(-self.const)))
        return out

    def __str__(self) -> str:
        from .printer import pp_static
        return pp_static(self.to_static())


def normalize(s: Static) -> LinForm:
    """Linear normal form of an int- or addr-sorted static term."""
    return _normalize(s)


@lru_cache(maxsize=65536)
def _normalize(s: Static) -> LinForm:
    if isinstance(s, SInt):
        return LinForm(s.value)
    if isinstance(s, SAddr):
        return LinForm(s.index)
    if isinstance(s, (SVar, SMeta)):
        return LinForm(0, ((s, 1),))
    if isinstance(s, SOp):
        if s.op == "+":
            return _normalize(s.args[0]) + _normalize(s.args[1])
        if s.op == "-":
            return _normalize(s.args[0]) - _normalize(s.args[1])
        if s.op == "neg":
            return _normalize(s.args[0]).scale(-1)
        if s.op == "*":
            a, b = _normalize(s.args[0]), _normalize(s.args[1])
            if a.is_const():
                return b.scale(a.const)
            if b.is_const():
                return a.scale(b.const)
            return _opaque(SOp("*", tuple(sorted((a.to_static(), b.to_static()), key=repr))))
        if s.op == "/":
            a, b = _normalize(s.args[0]), _normalize(s.args[1])
            if a.is_const() and b.is_const() and b.const != 0:
                return LinForm(_trunc_div(a.const, b.const))
            return _opaque(SOp("/", (a.to_static(), b.to_static())))
    # anything else of integer sort is treated as an unknown integer
    return _opaque(s)


def _opaque(s: Static) -> LinForm:
    return LinForm(0, ((s, 1),))


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


# ---------------------------------------------------------------------------
# propositions -> DNF of linear constraints

_NEG_CMP = {"<=": ">", ">": "<=", ">=": "<", "<": ">=", "==": "!=", "!=": "=="}


def _is_bool_term(s: Static, bool_vars: frozenset) -> bool:
    if isinstance(s, SBool):
        return True
    if isinstance(s, SVar):
        return s.name in bool_vars
    if isinstance(s, SOp):
        return s.op in CMP_OPS or s.op in ("not", "&&", "||", "=>")
    return False


def _nnf(p: Static, positive: bool, bool_vars: frozenset):
    """Returns a formula tree: ('and', [..]) | ('or', [..]) | ('atom', op, lhs, rhs)."""
    if isinstance(p, SBool):
        return ("const", p.value == positive)
    if isinstance(p, SOp):
        op = p.op
        if op == "not":
            return _nnf(p.args[0], not positive, bool_vars)
        if op in ("&&", "||"):
            kind = "and" if (op == "&&") == positive else "or"
            return (kind, [_nnf(a, positive, bool_vars) for a in p.args])
        if op == "=>":
            a, b = p.args
            return _nnf(SOp("||", (SOp("not", (a,)), b)), positive, bool_vars)
        if op in CMP_OPS:
            a, b = p.args
            if op in ("==", "!=") and (_is_bool_term(a, bool_vars) or _is_bool_term(b, bool_vars)):
                same = SOp("||", (SOp("&&", (a, b)), SOp("&&", (SOp("not", (a,)), SOp("not", (b,))))))
                return _nnf(same, positive == (op == "=="), bool_vars)
            return ("atom", op if positive else _NEG_CMP[op], a, b)
    # a boolean variable (or other opaque boolean) is encoded as an integer in [0, 1]
    return ("atom", ">=" if positive else "<=", p, SInt(1 if positive else 0))


def _atom_constraints(op: str, a: Static, b: Static):
    """List of disjuncts; each disjunct is (eqs, geqs)."""
    d = normalize(a) - normalize(b)  # a - b
    if op == "==":
        return [([d], [])]
    if op == ">=":
        return [([], [d])]
    if op == ">":
        return [([], [d - LinForm(1)])]
    if op == "<=":
        return [([], [d.scale(-1)])]
    if op == "<":
        return [([], [d.scale(-1) - LinForm(1)])]
    if op == "!=":
        return [([], [d - LinForm(1)]), ([], [d.scale(-1) - LinForm(1)])]
    raise ValueError(op)


def _dnf(f) -> list:
    kind = f[0]
    if kind == "const":
        return [([], [])] if f[1] else []
    if kind == "atom":
        return _atom_constraints(f[1], f[2], f[3])
    if kind == "or":
        out = []
        for g in f[1]:
            out.extend(_dnf(g))
        return out
    # and
    out = [([], [])]
    for g in f[1]:
        parts = _dnf(g)
        out = [(e1 + e2, g1 + g2) for (e1, g1), (e2, g2) in cartesian(out, parts)]
        if not out:
            break
    return out


def _to_omega(forms: Iterable[LinForm]):
    return [(dict(f.terms), f.const) for f in forms]


def _atoms_of(forms) -> set:
    out = set()
    for f in forms:
        for a, _ in f.terms:
            out.add(a)
    return out


def _sat_conj(eqs: list, geqs: list, addr_vars: frozenset, bool_vars: frozenset) -> bool:
    extra = []
    for atom in _atoms_of(eqs) | _atoms_of(geqs):
        if isinstance(atom, SVar):
            if atom.name in addr_vars:
                extra.append(LinForm(0, ((atom, 1),)))
            elif atom.name in bool_vars:
                extra.append(LinForm(0, ((atom, 1),)))
                extra.append(LinForm(1, ((atom, -1),)))
    return omega.satisfiable(_to_omega(eqs), _to_omega(list(geqs) + extra))


@lru_cache(maxsize=65536)
def _satisfiable(props: tuple, addr_vars: frozenset, bool_vars: frozenset) -> bool:
    f = ("and", [_nnf(p, True, bool_vars) for p in props])
    for eqs, geqs in _dnf(f):
        if _sat_conj(eqs, geqs, addr_vars, bool_vars):
            return True
    return False


def _var_sorts(sigma) -> tuple[frozenset, frozenset]:
    if not sigma:
        return frozenset(), frozenset()
    addr = frozenset(n for n, s in sigma.items() if s == Sort.ADDR)
    boolean = frozenset(n for n, s in sigma.items() if s == Sort.BOOL)
    return addr, boolean


def satisfiable(sigma, hyps: Iterable[Static]) -> bool:
    """Do the hypotheses have an integer model?  ``sigma`` maps variable names to sorts."""
    addr, boolean = _var_sorts(sigma)
    props = tuple(h for h in hyps if h != TRUE)
    if any(h == FALSE for h in props):
        return False
    return _satisfiable(props, addr, boolean)


def entails(sigma, hyps: Iterable[Static], goal: Static) -> bool:
    """Does every integer model of ``hyps`` satisfy ``goal``?"""
    if goal == TRUE:
        return True
    ground = _ground_value(goal)
    if ground is True:
        return True
    return not satisfiable(sigma, tuple(hyps) + (SOp("not", (goal,)),))


def _ground_value(p: Static) -> Optional[bool]:
    """Fast path: decide a proposition with no variables."""
    try:
        return eval_prop(p)
    except _NotGround:
        return None


class _NotGround(Exception):
    pass


def eval_prop(p: Static) -> bool:
    """Evaluate a closed proposition; raises if it mentions variables."""
    if isinstance(p, SBool):
        return p.value
    if isinstance(p, SOp):
        op = p.op
        if op == "not":
            return not eval_prop(p.args[0])
        if op == "&&":
            return eval_prop(p.args[0]) and eval_prop(p.args[1])
        if op == "||":
            return eval_prop(p.args[0]) or eval_prop(p.args[1])
        if op == "=>":
            return (not eval_prop(p.args[0])) or eval_prop(p.args[1])
        if op in CMP_OPS:
            a, b = p.args
            if op in ("==", "!=") and (_is_bool_term(a, frozenset()) or _is_bool_term(b, frozenset())):
                same = eval_prop(a) == eval_prop(b)
                return same if op == "==" else not same
            x, y = eval_int(a), eval_int(b)
            return {"<=": x <= y, ">=": x >= y, "<": x < y, ">": x > y,
                    "==": x == y, "!=": x != y}[op]
    raise _NotGround()


def eval_int(s: Static) -> int:
    f = normalize(s)
    if not f.is_const():
        raise _NotGround()
    return f.const
