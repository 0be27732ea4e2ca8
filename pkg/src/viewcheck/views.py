"""Dataview declarations and view/type abbreviations."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import SortError
from .statics import Abbrev, StaticEnv, children, elab_static, subst_static
from .syntax import (
    DAbbrev, DDataview, SCon, SForall, SGuard, Sort, Static, VLolli, tensor,
)


@dataclass(frozen=True)
class ProofConSig:
    """C : forall binders. guards => (args -o head)."""

    name: str
    dataview: str
    binders: tuple[tuple[str, Sort], ...]
    guards: tuple[Static, ...]
    args: tuple[Static, ...]
    head: SCon

    def view(self) -> Static:
        body: Static = VLolli(tensor(self.args), self.head)
        for g in reversed(self.guards):
            body = SGuard(g, body)
        for name, sort in reversed(self.binders):
            body = SForall(name, sort, body)
        return body


def _mentions(s: Static, name: str) -> bool:
    if isinstance(s, SCon) and s.name == name:
        return True
    return any(_mentions(k, name) for k in children(s))


def _check_positive(s: Static, name: str, span) -> None:
    if isinstance(s, VLolli):
        if _mentions(s.dom, name):
            raise SortError("positivity", f"dataview '{name}' occurs to the left of -o", span)
        _check_positive(s.cod, name, span)
        return
    for k in children(s):
        _check_positive(k, name, span)


def elaborate_dataview(env: StaticEnv, decl: DDataview) -> list[ProofConSig]:
    """Register the dataview head in ``env`` and return its constructor signatures."""
    if decl.name in env.dataviews or decl.name in env.abbrevs:
        raise SortError("redeclared", f"'{decl.name}' is already declared", decl.span)
    env.dataviews[decl.name] = decl.sorts
    sigs = []
    seen = set()
    for clause in decl.clauses:
        if clause.name in seen:
            raise SortError("redeclared", f"constructor '{clause.name}' declared twice", clause.span)
        seen.add(clause.name)
        binders = clause.quant.binders if clause.quant else ()
        sigma = {}
        for n, s in binders:
            if n in sigma:
                raise SortError("sort", f"static variable '{n}' bound twice", clause.quant.span)
            sigma[n] = s
        guards = tuple(elab_static(env, sigma, g, Sort.BOOL)[0]
                       for g in (clause.quant.guards if clause.quant else ()))
        if len(clause.indices) != len(decl.sorts):
            raise SortError("sort", f"constructor '{clause.name}' must give {len(decl.sorts)} "
                            f"indices to '{decl.name}'", clause.span)
        indices = tuple(elab_static(env, sigma, i, so)[0] for i, so in zip(clause.indices, decl.sorts))
        args = tuple(elab_static(env, sigma, a, Sort.VIEW)[0] for a in (clause.args or ()))
        for a in args:
            _check_positive(a, decl.name, clause.span)
        sigs.append(ProofConSig(clause.name, decl.name, tuple(binders), guards, args,
                                SCon(decl.name, indices)))
    return sigs


def declare_abbrev(env: StaticEnv, decl: DAbbrev) -> Abbrev:
    if decl.name in env.dataviews or decl.name in env.abbrevs:
        raise SortError("redeclared", f"'{decl.name}' is already declared", decl.span)
    if _mentions(decl.body, decl.name):
        raise SortError("cyclic-abbrev",
                        f"abbreviation '{decl.name}' refers to itself; only dataviews may recurse",
                        decl.span)
    sigma = dict(decl.params)
    expect = Sort.VIEW if decl.kind == "viewdef" else Sort.VIEWTYPE
    body, sort = elab_static(env, sigma, decl.body, expect)
    ab = Abbrev(decl.kind, decl.name, decl.params, body, sort)
    env.abbrevs[decl.name] = ab
    return ab


def expand_viewdef(env: StaticEnv, name: str, args: tuple[Static, ...]) -> Static:
    """Substitute ``args`` into the body of the abbreviation ``name``."""
    ab = env.abbrevs.get(name)
    if ab is None:
        raise SortError("sort", f"unknown abbreviation '{name}'")
    if len(args) != len(ab.params):
        raise SortError("sort", f"'{name}' expects {len(ab.params)} arguments, got {len(args)}")
    return subst_static(ab.body, {p: a for (p, _), a in zip(ab.params, args)})
