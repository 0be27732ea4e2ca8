"""Pretty-printer producing re-parseable surface syntax."""

from __future__ import annotations

from .syntax import (
    ConClause, DAbbrev, DDataview, DFun, DPrval, DVal, EBinOp, EBool, ECall, EIf, EInt,
    ELet, ESif, ETuple, EVar, PCon, Program, PTuple, PVar, PWild, Quant, SAddr, SAssert,
    SBool, SCon, SExists, SForall, SGuard, SInt, SList, SMeta, SOp, STuple, SVar, TArrow,
    TTuple, VAt, VBox, VLolli, VOne, VTAnd, VTensor, VTImp,
)

_PREC = {"||": 1, "&&": 2, "<=": 3, ">=": 3, "<": 3, ">": 3, "==": 3, "!=": 3,
         "@": 4, "+": 5, "-": 5, "*": 6, "/": 6}
_SHOW_OP = {"!=": "<>"}


def pp_static(s, prec: int = 0) -> str:
    if isinstance(s, SVar):
        return s.name
    if isinstance(s, SMeta):
        return "?" + s.name
    if isinstance(s, SInt):
        return str(s.value) if s.value >= 0 else f"({s.value})" if prec > 0 else str(s.value)
    if isinstance(s, SBool):
        return "true" if s.value else "false"
    if isinstance(s, SAddr):
        return "null" if s.index == 0 else f"l{s.index}"
    if isinstance(s, SCon):
        if not s.args:
            return s.name
        if len(s.args) == 1 and s.name in ("int", "bool", "ptr"):
            return f"{s.name}({pp_static(s.args[0])})"
        return f"{s.name}({', '.join(pp_static(a) for a in s.args)})"
    if isinstance(s, SOp):
        if s.op == "not":
            return f"~{pp_static(s.args[0], 9)}"
        if s.op == "neg":
            return f"-{pp_static(s.args[0], 9)}"
        if s.op == "=>":
            return _paren(f"{pp_static(s.args[0], 1)} => {pp_static(s.args[1], 0)}", prec > 0)
        p = _PREC[s.op]
        text = f"{pp_static(s.args[0], p)} {_SHOW_OP.get(s.op, s.op)} {pp_static(s.args[1], p + 1)}"
        return _paren(text, prec > p)
    if isinstance(s, TTuple):
        return _paren(" * ".join(pp_static(i, 7) for i in s.items), prec > 6)
    if isinstance(s, TArrow):
        arrow = "->0" if s.once else "->"
        return _paren(f"{pp_static(s.dom, 1)} {arrow} {pp_static(s.cod)}", prec > 0)
    if isinstance(s, VAt):
        return _paren(f"{pp_static(s.typ, 5)} @ {pp_static(s.addr, 5)}", prec > 4)
    if isinstance(s, VOne):
        return "'()"
    if isinstance(s, VTensor):
        return "'(" + ", ".join(pp_static(i) for i in s.items) + ")"
    if isinstance(s, VTAnd):
        views = s.view.items if isinstance(s.view, VTensor) else (s.view,)
        vals = s.vt.items if isinstance(s.vt, TTuple) else (s.vt,)
        return "'(" + ", ".join(pp_static(v) for v in views) + " | " + \
            ", ".join(pp_static(v) for v in vals) + ")"
    if isinstance(s, VLolli):
        return _paren(f"{pp_static(s.dom, 1)} -o {pp_static(s.cod)}", prec > 0)
    if isinstance(s, VTImp):
        arrow = "-o0" if s.once else "=>"
        return _paren(f"{pp_static(s.view, 1)} {arrow} {pp_static(s.vt)}", prec > 0)
    if isinstance(s, (SForall, SGuard)):
        return _paren(_pp_quant(s, True), prec > 0)
    if isinstance(s, (SExists, SAssert)):
        return _paren(_pp_quant(s, False), prec > 0)
    if isinstance(s, VBox):
        return f"!{pp_static(s.view, 9)}"
    if isinstance(s, STuple):
        left = ", ".join(pp_static(i) for i in s.left)
        if s.bar:
            return "'(" + left + " | " + ", ".join(pp_static(i) for i in s.right) + ")"
        return "'(" + left + ")"
    if isinstance(s, SList):
        return "(" + ", ".join(pp_static(i) for i in s.items) + ")"
    raise TypeError(f"cannot print {s!r}")


def _paren(text: str, yes: bool) -> str:
    return f"({text})" if yes else text


def _pp_quant(s, forall: bool) -> str:
    binder_cls, guard_cls = (SForall, SGuard) if forall else (SExists, SAssert)
    open_, close = ("{", "}") if forall else ("[", "]")
    binders, guards = [], []
    while isinstance(s, binder_cls) and not guards:
        binders.append(f"{s.var}:{s.sort}")
        s = s.body
    while isinstance(s, guard_cls):
        guards.append(pp_static(s.prop))
        s = s.body
    inner = ", ".join(binders)
    if guards:
        inner = (inner + " | " if binders else "") + ", ".join(guards)
    return f"{open_}{inner}{close} {pp_static(s)}"


def pp_quant(q: Quant) -> str:
    inner = ", ".join(f"{n}:{s}" for n, s in q.binders)
    if q.guards:
        inner = (inner + " | " if q.binders else "") + ", ".join(pp_static(g) for g in q.guards)
    return "{" + inner + "}"


# ---------------------------------------------------------------------------


def pp_pat(p) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PCon):
        return f"{p.name} (" + ", ".join(pp_pat(a) for a in p.args) + ")"
    if isinstance(p, PTuple):
        left = ", ".join(pp_pat(a) for a in p.left)
        if p.bar:
            return "'(" + left + " | " + ", ".join(pp_pat(a) for a in p.right) + ")"
        return "'(" + left + ")"
    raise TypeError(f"cannot print pattern {p!r}")


def pp_expr(e, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, EInt):
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if isinstance(e, EBool):
        return "true" if e.value else "false"
    if isinstance(e, ETuple):
        left = ", ".join(pp_expr(a, indent) for a in e.left)
        if e.bar:
            return "'(" + left + " | " + ", ".join(pp_expr(a, indent) for a in e.right) + ")"
        return "'(" + left + ")"
    if isinstance(e, ECall):
        head = pp_expr(e.fn, indent)
        if e.sargs is not None:
            head += " {" + ", ".join(pp_static(s) for s in e.sargs) + "}"
        if not e.groups:
            return head
        if len(e.groups) == 1 and len(e.groups[0]) == 1 and e.sargs is None:
            arg = e.groups[0][0]
            if isinstance(arg, EVar) or (isinstance(arg, (EInt, EBool))
                                         and not (isinstance(arg, EInt) and arg.value < 0)):
                return f"{head} {pp_expr(arg, indent)}"
        args = " | ".join(", ".join(pp_expr(a, indent) for a in g) for g in e.groups)
        return f"{head} ({args})"
    if isinstance(e, EBinOp):
        return f"{_atomish(e.left, indent)} {e.op} {_atomish(e.right, indent)}"
    if isinstance(e, EIf):
        return (f"if {pp_expr(e.cond, indent)} then\n{pad}  {pp_expr(e.then, indent + 1)}\n"
                f"{pad}else\n{pad}  {pp_expr(e.els, indent + 1)}")
    if isinstance(e, ESif):
        return (f"sif {pp_static(e.prop)} then\n{pad}  {pp_expr(e.then, indent + 1)}\n"
                f"{pad}else\n{pad}  {pp_expr(e.els, indent + 1)}")
    if isinstance(e, ELet):
        decls = "\n".join(f"{pad}  {pp_decl(d, indent + 1)}" for d in e.decls)
        return f"let\n{decls}\n{pad}in\n{pad}  {pp_expr(e.body, indent + 1)}\n{pad}end"
    raise TypeError(f"cannot print expression {e!r}")


def _atomish(e, indent) -> str:
    text = pp_expr(e, indent)
    if isinstance(e, (EBinOp, EIf, ESif, ELet)):
        return f"({text})"
    return text


def pp_decl(d, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(d, DVal):
        return f"val {pp_pat(d.pat)} = {pp_expr(d.expr, indent)}"
    if isinstance(d, DPrval):
        return f"prval {pp_pat(d.pat)} = {pp_expr(d.expr, indent)}"
    if isinstance(d, DFun):
        head = f"{d.kind} {d.name}"
        for q in d.quants:
            head += " " + pp_quant(q)
        if d.metric is not None:
            head += " .<" + ", ".join(pp_static(m) for m in d.metric) + ">."
        groups = []
        for g in d.groups:
            groups.append(", ".join(p.name if p.typ is None else f"{p.name}: {pp_static(p.typ)}"
                                    for p in g))
        head += " (" + " | ".join(groups) + ")"
        if d.result is not None:
            head += " : " + pp_static(d.result)
        return f"{head} =\n{pad}  {pp_expr(d.body, indent + 1)}"
    if isinstance(d, DDataview):
        lines = [f"dataview {d.name} (" + ", ".join(str(s) for s in d.sorts) + ") ="]
        for c in d.clauses:
            lines.append(f"{pad}  | {pp_clause(c)}")
        return "\n".join(lines)
    if isinstance(d, DAbbrev):
        params = ""
        if d.params:
            params = " (" + ", ".join(f"{n}:{s}" for n, s in d.params) + ")"
        return f"{d.kind} {d.name}{params} = {pp_static(d.body)}"
    raise TypeError(f"cannot print declaration {d!r}")


def pp_clause(c: ConClause) -> str:
    text = (pp_quant(c.quant) + " ") if c.quant is not None else ""
    text += f"{c.name} (" + ", ".join(pp_static(i) for i in c.indices) + ")"
    if c.args is not None:
        text += " of (" + ", ".join(pp_static(a) for a in c.args) + ")"
    return text


def pretty_print(node) -> str:
    """Render any surface node; programs print one declaration per paragraph."""
    if isinstance(node, Program):
        return "\n\n".join(pp_decl(d) for d in node.decls) + ("\n" if node.decls else "")
    if isinstance(node, (DVal, DPrval, DFun, DDataview, DAbbrev)):
        return pp_decl(node)
    if isinstance(node, (PVar, PWild, PCon, PTuple)):
        return pp_pat(node)
    if isinstance(node, Quant):
        return pp_quant(node)
    if isinstance(node, ConClause):
        return pp_clause(node)
    if isinstance(node, (EVar, EInt, EBool, ETuple, ECall, EBinOp, EIf, ESif, ELet)):
        return pp_expr(node)
    return pp_static(node)
