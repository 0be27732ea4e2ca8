"""Recursive-descent parser for the .vats surface syntax.

The notation follows the ATS-style listings: ``{a:type | B}`` for universal
prefixes and guards, ``[l:addr | B]`` for existential prefixes, ``'( .. | .. )``
for tuples, ``!V`` for boxed views, ``.<m>.`` for termination metrics.
"""

from __future__ import annotations

from typing import Optional

from .diagnostics import ParseError
from .lexer import Token, tokenize
from .syntax import (
    SORT_NAMES, ConClause, DAbbrev, DDataview, Decl, DFun, DPrval, DVal, EBinOp, EBool,
    ECall, EIf, EInt, ELet, ESif, ETuple, EVar, Expr, Param, Pat, PCon, Program, PTuple,
    PVar, PWild, Quant, SAddr, SBool, SCon, SExists, SForall, SGuard, SAssert, SInt,
    SList, SOp, Sort, Span, Static, STuple, TArrow, VAt, VBox, join,
)

# identifiers used as infix operators in dynamic expressions
INFIX_IDENTS = {"igt", "ilt", "ige", "ile", "ieq", "ineq", "imod"}

_CMP = {"==": "==", "<>": "!=", "!=": "!=", ">=": ">=", "<=": "<=", "<": "<", ">": ">"}
_DYN_CMP = {"=", "<>", "!=", ">=", "<=", "<", ">", "=="}


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.is_(text)

    def next(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.describe(self.tok)}", {text})
        return self.next()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.describe(self.tok)}", {"<ident>"})
        return self.next()

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def error(self, msg: str, expected=()):
        raise ParseError(msg, self.tok.span, frozenset(expected))

    def span_from(self, start: Span) -> Span:
        prev = self.toks[self.pos - 1].span
        return Span(start.line, start.col, prev.end_line, prev.end_col)

    # -- program ------------------------------------------------------------

    def program(self) -> list[Decl]:
        decls = []
        while self.tok.kind != "eof":
            if self.accept(";"):
                continue
            decls.append(self.decl(top=True))
        return decls

    def decl(self, top: bool = False) -> Decl:
        t = self.tok
        if t.is_("dataview"):
            return self.dataview()
        if t.is_("viewdef") or t.is_("typedef"):
            return self.abbrev()
        if t.is_("fun") or t.is_("prfun"):
            return self.fundecl()
        if t.is_("val") or t.is_("prval"):
            self.next()
            pat = self.pattern()
            self.expect("=")
            e = self.expr()
            cls = DVal if t.text == "val" else DPrval
            return cls(pat, e, span=self.span_from(t.span))
        self.error(f"expected a declaration, found {self.describe(t)}",
                   {"dataview", "viewdef", "typedef", "fun", "prfun", "val", "prval"})

    def dataview(self) -> DDataview:
        start = self.next().span
        name = self.ident().text
        self.expect("(")
        sorts = []
        if not self.at(")"):
            sorts.append(self.sort())
            while self.accept(","):
                sorts.append(self.sort())
        self.expect(")")
        self.expect("=")
        clauses = []
        self.accept("|")
        clauses.append(self.con_clause())
        while self.accept("|"):
            clauses.append(self.con_clause())
        return DDataview(name, tuple(sorts), tuple(clauses), span=self.span_from(start))

    def con_clause(self) -> ConClause:
        start = self.tok.span
        quant = self.quant_block() if self.at("{") else None
        name = self.ident().text
        self.expect("(")
        indices = self.static_list(")")
        self.expect(")")
        args = None
        if self.accept("of"):
            self.expect("(")
            args = self.static_list(")")
            self.expect(")")
        return ConClause(quant, name, tuple(indices), None if args is None else tuple(args),
                         span=self.span_from(start))

    def abbrev(self) -> DAbbrev:
        start = self.tok.span
        kind = self.next().text
        name = self.ident().text
        params = []
        if self.accept("("):
            if not self.at(")"):
                params.append(self.binder())
                while self.accept(","):
                    params.append(self.binder())
            self.expect(")")
        self.expect("=")
        body = self.static()
        return DAbbrev(kind, name, tuple(params), body, span=self.span_from(start))

    def sort(self) -> Sort:
        t = self.tok
        if t.kind in ("ident", "kw") and t.text in SORT_NAMES:
            self.next()
            return SORT_NAMES[t.text]
        self.error(f"expected a sort, found {self.describe(t)}", set(SORT_NAMES))

    def binder(self) -> tuple[str, Sort]:
        name = self.ident().text
        self.expect(":")
        return name, self.sort()

    def quant_block(self) -> Quant:
        start = self.expect("{").span
        binders, guards = self.quant_items("}")
        self.expect("}")
        return Quant(tuple(binders), tuple(guards), span=self.span_from(start))

    def quant_items(self, close: str):
        binders: list[tuple[str, Sort]] = []
        guards: list[Static] = []
        if self.at(close):
            return binders, guards
        if self.tok.kind == "ident" and self.peek().is_(":"):
            binders.append(self.binder())
            while self.accept(","):
                binders.append(self.binder())
            if self.accept("|"):
                guards = self.static_list(close)
        else:
            guards = self.static_list(close)
        return binders, guards

    def fundecl(self) -> DFun:
        start = self.tok.span
        kind = self.next().text
        name = self.ident().text
        quants = []
        metric = None
        while True:
            if self.at("{"):
                quants.append(self.quant_block())
            elif self.at(".<"):
                self.next()
                metric = tuple(self.static_list(">."))
                self.expect(">.")
            else:
                break
        self.expect("(")
        groups: list[list[Param]] = [[]]
        while not self.at(")"):
            if self.accept("|"):
                groups.append([])
                continue
            if self.accept(","):
                continue
            ptok = self.tok
            if self.accept("_"):
                pname = "_"
            else:
                pname = self.ident().text
            ptyp = None
            if self.accept(":"):
                ptyp = self.static()
            groups[-1].append(Param(pname, ptyp, span=self.span_from(ptok.span)))
        self.expect(")")
        if len(groups) > 3:
            self.error("at most three parameter groups are allowed")
        result = None
        if self.accept(":"):
            result = self.static()
        self.expect("=")
        body = self.expr()
        return DFun(kind, name, tuple(quants), metric, tuple(tuple(g) for g in groups),
                    result, body, span=self.span_from(start))

    # -- statics ------------------------------------------------------------

    def static_list(self, close: str) -> list[Static]:
        items: list[Static] = []
        if self.at(close):
            return items
        items.append(self.static())
        while self.accept(","):
            items.append(self.static())
        return items

    def static(self) -> Static:
        t = self.tok
        if t.is_("{"):
            q = self.quant_block()
            body = self.static()
            return quantify(q, body, forall=True)
        if t.is_("["):
            start = self.next().span
            binders, guards = self.quant_items("]")
            self.expect("]")
            body = self.static()
            return quantify(Quant(tuple(binders), tuple(guards), span=self.span_from(start)),
                            body, forall=False)
        return self.s_arrow()

    def s_arrow(self) -> Static:
        lhs = self.s_or()
        if self.at("->") or self.at("->0"):
            once = self.next().text == "->0"
            rhs = self.static()
            return TArrow(lhs, rhs, once, span=join(lhs.span, rhs.span))
        return lhs

    def s_or(self) -> Static:
        lhs = self.s_and()
        while self.at("||"):
            self.next()
            rhs = self.s_and()
            lhs = SOp("||", (lhs, rhs), span=join(lhs.span, rhs.span))
        return lhs

    def s_and(self) -> Static:
        lhs = self.s_cmp()
        while self.at("&&"):
            self.next()
            rhs = self.s_cmp()
            lhs = SOp("&&", (lhs, rhs), span=join(lhs.span, rhs.span))
        return lhs

    def s_cmp(self) -> Static:
        lhs = self.s_at()
        if self.tok.kind == "sym" and self.tok.text in _CMP:
            op = _CMP[self.next().text]
            rhs = self.s_at()
            return SOp(op, (lhs, rhs), span=join(lhs.span, rhs.span))
        return lhs

    def s_at(self) -> Static:
        lhs = self.s_add()
        if self.at("@"):
            self.next()
            rhs = self.s_add()
            return VAt(lhs, rhs, span=join(lhs.span, rhs.span))
        return lhs

    def s_add(self) -> Static:
        lhs = self.s_mul()
        while self.at("+") or self.at("-"):
            op = self.next().text
            rhs = self.s_mul()
            lhs = SOp(op, (lhs, rhs), span=join(lhs.span, rhs.span))
        return lhs

    def s_mul(self) -> Static:
        lhs = self.s_unary()
        while self.at("*") or self.at("/"):
            op = self.next().text
            rhs = self.s_unary()
            lhs = SOp(op, (lhs, rhs), span=join(lhs.span, rhs.span))
        return lhs

    def s_unary(self) -> Static:
        t = self.tok
        if t.is_("~"):
            self.next()
            b = self.s_unary()
            return SOp("not", (b,), span=join(t.span, b.span))
        if t.is_("-"):
            self.next()
            b = self.s_unary()
            if isinstance(b, SInt):
                return SInt(-b.value, span=join(t.span, b.span))
            return SOp("neg", (b,), span=join(t.span, b.span))
        if t.is_("!"):
            self.next()
            b = self.s_unary()
            return VBox(b, span=join(t.span, b.span))
        return self.s_app()

    def _s_atom_start(self) -> bool:
        t = self.tok
        return t.kind in ("ident", "int") or t.is_("(") or t.is_("'(")

    def s_app(self) -> Static:
        head = self.s_atom()
        if isinstance(head, SCon) and not head.args and self._s_atom_start():
            arg = self.s_atom()
            args = arg.items if isinstance(arg, SList) else (arg,)
            return SCon(head.name, tuple(args), span=join(head.span, arg.span))
        return head

    def s_atom(self) -> Static:
        t = self.tok
        if t.kind == "int":
            self.next()
            return SInt(int(t.text), span=t.span)
        if t.is_("true") or t.is_("false"):
            self.next()
            return SBool(t.text == "true", span=t.span)
        if t.kind == "ident":
            self.next()
            if t.text == "null":
                return SAddr(0, span=t.span)
            # bare identifiers are resolved to variables or constructors by sort checking
            return SCon(t.text, (), span=t.span)
        if t.is_("("):
            self.next()
            items = self.static_list(")")
            self.expect(")")
            sp = self.span_from(t.span)
            if len(items) == 1:
                return items[0]
            return SList(tuple(items), span=sp)
        if t.is_("'("):
            self.next()
            left: list[Static] = []
            right: list[Static] = []
            bar = False
            cur = left
            while not self.at(")"):
                if self.accept("|"):
                    if bar:
                        self.error("only one '|' allowed in a static tuple")
                    bar = True
                    cur = right
                    continue
                if self.accept(","):
                    continue
                cur.append(self.static())
            self.expect(")")
            return STuple(tuple(left), tuple(right), bar, span=self.span_from(t.span))
        self.error(f"expected a static term, found {self.describe(t)}",
                   {"<ident>", "<int>", "(", "'("})

    # -- patterns -----------------------------------------------------------

    def pattern(self) -> Pat:
        t = self.tok
        if self.accept("_"):
            return PWild(span=t.span)
        if t.is_("'("):
            self.next()
            left, right, bar = self._groups_of(self.pattern)
            return PTuple(left, right, bar, span=self.span_from(t.span))
        if t.kind == "ident":
            self.next()
            if self.at("("):
                self.next()
                args = []
                while not self.at(")"):
                    if self.accept(","):
                        continue
                    args.append(self.pattern())
                self.expect(")")
                return PCon(t.text, tuple(args), span=self.span_from(t.span))
            return PVar(t.text, span=t.span)
        self.error(f"expected a pattern, found {self.describe(t)}", {"<ident>", "_", "'("})

    def _groups_of(self, item):
        left: list = []
        right: list = []
        bar = False
        cur = left
        while not self.at(")"):
            if self.accept("|"):
                if bar:
                    self.error("only one '|' allowed in a tuple")
                bar = True
                cur = right
                continue
            if self.accept(","):
                continue
            cur.append(item())
        self.expect(")")
        return tuple(left), tuple(right), bar

    # -- expressions --------------------------------------------------------

    def expr(self) -> Expr:
        t = self.tok
        if t.is_("let"):
            self.next()
            decls = []
            while not self.at("in"):
                if self.accept(";"):
                    continue
                decls.append(self.decl())
            self.expect("in")
            body = self.expr()
            self.expect("end")
            return ELet(tuple(decls), body, span=self.span_from(t.span))
        if t.is_("if"):
            self.next()
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return EIf(c, a, b, span=self.span_from(t.span))
        if t.is_("sif"):
            self.next()
            p = self.static()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return ESif(p, a, b, span=self.span_from(t.span))
        return self.e_cmp()

    def _infix_op(self) -> Optional[str]:
        t = self.tok
        if t.kind == "sym" and t.text in _DYN_CMP:
            return t.text
        if t.kind == "ident" and t.text in INFIX_IDENTS:
            return t.text
        return None

    def e_cmp(self) -> Expr:
        lhs = self.e_add()
        op = self._infix_op()
        if op is not None:
            self.next()
            rhs = self.e_add()
            return EBinOp(op, lhs, rhs, span=join(lhs.span, rhs.span))
        return lhs

    def e_add(self) -> Expr:
        lhs = self.e_mul()
        while self.at("+") or self.at("-"):
            op = self.next().text
            rhs = self.e_mul()
            lhs = EBinOp(op, lhs, rhs, span=join(lhs.span, rhs.span))
        return lhs

    def e_mul(self) -> Expr:
        lhs = self.e_app()
        while self.at("*") or self.at("/"):
            op = self.next().text
            rhs = self.e_app()
            lhs = EBinOp(op, lhs, rhs, span=join(lhs.span, rhs.span))
        return lhs

    def _e_atom_start(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in INFIX_IDENTS
        return t.kind == "int" or t.is_("'(") or t.is_("true") or t.is_("false")

    def e_app(self) -> Expr:
        head = self.e_atom()
        if not isinstance(head, EVar):
            return head
        sargs = None
        if self.at("{"):
            self.next()
            sargs = tuple(self.static_list("}"))
            self.expect("}")
        if self.at("("):
            start = self.next()
            groups: list[list[Expr]] = [[]]
            while not self.at(")"):
                if self.accept("|"):
                    groups.append([])
                    continue
                if self.accept(","):
                    continue
                groups[-1].append(self.expr())
            self.expect(")")
            if len(groups) > 3:
                raise ParseError("at most three argument groups are allowed", start.span)
            return ECall(head, sargs, tuple(tuple(g) for g in groups),
                         span=self.span_from(head.span))
        if self._e_atom_start():
            arg = self.e_atom()
            return ECall(head, sargs, ((arg,),), span=join(head.span, arg.span))
        if sargs is not None:
            return ECall(head, sargs, (), span=self.span_from(head.span))
        return head

    def e_atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.next()
            return EInt(int(t.text), span=t.span)
        if t.is_("true") or t.is_("false"):
            self.next()
            return EBool(t.text == "true", span=t.span)
        if t.kind == "ident":
            self.next()
            return EVar(t.text, span=t.span)
        if t.is_("'("):
            self.next()
            left, right, bar = self._groups_of(self.expr)
            return ETuple(left, right, bar, span=self.span_from(t.span))
        if t.is_("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.is_("-") and self.peek().kind == "int":
            self.next()
            n = self.next()
            return EInt(-int(n.text), span=join(t.span, n.span))
        self.error(f"expected an expression, found {self.describe(t)}",
                   {"<ident>", "<int>", "'(", "(", "let", "if", "sif"})


def quantify(q: Quant, body: Static, forall: bool) -> Static:
    """{a:s | B} X elaborates to forall a. B => X (binders first, then guards
    left to right); [a:s | B] X to exists a. B /\\ X."""
    out = body
    for g in reversed(q.guards):
        out = SGuard(g, out, span=q.span) if forall else SAssert(g, out, span=q.span)
    for name, sort in reversed(q.binders):
        out = SForall(name, sort, out, span=q.span) if forall else SExists(name, sort, out, span=q.span)
    return out


def parse_program(text: str, file: str = "<input>") -> Program:
    p = Parser(text)
    return Program(p.program(), file)


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.describe(p.tok)} after expression")
    return e


def parse_static(text: str) -> Static:
    p = Parser(text)
    s = p.static()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.describe(p.tok)} after static term")
    return s
