"""Tokenizer for the .vats surface syntax."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import ParseError
from .syntax import Span

KEYWORDS = {
    "dataview", "viewdef", "typedef", "fun", "prfun", "val", "prval", "let",
    "in", "end", "if", "then", "else", "sif", "of", "true", "false",
}

# longest first
SYMBOLS = [
    ".<", ">.", "->0", "->", "==", "<>", "!=", ">=", "<=", "&&", "||",
    "'(", "@", "!", "~", "{", "}", "[", "]", "(", ")", ",", "|", ":", "=",
    "+", "-", "*", "/", "<", ">", ";", "_",
]


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "kw", "sym", "eof"
    text: str
    span: Span

    def is_(self, text: str) -> bool:
        return self.kind in ("kw", "sym") and self.text == text


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def adv(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if src[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = src[i]
        if c in " \t\r\n":
            adv(1)
            continue
        if src.startswith("//", i):
            while i < n and src[i] != "\n":
                adv(1)
            continue
        if src.startswith("(*", i):
            start = Span(line, col, line, col)
            depth = 0
            while True:
                if i >= n:
                    raise ParseError("unterminated comment", start, frozenset({"*)"}))
                if src.startswith("(*", i):
                    depth += 1
                    adv(2)
                elif src.startswith("*)", i):
                    depth -= 1
                    adv(2)
                    if depth == 0:
                        break
                else:
                    adv(1)
            continue
        sl, sc = line, col
        if c.isalpha() or (c == "_" and i + 1 < n and (src[i + 1].isalnum() or src[i + 1] == "_")):
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            text = src[i:j]
            adv(j - i)
            kind = "kw" if text in KEYWORDS else "ident"
            toks.append(Token(kind, text, Span(sl, sc, line, col)))
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            text = src[i:j]
            adv(j - i)
            toks.append(Token("int", text, Span(sl, sc, line, col)))
            continue
        for sym in SYMBOLS:
            if src.startswith(sym, i):
                # "->0" only when the 0 is not the start of a longer number
                if sym == "->0" and i + 3 < n and src[i + 3].isdigit():
                    continue
                adv(len(sym))
                toks.append(Token("sym", sym, Span(sl, sc, line, col)))
                break
        else:
            raise ParseError(f"unexpected character {c!r}", Span(sl, sc, sl, sc + 1))
    toks.append(Token("eof", "", Span(line, col, line, col)))
    return toks
