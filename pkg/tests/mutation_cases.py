"""Single-edit mutants of the corpus, each of which must be rejected."""

from __future__ import annotations

from dataclasses import dataclass

from viewcheck.cli import corpus_root
from viewcheck.parser import parse_program

KINDS = (
    "duplicate-proof", "dropped-proof", "guard-strengthen", "guard-weaken",
    "offset", "free-twice", "read-after-free", "swap-components",
)


@dataclass(frozen=True)
class Mutant:
    name: str
    file: str
    kind: str
    old: str
    new: str
    occurrence: int = 0  # which match of ``old`` to edit

    def source(self) -> str:
        return (corpus_root() / self.file).read_text()

    def apply(self) -> tuple[str, int, int]:
        """(mutated text, first edited line, last edited line)."""
        src = self.source()
        at = -1
        for _ in range(self.occurrence + 1):
            at = src.index(self.old, at + 1)
        out = src[:at] + self.new + src[at + len(self.old):]
        first = src.count("\n", 0, at) + 1
        return out, first, first + self.new.count("\n")

    def region(self) -> tuple[int, int]:
        """Lines of the top-level declaration containing the edit."""
        text, first, last = self.apply()
        for d in parse_program(text).decls:
            if d.span.line <= first and last <= d.span.end_line:
                return d.span.line, d.span.end_line
        return first, last


M = Mutant
F2, F9, F10, F11, F12 = ("fig2_array.vats", "fig9_arraymap.vats", "reverse_demo.vats",
                         "fig11_refs.vats", "fig12_pair_sum.vats")

MUTANTS = [
    # a consumed proof used again
    M("dup-getFirst", F2, "duplicate-proof",
      "'(ArraySome (pf1', pf2) | x)", "'(ArraySome (pf1, pf2) | x)"),
    M("dup-splitLemma", F2, "duplicate-proof",
      "'(ArraySome (pf1, pf21), pf22)", "'(ArraySome (pf1, pf21), pf2)"),
    M("dup-unsplitLemma", F2, "duplicate-proof",
      "ArraySome (pf11, pf)\n", "ArraySome (pf11, pf12)\n"),
    M("dup-get", F2, "duplicate-proof",
      "'(unsplitLemma (pf1, pf2) | x)", "'(unsplitLemma (pf1, pf) | x)"),
    M("dup-arrayMap", F9, "duplicate-proof",
      "arrayMap (pf2 | A + 1", "arrayMap (pf | A + 1"),
    M("dup-rev", F10, "duplicate-proof",
      "rev (pf1, pf22 | p2, next)", "rev (pf1, pf2 | p2, next)"),
    M("dup-cons", F10, "duplicate-proof",
      "SlsegSome ('(pf1, pf2), pf)", "SlsegSome ('(pf1, pf1), pf)"),
    M("dup-main-array", F2, "duplicate-proof",
      "ArraySome {Int} (pf2, ArraySome", "ArraySome {Int} (pf1, ArraySome"),
    M("dup-makePair", F12, "duplicate-proof",
      "setPtr (pf2 | p + 1, x2)", "setPtr (pf1 | p + 1, x2)"),
    # a linear proof left unconsumed (or never produced)
    M("drop-main-free", F2, "dropped-proof", "     val _ = free (pf | p, 3)\n", ""),
    M("drop-main-arraymap", F9, "dropped-proof", "     '(pf | p)\n", "     p\n"),
    M("drop-main-reverse", F10, "dropped-proof", "     '(pf | q)\n", "     q\n"),
    M("drop-unsplitLemma-base", F2, "dropped-proof",
      "let prval ArrayNone () = pf1 in pf2 end", "pf2"),
    M("drop-arrayMap-base", F9, "dropped-proof",
      "let prval ArrayNone () = pf in '(ArrayNone () | '()) end", "'(ArrayNone () | '())"),
    M("drop-fill-base", F9, "dropped-proof",
      "let prval ArrayNone () = pf in '(ArrayNone () | '()) end", "'(ArrayNone () | '())", 1),
    M("drop-rev-base", F10, "dropped-proof",
      "let prval SlsegNone () = pf2 in '(pf1 | p1) end", "'(pf1 | p1)"),
    M("drop-getFirst-result", F2, "dropped-proof",
      "'(ArraySome (pf1', pf2) | x)", "'(pf2 | x)"),
    # n >= 0 strengthened to n >= 1
    M("guard-arrayMap", F9, "guard-strengthen",
      "{a1: type, a2: type, n: int, l: addr | n >= 0}",
      "{a1: type, a2: type, n: int, l: addr | n >= 1}"),
    M("guard-fill", F9, "guard-strengthen",
      "{a:type, n:int, l:addr | n >= 0}\n   (pf: arrayView (a, n, l) | p: ptr l, n: int n, x: Int)",
      "{a:type, n:int, l:addr | n >= 1}\n   (pf: arrayView (a, n, l) | p: ptr l, n: int n, x: Int)"),
    M("guard-rev-n1", F10, "guard-strengthen",
      "{n1:int,n2:int,l1:addr,l2:addr | n1 >= 0, n2 >= 0}",
      "{n1:int,n2:int,l1:addr,l2:addr | n1 >= 1, n2 >= 0}"),
    M("guard-rev-n2", F10, "guard-strengthen",
      "{n1:int,n2:int,l1:addr,l2:addr | n1 >= 0, n2 >= 0}",
      "{n1:int,n2:int,l1:addr,l2:addr | n1 >= 0, n2 >= 1}"),
    M("guard-build", F10, "guard-strengthen", "{n:int | n >= 0}", "{n:int | n >= 1}"),
    M("guard-splitLemma", F2, "guard-strengthen",
      "{a:type, n:int, i:int, l:addr | 0 <= i, i <= n}",
      "{a:type, n:int, i:int, l:addr | 1 <= i, i <= n}"),
    M("guard-freeList", F10, "guard-strengthen",
      "{n:int, l:addr | n >= 0} (pf: sllistView (Int, n, l) | p: ptr l): unit",
      "{n:int, l:addr | n >= 1} (pf: sllistView (Int, n, l) | p: ptr l): unit"),
    # n >= 1 (n > 0) weakened to n >= 0
    M("weaken-getFirst", F2, "guard-weaken", "l:addr | n > 0}", "l:addr | n >= 0}"),
    M("weaken-arrayMap", F9, "guard-weaken",
      "if n igt 0 then // [igt]", "if n ige 0 then // [igt]"),
    M("weaken-fill", F9, "guard-weaken",
      "  if n igt 0 then\n    let\n       prval ArraySome (pf1, pf2) = pf\n       val '(pf1 | _) = setPtr (pf1 | p, x)",
      "  if n ige 0 then\n    let\n       prval ArraySome (pf1, pf2) = pf\n       val '(pf1 | _) = setPtr (pf1 | p, x)"),
    M("weaken-build", F10, "guard-weaken",
      "if n igt 0 then\n    let val '(pf | p) = build", "if n ige 0 then\n    let val '(pf | p) = build"),
    # l+1 changed to l
    M("offset-splitLemma", F2, "offset",
      "splitLemma {a,n-1,i-1,l+1}", "splitLemma {a,n-1,i-1,l}"),
    M("offset-unsplitLemma", F2, "offset",
      "unsplitLemma {a, n1-1, n2, l+1}", "unsplitLemma {a, n1-1, n2, l}"),
    M("offset-arrayMap", F9, "offset",
      "arrayMap (pf2 | A + 1, ipred n, f)", "arrayMap (pf2 | A, ipred n, f)"),
    M("offset-fill", F9, "offset", "fill (pf2 | p + 1, ipred n, x + 1)",
      "fill (pf2 | p, ipred n, x + 1)"),
    M("offset-cons", F10, "offset", "setPtr (pf2 | q + 1, p)", "setPtr (pf2 | q, p)"),
    M("offset-rev-get", F10, "offset",
      "getPtr (pf211 | p2 + 1)", "getPtr (pf211 | p2)"),
    M("offset-rev-set", F10, "offset",
      "setPtr (pf211 | p2 + 1, p1)", "setPtr (pf211 | p2, p1)"),
    M("offset-freeList", F10, "offset",
      "getPtr (pf11 | p + 1)", "getPtr (pf11 | p)"),
    M("offset-main-array", F2, "offset", "setPtr (pf2 | p + 1, 20)", "setPtr (pf2 | p, 20)"),
    M("offset-makePair", F12, "offset", "setPtr (pf2 | p + 1, x2)", "setPtr (pf2 | p, x2)"),
    M("offset-getSnd", F12, "offset",
      "getPtr0 (pf2 | (*none*) | p0 + 1)", "getPtr0 (pf2 | (*none*) | p0)"),
    M("offset-inl", F12, "offset",
      "setPtr (pf2 | p + 1, x)\n  in\n     '(viewbox pf1, viewbox pf2, '() | p)",
      "setPtr (pf2 | p, x)\n  in\n     '(viewbox pf1, viewbox pf2, '() | p)"),
    # memory released twice
    M("free-twice-main", F2, "free-twice",
      "     val _ = free (pf | p, 3)\n",
      "     val _ = free (pf | p, 3)\n     val _ = free (pf | p, 3)\n"),
    M("free-twice-freeList", F10, "free-twice",
      "| p, 2)\n", "| p, 2)\n     val _ = free (ArraySome {top} (pf10, ArraySome {top} "
      "(pf11, ArrayNone ())) | p, 2)\n"),
    M("free-twice-partial", F2, "free-twice",
      "     val _ = free (pf | p, 3)\n",
      "     val _ = free (pf | p, 3)\n     val _ = free (pf | p + 1, 2)\n"),
    # memory used after it is released
    M("use-after-free-main", F2, "read-after-free",
      "     val '(pf | x) = get (pf | p, 1)\n",
      "     val _ = free (pf | p, 3)\n     val '(pf | x) = get (pf | p, 1)\n"),
    M("use-after-free-arraymap", F9, "read-after-free",
      "     val '(pf | p) = alloc (5)\n",
      "     val '(pf | p) = alloc (5)\n     val _ = free (pf | p, 5)\n"),
    M("use-after-free-cons", F10, "read-after-free",
      "     val '(pfa | q) = alloc (2)\n",
      "     val '(pfa | q) = alloc (2)\n     val _ = free (pfa | q, 2)\n"),
    M("use-after-free-newRef", F11, "read-after-free",
      "     val '(pf1 | _) = setPtr (pf1 | p, x)\n",
      "     val '(pf1 | _) = setPtr (pf1 | p, x)\n"
      "     val _ = free (ArraySome {a} (pf1, ArrayNone ()) | p, 1)\n"),
    M("use-after-free-freeList", F10, "read-after-free",
      "     prval '(pf10, pf11) = pf1\n",
      "     prval '(pf10, pf11) = pf1\n"
      "     val _ = free (ArraySome {top} (pf10, ArraySome {top} (pf11, ArrayNone ())) | p, 2)\n"),
    # the two components of ArraySome swapped
    M("swap-getFirst", F2, "swap-components",
      "'(ArraySome (pf1', pf2) | x)", "'(ArraySome (pf2, pf1') | x)"),
    M("swap-splitLemma-pattern", F2, "swap-components",
      "prval ArraySome (pf1, pf2) = pf // this", "prval ArraySome (pf2, pf1) = pf // this"),
    M("swap-splitLemma-result", F2, "swap-components",
      "'(ArraySome (pf1, pf21), pf22)", "'(ArraySome (pf21, pf1), pf22)"),
    M("swap-unsplitLemma", F2, "swap-components",
      "ArraySome (pf11, pf)\n", "ArraySome (pf, pf11)\n"),
    M("swap-arrayMap-pattern", F9, "swap-components",
      "prval ArraySome (pf1, pf2) = pf\n       val '(pf1 | v)",
      "prval ArraySome (pf2, pf1) = pf\n       val '(pf1 | v)"),
    M("swap-arrayMap-result", F9, "swap-components",
      "'(ArraySome (pf1, pf2) | '())", "'(ArraySome (pf2, pf1) | '())"),
    M("swap-fill-result", F9, "swap-components",
      "'(ArraySome (pf1, pf2) | '())", "'(ArraySome (pf2, pf1) | '())", 1),
    M("swap-newRef", F11, "swap-components",
      "prval ArraySome (pf1, ArrayNone ()) = pf", "prval ArraySome (ArrayNone (), pf1) = pf"),
    M("swap-makePair", F12, "swap-components",
      "     prval ArraySome (pf1, ArraySome (pf2, ArrayNone ())) = pf\n     val '(pf1 | _) = setPtr (pf1 | p, x1)",
      "     prval ArraySome (ArraySome (pf2, ArrayNone ()), pf1) = pf\n     val '(pf1 | _) = setPtr (pf1 | p, x1)"),
    M("swap-main-array", F2, "swap-components",
      "ArraySome {Int} (pf3, ArrayNone ())", "ArraySome {Int} (ArrayNone (), pf3)"),
]
