"""Integer satisfiability of conjunctions of linear constraints (the Omega test).

Constraints are ``(coeffs, const)`` pairs read as ``sum(c*x) + const == 0``
(equalities) or ``>= 0`` (inequalities); ``coeffs`` maps variable keys to
nonzero integers.  The procedure is exact over the integers: equalities are
eliminated with Pugh's symmetric-modulo step, inequalities with exact
Fourier-Motzkin where a unit coefficient allows it, otherwise with the real
shadow / dark shadow / splinter case split.
"""

from __future__ import annotations

from math import gcd
from typing import Hashable

Coeffs = dict
Constraint = tuple  # (Coeffs, int)


class _Fresh:
    def __init__(self):
        self.n = 0

    def __call__(self) -> Hashable:
        self.n += 1
        return ("#sigma", self.n)


def _gcd_all(coeffs: Coeffs) -> int:
    g = 0
    for c in coeffs.values():
        g = gcd(g, c)
    return g


def _substitute(con: Constraint, var, expr: Constraint) -> Constraint:
    """Replace ``var`` by ``expr`` (an affine form) in ``con``."""
    coeffs, const = con
    a = coeffs.get(var)
    if a is None:
        return con
    out = {k: v for k, v in coeffs.items() if k != var}
    ecoeffs, econst = expr
    for k, v in ecoeffs.items():
        nv = out.get(k, 0) + a * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out, const + a * econst


def _mod_hat(a: int, m: int) -> int:
    return a - m * ((2 * a + m) // (2 * m))


def satisfiable(eqs: list[Constraint], geqs: list[Constraint]) -> bool:
    return _sat(list(eqs), list(geqs), _Fresh())


def _sat(eqs: list[Constraint], geqs: list[Constraint], fresh: _Fresh) -> bool:
    # -- equality elimination ------------------------------------------------
    while eqs:
        coeffs, const = eqs.pop()
        if not coeffs:
            if const != 0:
                return False
            continue
        g = _gcd_all(coeffs)
        if const % g:
            return False
        if g > 1:
            coeffs = {k: v // g for k, v in coeffs.items()}
            const //= g
        unit = next((k for k, v in coeffs.items() if abs(v) == 1), None)
        if unit is not None:
            a = coeffs[unit]
            # a*x + rest + const = 0  =>  x = -a*(rest + const)
            expr = ({k: -a * v for k, v in coeffs.items() if k != unit}, -a * const)
            eqs = [_substitute(e, unit, expr) for e in eqs]
            geqs = [_substitute(e, unit, expr) for e in geqs]
            continue
        k = min(coeffs, key=lambda v: abs(coeffs[v]))
        ak = coeffs[k]
        m = abs(ak) + 1
        sigma = fresh()
        sign = 1 if ak > 0 else -1
        # x_k = sign * (sum_{i!=k} mh(a_i) x_i + mh(c) - m*sigma)
        expr_coeffs = {}
        for v, a in coeffs.items():
            if v == k:
                continue
            mh = _mod_hat(a, m)
            if mh:
                expr_coeffs[v] = sign * mh
        expr_coeffs[sigma] = -sign * m
        expr = (expr_coeffs, sign * _mod_hat(const, m))
        eqs.append(_substitute((coeffs, const), k, expr))
        eqs = [_substitute(e, k, expr) for e in eqs]
        geqs = [_substitute(e, k, expr) for e in geqs]

    # -- inequality normalisation -------------------------------------------
    table: dict = {}
    for coeffs, const in geqs:
        if not coeffs:
            if const < 0:
                return False
            continue
        g = _gcd_all(coeffs)
        if g > 1:
            coeffs = {k: v // g for k, v in coeffs.items()}
            const = const // g  # floor: integer tightening
        key = tuple(sorted(coeffs.items(), key=lambda kv: repr(kv[0])))
        if key not in table or table[key][1] > const:
            table[key] = (coeffs, const)

    new_eqs = []
    paired = set()
    for key, (coeffs, const) in table.items():
        neg = tuple(sorted(((k, -v) for k, v in coeffs.items()), key=lambda kv: repr(kv[0])))
        if neg in table:
            other = table[neg][1]
            if const + other < 0:
                return False
            if const + other == 0 and neg not in paired:
                paired.add(key)
                new_eqs.append((coeffs, const))
    if new_eqs:
        return _sat(new_eqs, [c for c in table.values()], fresh)

    cons = list(table.values())
    if not cons:
        return True

    # -- variable elimination ------------------------------------------------
    variables = set()
    for coeffs, _ in cons:
        variables.update(coeffs)
    # variables bounded on one side only can be dropped with their constraints
    for v in variables:
        signs = {coeffs[v] > 0 for coeffs, _ in cons if v in coeffs}
        if len(signs) == 1:
            return _sat([], [c for c in cons if v not in c[0]], fresh)

    best = None
    for v in variables:
        lows = [c for c in cons if c[0].get(v, 0) > 0]
        ups = [c for c in cons if c[0].get(v, 0) < 0]
        exact = all(c[0][v] == 1 for c in lows) or all(c[0][v] == -1 for c in ups)
        score = (0 if exact else 1, len(lows) * len(ups))
        if best is None or score < best[0]:
            best = (score, v, lows, ups, exact)
    _, v, lows, ups, exact = best
    rest = [c for c in cons if v not in c[0]]

    def combine(lo, up, dark: bool) -> Constraint:
        b = lo[0][v]
        a = -up[0][v]
        coeffs = {}
        for k, c in lo[0].items():
            if k != v:
                coeffs[k] = coeffs.get(k, 0) + a * c
        for k, c in up[0].items():
            if k != v:
                coeffs[k] = coeffs.get(k, 0) + b * c
        coeffs = {k: c for k, c in coeffs.items() if c}
        const = a * lo[1] + b * up[1]
        if dark:
            const -= (a - 1) * (b - 1)
        return coeffs, const

    real = rest + [combine(lo, up, False) for lo in lows for up in ups]
    if exact:
        return _sat([], real, fresh)
    if not _sat([], real, fresh):
        return False
    dark = rest + [combine(lo, up, True) for lo in lows for up in ups]
    if _sat([], dark, fresh):
        return True
    # splinters: some lower bound is nearly tight
    a_max = max(-up[0][v] for up in ups)
    for lo in lows:
        b = lo[0][v]
        limit = (a_max * b - a_max - b) // a_max
        for i in range(limit + 1):
            coeffs, const = lo
            if _sat([(dict(coeffs), const - i)], list(cons), fresh):
                return True
    return False

