"""Text and LaTeX rendering of polynomials over Q[pi^2]."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .ring import RingElem


def _names(nvars: int, names: Sequence[str] | None, latex: bool) -> list[str]:
    if names is not None:
        return list(names)
    return [f"L_{i + 1}" if latex else f"L{i + 1}" for i in range(nvars)]


def _sort_key(exp: tuple[int, ...]):
    # graded lex, highest first
    return (-sum(exp), tuple(-e for e in exp))


def _mono_text(exp, names) -> str:
    parts = []
    for name, e in zip(names, exp):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render_text(P, names: Sequence[str] | None = None) -> str:
    """Plain text with the common denominator pulled out.

    ``(L1^2 + 4*pi^2)/48`` style: graded lex monomial order, and within a
    monomial lower pi powers first.
    """
    if not P.terms:
        return "0"
    names = _names(P.nvars, names, latex=False)
    flat: list[tuple[tuple[int, ...], int, Fraction]] = []
    for exp in sorted(P.terms, key=_sort_key):
        for k, c in enumerate(P.terms[exp].coeffs):
            if c:
                flat.append((exp, k, c))
    den = lcm(*(c.denominator for _, _, c in flat))
    pieces = []
    for exp, k, c in flat:
        num = c * den
        factors = []
        if k:
            factors.append(f"pi^{2 * k}")
        mono = _mono_text(exp, names)
        if mono:
            factors.append(mono)
        body = "*".join(factors)
        mag = abs(num)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        pieces.append(("-" if num < 0 else "+", text))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    if den != 1:
        out = f"({out})/{den}" if len(pieces) > 1 else f"{out}/{den}"
    return out


def _latex_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return rf"\tfrac{{{q.numerator}}}{{{q.denominator}}}"


def _latex_pi(k: int) -> str:
    if k == 0:
        return ""
    return r"\pi^2" if k == 1 else rf"\pi^{{{2 * k}}}"


def _latex_term(q: Fraction, k: int) -> str:
    """Magnitude of ``q * pi^(2k)``; empty string for 1."""
    q = abs(q)
    pi = _latex_pi(k)
    if q == 1:
        return pi
    return _latex_rational(q) + pi


def _latex_coef(c: RingElem) -> tuple[str, str]:
    """(sign, magnitude) of a coefficient; magnitude '' stands for 1."""
    nz = [(k, q) for k, q in enumerate(c.coeffs) if q]
    if len(nz) == 1:
        k, q = nz[0]
        return ("-" if q < 0 else "+"), _latex_term(q, k)
    s = ""
    for i, (k, q) in enumerate(nz):
        t = _latex_term(q, k) or "1"
        if i == 0:
            s = ("-" if q < 0 else "") + t
        else:
            s += f" {'-' if q < 0 else '+'} {t}"
    return "+", rf"\left({s}\right)"


def render_latex(P, names: Sequence[str] | None = None) -> str:
    """LaTeX with monomials sharing a coefficient grouped in parentheses.

    Groups are ordered by their lowest monomial degree; inside a group the
    monomials follow graded lex order.
    """
    if not P.terms:
        return "0"
    names = _names(P.nvars, names, latex=True)
    groups: dict[RingElem, list[tuple[int, ...]]] = {}
    for exp in sorted(P.terms, key=_sort_key):
        groups.setdefault(P.terms[exp], []).append(exp)
    ordered = sorted(groups.items(), key=lambda kv: (min(sum(e) for e in kv[1]), _sort_key(kv[1][0])))
    pieces = []
    for coef, exps in ordered:
        # within a degree: L_1 first
        exps = sorted(exps, key=lambda e: (sum(e), tuple(-x for x in e)))
        monos = ["".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k) for e in exps]
        sign, mag = _latex_coef(coef)
        if len(monos) == 1:
            body = (mag + monos[0]) or "1"
        else:
            body = mag + "(" + "+".join(m or "1" for m in monos) + ")"
        pieces.append((sign, body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
