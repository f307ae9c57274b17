"""Exact identities satisfied by the computed volumes.

* the top-degree recursion and the intersection numbers it encodes,
* the Virasoro (DVV) recursion for those intersection numbers,
* three evaluations of ``V_{g,n}`` at ``L_1 = 2 pi i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial, prod

from .checks import NotApplicable
from .poly import MultiPoly, eval_at_2pi_i
from .recursion import (
    VolumeKey,
    VolumeTable,
    compute_volume,
    default_table,
    is_stable,
    mirzakhani_rhs,
)

__all__ = [
    "IntersectionIndex",
    "top_part",
    "check_leading_recursion",
    "intersection_numbers",
    "correlator",
    "double_factorial",
    "admissible_indices",
    "check_dvv",
    "check_do_norbury",
    "check_derivative_relation",
    "check_second_derivative",
]


@dataclass(frozen=True, order=True)
class IntersectionIndex:
    """``<tau_a1 ... tau_an>_g`` with the alphas stored sorted (the value is symmetric)."""

    g: int
    alphas: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(sorted(self.alphas)))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def is_top_degree(self) -> bool:
        return sum(self.alphas) == 3 * self.g - 3 + self.n


def _table(table):
    return default_table() if table is None else table


def top_part(V: MultiPoly, g: int, n: int) -> MultiPoly:
    """Homogeneous component of degree ``6g - 6 + 2n``."""
    return V.homogeneous_part(6 * g - 6 + 2 * n)


def check_leading_recursion(g: int, n: int, table: VolumeTable | None = None) -> bool:
    """Top-degree parts alone satisfy the recursion with ``d/dL1 (L1 V)`` on the left."""
    if (g, n) in ((0, 3), (1, 1)) or not is_stable(g, n):
        raise NotApplicable(f"({g},{n}) is a base case")
    table = _table(table)
    V = compute_volume(g, n, table)
    tops = VolumeTable()
    for key in table.keys():
        if not key.super and key.g <= g and key.n <= n + 1 and key != VolumeKey(g, n):
            tops.put(key, top_part(table.require(key), key.g, key.n))
    rhs = mirzakhani_rhs(g, n, tops)
    lhs = top_part(V, g, n).mul_monomial((1,) + (0,) * (n - 1)).diff(0)
    return lhs == rhs


def intersection_numbers(g: int, n: int, table: VolumeTable | None = None) -> dict[IntersectionIndex, Fraction]:
    """All ``<tau_alpha>_g`` read off the top-degree part of ``V_{g,n}``.

    Keys are sorted multisets, so each distinct correlator appears once.
    """
    V = compute_volume(g, n, _table(table))
    out: dict[IntersectionIndex, Fraction] = {}
    for e, c in top_part(V, g, n).terms.items():
        if not c.is_rational():
            raise ArithmeticError(f"top-degree coefficient {c} carries pi^2")
        alphas = tuple(k // 2 for k in e)
        value = c.rational_part() * 2 ** sum(alphas) * prod(factorial(a) for a in alphas)
        out[IntersectionIndex(g, alphas)] = value
    return dict(sorted(out.items()))


def correlator(g: int, alphas, table: VolumeTable | None = None) -> Fraction:
    """``<tau_alphas>_g``; zero off top degree, for negative indices, or when unstable."""
    alphas = tuple(alphas)
    n = len(alphas)
    if g < 0 or n == 0 or any(a < 0 for a in alphas):
        return Fraction(0)
    if not is_stable(g, n) or sum(alphas) != 3 * g - 3 + n:
        return Fraction(0)
    V = compute_volume(g, n, _table(table))
    c = V.coefficient(tuple(2 * a for a in alphas))
    return c.rational_part() * 2 ** sum(alphas) * prod(factorial(a) for a in alphas)


def double_factorial(k: int) -> int:
    """``k!!`` with ``(-1)!! = 1``."""
    if k < -1:
        raise ValueError("double factorial undefined below -1")
    return prod(range(k, 0, -2)) if k > 0 else 1


def admissible_indices(g: int, n: int) -> list[tuple[int, ...]]:
    """Every ordered ``alpha`` with ``sum = 3g - 3 + n`` (first entry is distinguished)."""
    d = 3 * g - 3 + n
    if d < 0 or n < 1:
        return []
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for a in range(left + 1):
            rec(prefix + (a,), left - a, slots - 1)

    rec((), d, n)
    return out


def _dvv_sides(g: int, alphas: tuple[int, ...], table) -> tuple[Fraction, Fraction]:
    n = len(alphas)
    a1, rest = alphas[0], alphas[1:]
    lhs = double_factorial(2 * a1 + 1) * correlator(g, alphas, table)
    rhs = Fraction(0)
    half = Fraction(1, 2)
    for nu in range(a1 - 1):
        mu = a1 - 2 - nu
        w = double_factorial(2 * nu + 1) * double_factorial(2 * mu + 1)
        inner = correlator(g - 1, (mu, nu) + rest, table)
        for g1 in range(g + 1):
            for k in range(len(rest) + 1):
                for I in combinations(range(len(rest)), k):
                    Ic = [i for i in range(len(rest)) if i not in I]
                    inner += correlator(g1, (nu,) + tuple(rest[i] for i in I), table) * correlator(
                        g - g1, (mu,) + tuple(rest[i] for i in Ic), table
                    )
        rhs += half * w * inner
    for j in range(1, n):
        aj = alphas[j]
        w = Fraction(double_factorial(2 * (a1 + aj) - 1), double_factorial(2 * aj - 1))
        reduced = (a1 + aj - 1,) + alphas[1:j] + alphas[j + 1:]
        rhs += w * correlator(g, reduced, table)
    return lhs, rhs


def check_dvv(g: int, alphas, table: VolumeTable | None = None) -> bool:
    """Virasoro recursion for ``<tau_alphas>_g`` with ``alphas[0]`` distinguished.

    Applies to every stable ``(g, n)`` except the two base cases; their
    right-hand sides would need the unstable ``<tau_0 tau_0>_0``.
    """
    alphas = tuple(alphas)
    n = len(alphas)
    if n < 1 or not is_stable(g, n):
        raise NotApplicable(f"({g},{n}) is unstable")
    if sum(alphas) != 3 * g - 3 + n or any(a < 0 for a in alphas):
        raise ValueError(f"index {alphas} is not of top degree for ({g},{n})")
    if (g, n) in ((0, 3), (1, 1)):
        raise NotApplicable(f"({g},{n}) is a base case")
    lhs, rhs = _dvv_sides(g, alphas, _table(table))
    return lhs == rhs


def _require_reducible(g: int, n: int) -> None:
    if n < 2 or not is_stable(g, n) or not is_stable(g, n - 1):
        raise NotApplicable(f"({g},{n}) has no stable ({g},{n - 1}) neighbour")


def _pair(g, n, table):
    table = _table(table)
    return compute_volume(g, n, table), compute_volume(g, n - 1, table)


def check_do_norbury(g: int, n: int, table: VolumeTable | None = None) -> bool:
    """``V_{g,n}(2 pi i, L_2..) = sum_k int_0^{L_k} L_k V_{g,n-1}(L_2..) dL_k``."""
    _require_reducible(g, n)
    V, W = _pair(g, n, table)
    lhs = eval_at_2pi_i(V, "even")
    rhs = MultiPoly.zero(n - 1)
    for k in range(n - 1):
        # int_0^{L} L^(a+1) dL = L^(a+2) / (a+2), monomial by monomial
        terms = {}
        for e, c in W.terms.items():
            f = list(e)
            f[k] += 2
            terms[tuple(f)] = c / (e[k] + 2)
        rhs = rhs + MultiPoly(n - 1, terms)
    return lhs == rhs


def check_derivative_relation(g: int, n: int, table: VolumeTable | None = None) -> bool:
    """``dV/dL1 (2 pi i, L_2..) = 2 pi i (2g - 3 + n) V_{g,n-1}(L_2..)``."""
    _require_reducible(g, n)
    V, W = _pair(g, n, table)
    return eval_at_2pi_i(V.diff(0), "odd") == W * (2 * g - 3 + n)


def check_second_derivative(g: int, n: int, table: VolumeTable | None = None) -> bool:
    """``d2V/dL1^2 (2 pi i, ..) = sum_k d/dL_k (L_k V_{g,n-1}) - 2(2g-3+n) V_{g,n-1}``."""
    _require_reducible(g, n)
    V, W = _pair(g, n, table)
    lhs = eval_at_2pi_i(V.diff(0, 2), "even")
    rhs = W * (-2 * (2 * g - 3 + n))
    for k in range(n - 1):
        bump = [0] * (n - 1)
        bump[k] = 1
        rhs = rhs + W.mul_monomial(bump).diff(k)
    return lhs == rhs

