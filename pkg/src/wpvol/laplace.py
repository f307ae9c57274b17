"""Laplace transforms of volume polynomials and exact checks of their recursions.

A transform ``F(t_1..t_n)`` is a Laurent polynomial in the ``t_i`` (only
negative odd exponents).  Kernels such as ``2 pi / sin(2 pi t)`` are kept as
truncated Laurent series in one variable; :class:`LaurentObject` records
how far a series is exact, so every principal part and residue taken below
is checked to be fully determined.

Pole factors ``1/(t_j^2 - t_1^2)`` and ``W_{0,2}`` are always expanded in
ascending powers of the first (or residue) variable, i.e. in the region
``|t_1| < |t_j|``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .checks import CheckResult, NotApplicable
from .poly import MultiPoly, SparsePoly, _shift_diff_any, _shift_sum_any, minus_4pi2_pow
from .recursion import (
    VolumeKey,
    VolumeTable,
    _splittings,
    compute_super_volume,
    compute_volume,
    default_table,
    is_stable,
)
from .ring import ZERO, RingElem

__all__ = [
    "LaurentObject",
    "InsufficientTruncation",
    "laplace_transform",
    "inverse_laplace_transform",
    "w_transform",
    "w02_series",
    "kernel_series",
    "expand_pole",
    "pr_part",
    "hol_part",
    "residue",
    "two_sided_quotient",
    "transform",
    "check_laplace_original",
    "check_laplace_new",
    "check_toprec",
    "check_super_laplace",
    "check_lemma_laplace_shift",
]

REGION_T = "|t1| < |tj|"


class InsufficientTruncation(ArithmeticError):
    """A principal part or residue needs coefficients beyond the truncation."""


@dataclass(frozen=True)
class LaurentObject:
    """Laurent polynomial, or Laurent series in slot ``var`` truncated at ``trunc``.

    Every coefficient of ``t_var^e`` with ``e < trunc`` is exact; nothing at
    or above ``trunc`` is stored.  ``trunc is None`` means the object is an
    exact Laurent polynomial.
    """

    poly: SparsePoly
    var: int = 0
    trunc: int | None = None
    region: str = field(default=REGION_T, compare=False)

    def __post_init__(self):
        if self.trunc is not None:
            drop = [e for e in self.poly.terms if e[self.var] >= self.trunc]
            if drop:
                terms = {e: c for e, c in self.poly.terms.items() if e[self.var] < self.trunc}
                object.__setattr__(self, "poly", SparsePoly._raw(self.poly.nvars, terms))

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    @property
    def min_exp(self) -> int | None:
        return self.poly.min_degree_in(self.var)

    def coefficient(self, k: int) -> SparsePoly:
        """Coefficient of ``t_var^k`` (slot zeroed) as a Laurent polynomial."""
        if self.trunc is not None and k >= self.trunc:
            raise InsufficientTruncation(f"exponent {k} is beyond the truncation {self.trunc}")
        return self.poly.coefficient_in(self.var, k)

    def _lift(self, other) -> "LaurentObject":
        if isinstance(other, LaurentObject):
            if other.var != self.var and not (other.is_exact and self.is_exact):
                raise ValueError("series in different variables")
            return other
        if isinstance(other, SparsePoly):
            return LaurentObject(other, self.var)
        return LaurentObject(SparsePoly.constant(self.nvars, other), self.var)

    def __add__(self, other):
        other = self._lift(other)
        return LaurentObject(self.poly + other.poly, self.var, _min_trunc(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return LaurentObject(-self.poly, self.var, self.trunc)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RingElem)):
            return LaurentObject(self.poly * other, self.var, self.trunc)
        other = self._lift(other)
        trunc = None
        a_min = self.min_exp
        b_min = other.min_exp
        if a_min is None or b_min is None:
            # a zero factor; exactness is limited by the other's truncation
            return LaurentObject(SparsePoly.zero(self.nvars), self.var, _min_trunc(self.trunc, other.trunc))
        if self.trunc is not None:
            trunc = self.trunc + b_min
        if other.trunc is not None:
            t = other.trunc + a_min
            trunc = t if trunc is None else min(trunc, t)
        return LaurentObject(_mul_below(self.poly, other.poly, self.var, trunc), self.var, trunc)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentObject):
            return NotImplemented
        return self.poly == other.poly and self.var == other.var and self.trunc == other.trunc

    __hash__ = None

    def to_json(self) -> dict:
        return {"var": self.var, "truncation": "exact" if self.trunc is None else self.trunc, "terms": self.poly.to_json()}


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _mul_below(P: SparsePoly, Q: SparsePoly, var: int, trunc: int | None) -> SparsePoly:
    # product keeping only terms below the truncation in slot var
    out: dict = {}
    for e1, c1 in P.terms.items():
        for e2, c2 in Q.terms.items():
            if trunc is not None and e1[var] + e2[var] >= trunc:
                continue
            e = tuple(a + b for a, b in zip(e1, e2))
            p = c1 * c2
            s = out.get(e)
            out[e] = p if s is None else s + p
    return SparsePoly._raw(P.nvars, {e: c for e, c in out.items() if c})


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def laplace_transform(V: SparsePoly) -> LaurentObject:
    """Exact transform: ``L_i^a -> a! t_i^(-a-1)`` in every slot."""
    out = {}
    for e, c in V.terms.items():
        if any(a < 0 for a in e):
            raise ValueError("laplace_transform needs a polynomial")
        w = 1
        for a in e:
            w *= factorial(a)
        out[tuple(-a - 1 for a in e)] = c * w
    return LaurentObject(SparsePoly._raw(V.nvars, out))


def inverse_laplace_transform(F) -> MultiPoly:
    """Inverse of :func:`laplace_transform` on exact Laurent polynomials."""
    P = F.poly if isinstance(F, LaurentObject) else F
    out = {}
    for e, c in P.terms.items():
        if any(b >= 0 for b in e):
            raise ValueError("only negative exponents have a polynomial preimage")
        w = 1
        for b in e:
            w *= factorial(-b - 1)
        out[tuple(-b - 1 for b in e)] = c / w
    return MultiPoly._raw(P.nvars, out)


def w_transform(F) -> LaurentObject:
    """``(-1)^n d^n F / dt_1 ... dt_n``."""
    P = F.poly if isinstance(F, LaurentObject) else F
    for i in range(P.nvars):
        P = P.diff(i)
    if P.nvars % 2:
        P = -P
    return LaurentObject(P)


def w02_series(nvars: int, s: int, t: int, K: int, sign: int = 1) -> LaurentObject:
    """``1/(sign*s - t)^2`` expanded in ascending powers of slot ``s``, exact below ``s^K``.

    ``sign=1`` gives ``W_{0,2}(s, t)``; ``sign=-1`` gives ``W_{0,2}(-s, t)``.
    """
    terms = {}
    for m in range(max(K, 0)):
        e = [0] * nvars
        e[s] = m
        e[t] = -m - 2
        terms[tuple(e)] = RingElem.coerce((m + 1) * (sign ** m))
    return LaurentObject(SparsePoly._raw(nvars, terms), s, K)


@lru_cache(maxsize=None)
def _scalar_series(kind: str, K: int) -> tuple[tuple[int, RingElem], ...]:
    # (exponent, coefficient) pairs with exponent < K
    if kind == "cos":
        return tuple((2 * k, minus_4pi2_pow(k) / factorial(2 * k)) for k in range((K + 1) // 2) if 2 * k < K)
    if kind == "sin":
        # sin(2 pi t) / (2 pi)
        return tuple((2 * k + 1, minus_4pi2_pow(k) / factorial(2 * k + 1)) for k in range(K // 2 + 1) if 2 * k + 1 < K)
    if kind in ("csc", "sec"):
        # invert 1 + a_1 u + a_2 u^2 + ... in u = t^2
        if kind == "csc":
            base = [minus_4pi2_pow(k) / factorial(2 * k + 1) for k in range(K // 2 + 2)]
            shift = -1
        else:
            base = [minus_4pi2_pow(k) / factorial(2 * k) for k in range(K // 2 + 2)]
            shift = 0
        inv = [RingElem.coerce(1)]
        for m in range(1, len(base)):
            acc = ZERO
            for i in range(1, m + 1):
                acc = acc + base[i] * inv[m - i]
            inv.append(-acc)
        return tuple((2 * m + shift, c) for m, c in enumerate(inv) if 2 * m + shift < K and c)
    raise ValueError(f"unknown kernel {kind!r}")


def kernel_series(kind: str, K: int, nvars: int = 1, var: int = 0) -> LaurentObject:
    """Series of a trigonometric kernel in slot ``var``, exact for exponents ``< K``.

    ``csc``: ``2 pi / sin(2 pi t)``; ``cos``: ``cos(2 pi t)``;
    ``sin``: ``sin(2 pi t) / (2 pi)``; ``sec``: ``1 / cos(2 pi t)``.
    The csc and sec series come from exact power-series inversion.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    terms = {}
    for k, c in _scalar_series(kind, K):
        e = [0] * nvars
        e[var] = k
        terms[tuple(e)] = c
    return LaurentObject(SparsePoly._raw(nvars, terms), var, K)


def expand_pole(nvars: int, j: int, K: int, var: int = 0) -> LaurentObject:
    """``1/(t_j^2 - t_var^2) = sum_{m<=K} t_var^(2m) t_j^(-2m-2)``, exact below ``t_var^(2K+2)``."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    terms = {}
    for m in range(K + 1):
        e = [0] * nvars
        e[var] = 2 * m
        e[j] = -2 * m - 2
        terms[tuple(e)] = RingElem.coerce(1)
    return LaurentObject(SparsePoly._raw(nvars, terms), var, 2 * K + 2)


def _split_at(S: LaurentObject, keep_negative: bool) -> SparsePoly:
    terms = {e: c for e, c in S.poly.terms.items() if (e[S.var] < 0) == keep_negative}
    return SparsePoly._raw(S.nvars, terms)


def pr_part(S: LaurentObject) -> LaurentObject:
    """Terms with negative exponent in ``S.var`` (exact)."""
    if S.trunc is not None and S.trunc < 0:
        raise InsufficientTruncation(f"principal part needs truncation >= 0, have {S.trunc}")
    return LaurentObject(_split_at(S, True), S.var)


def hol_part(S: LaurentObject) -> LaurentObject:
    """Terms with nonnegative exponent in ``S.var``; keeps the truncation."""
    if S.trunc is not None and S.trunc < 0:
        raise InsufficientTruncation(f"holomorphic part needs truncation >= 0, have {S.trunc}")
    return LaurentObject(_split_at(S, False), S.var, S.trunc)


def residue(S: LaurentObject) -> SparsePoly:
    """Coefficient of ``t_var^(-1)``; the slot is dropped."""
    return S.coefficient(-1).drop_var(S.var)


def two_sided_quotient(h: SparsePoly, j: int, var: int = 0) -> SparsePoly:
    """``(t_j h(t_1)/t_1 - t_1 h(t_j)/t_j) / (t_j^2 - t_1^2)`` as an exact Laurent polynomial.

    ``h`` must have only even nonpositive exponents in slot ``var`` and none
    in slot ``j``.  Each ``t_1^(-2k)`` contributes
    ``sum_{i=0}^{k} t_1^(-2i-1) t_j^(2i-2k-1)``.
    """
    out: dict = {}
    for e, c in h.terms.items():
        a = e[var]
        if e[j] != 0:
            raise ValueError(f"slot {j} must be free")
        if a > 0 or a % 2:
            raise ValueError("expected even nonpositive exponents in the first variable")
        k = -a // 2
        for i in range(k + 1):
            f = list(e)
            f[var] = -2 * i - 1
            f[j] = 2 * i - 2 * k - 1
            f = tuple(f)
            s = out.get(f)
            out[f] = c if s is None else s + c
    return SparsePoly._raw(h.nvars, {e: c for e, c in out.items() if c})


# ---------------------------------------------------------------------------
# transforms of volumes
# ---------------------------------------------------------------------------


def _table(table):
    return default_table() if table is None else table


def transform(g: int, n: int, super: bool = False, table: VolumeTable | None = None) -> LaurentObject:
    """``F_{g,n}`` (or its super analogue) as an exact Laurent polynomial."""
    table = _table(table)
    V = compute_super_volume(g, n, table) if super else compute_volume(g, n, table)
    return laplace_transform(V)


def _dF(g, n, sup, table) -> SparsePoly:
    return transform(g, n, sup, table).poly.diff(0)


def _require_recursive(g: int, n: int, sup: bool = False) -> None:
    if not is_stable(g, n) or n < 1:
        raise NotApplicable(f"({g},{n}) is unstable")
    if (g, n) in ((0, 3), (1, 1)):
        raise NotApplicable(f"({g},{n}) is a base case")
    if sup and g < 1:
        raise NotApplicable("super transforms vanish in genus 0")


def _first_terms(g: int, n: int, sup: bool, table) -> tuple[SparsePoly, SparsePoly]:
    """``A1 = d2 F_{g-1,n+1}(u,v,..)|_{u=v=t1}`` and ``A2 = sum dF dF`` over ordered splits."""
    A1 = SparsePoly.zero(n)
    if g >= 1 and is_stable(g - 1, n + 1) and not (sup and g - 1 == 0):
        F = transform(g - 1, n + 1, sup, table).poly
        A1 = F.diff(0).diff(1).merge_vars(0, 1)
    A2 = SparsePoly.zero(n)
    for g1, I, g2, J in _splittings(g, n, min_genus=1 if sup else 0):
        P = _dF(g1, len(I) + 1, sup, table).embed(n, [0] + I)
        Q = _dF(g2, len(J) + 1, sup, table).embed(n, [0] + J)
        A2 = A2 + P * Q
    return A1, A2


def _j_parts(g: int, n: int, sup: bool, table):
    """Yield ``(j, D_j, h)``: ``D_j = dF_{g,n-1}(t_1, ...)`` lifted with slot ``j`` free."""
    if n < 2 or not is_stable(g, n - 1):
        return
    h = _dF(g, n - 1, sup, table)
    for j in range(1, n):
        yield j, h.insert_var(j)


def _tj(n: int, j: int) -> SparsePoly:
    return SparsePoly.variable(n, j)


def _pole_depth(*polys: SparsePoly) -> int:
    return max((-p.min_degree_in(0) for p in polys if p), default=0)


def _with_retry(build, depth: int, name: str) -> CheckResult:
    K = depth + 2
    for _ in range(6):
        try:
            passed, detail = build(K)
            return CheckResult(name, passed, {"K": K, **detail})
        except InsufficientTruncation:
            K *= 2
    raise InsufficientTruncation(f"{name}: no truncation order up to {K} suffices")


def check_laplace_original(g: int, n: int, table: VolumeTable | None = None) -> CheckResult:
    """``-t1 dF/dt1 = Pr[csc/2 (A1 + A2) - sum_j csc t_j dF(t1,..)/(t_j^2 - t1^2)]``.

    ``csc`` denotes ``2 pi / sin(2 pi t1)``.
    """
    _require_recursive(g, n)
    table = _table(table)
    F = transform(g, n, False, table).poly
    lhs = -(F.diff(0).mul_monomial((1,) + (0,) * (n - 1)))
    A1, A2 = _first_terms(g, n, False, table)
    parts = list(_j_parts(g, n, False, table))
    depth = _pole_depth(A1, A2, *(D for _, D in parts)) + 1

    def build(K):
        csc = kernel_series("csc", K, n)
        rhs = csc * LaurentObject(A1 + A2) * Fraction(1, 2)
        for j, D in parts:
            rhs = rhs - csc * expand_pole(n, j, K) * LaurentObject(D * _tj(n, j))
        return pr_part(rhs).poly == lhs, {}

    return _with_retry(build, depth, "laplace_original")


def check_laplace_new(g: int, n: int, table: VolumeTable | None = None) -> CheckResult:
    """``-Pr[sin(2 pi t1)/(2 pi) dF/dt1] = (A1 + A2)/(2 t1) - sum_j Q_j``.

    ``Q_j`` is the exact two-sided quotient ``(t_j D(t1)/t1 - t1 D(t_j)/t_j)/(t_j^2 - t1^2)``.
    """
    _require_recursive(g, n)
    table = _table(table)
    dF = transform(g, n, False, table).poly.diff(0)
    A1, A2 = _first_terms(g, n, False, table)
    inv_t1 = (-1,) + (0,) * (n - 1)
    rhs = (A1 + A2).mul_monomial(inv_t1) * Fraction(1, 2)
    if n >= 2 and is_stable(g, n - 1):
        h = _dF(g, n - 1, False, table)
        for j in range(1, n):
            rhs = rhs - two_sided_quotient(h.insert_var(j), j)

    def build(K):
        lhs = -pr_part(kernel_series("sin", K, n) * LaurentObject(dF)).poly
        return lhs == rhs, {}

    return _with_retry(build, _pole_depth(dF), "laplace_new")


def check_toprec(g: int, n: int, table: VolumeTable | None = None) -> CheckResult:
    """``W_{g,n} = Res_s pi/((t1^2 - s^2) sin 2 pi s) [W_{g-1,n+1}(s,-s,..) + sum W W]``.

    Works in slots ``(s, t_1, ..., t_n)``; the split sum includes ``W_{0,2}``.
    """
    _require_recursive(g, n)
    table = _table(table)
    N = n + 1
    target = w_transform(transform(g, n, False, table)).poly

    def W(gg, nn):
        return w_transform(transform(gg, nn, False, table)).poly

    exact = SparsePoly.zero(N)
    if g >= 1 and is_stable(g - 1, n + 1):
        exact = exact + W(g - 1, n + 1).negate_var(1).embed(N, [0, 0] + list(range(2, n + 1)))
    for g1, I, g2, J in _splittings(g, n):
        P = W(g1, len(I) + 1).embed(N, [0] + [i + 1 for i in I])
        Q = W(g2, len(J) + 1).negate_var(0).embed(N, [0] + [i + 1 for i in J])
        exact = exact + P * Q
    # splits with one unstable (0,2) factor
    partner = []
    if n >= 2 and is_stable(g, n - 1):
        Wp = W(g, n - 1)
        for j in range(2, n + 1):
            rest = [k for k in range(2, n + 1) if k != j]
            partner.append((j, Wp.embed(N, [0] + rest)))
    depth = _pole_depth(exact, *(P for _, P in partner))

    def build(K):
        bracket = LaurentObject(exact)
        for j, P in partner:
            lifted = LaurentObject(P)
            bracket = bracket + w02_series(N, 0, j, K) * LaurentObject(P.negate_var(0))
            bracket = bracket + lifted * w02_series(N, 0, j, K, sign=-1)
        kernel = kernel_series("csc", K, N) * expand_pole(N, 1, K) * Fraction(1, 2)
        res = residue(kernel * bracket)
        return res == target, {}

    return _with_retry(build, depth, "toprec")


def check_super_laplace(g: int, n: int, form: str = "original", table: VolumeTable | None = None,
                        sign: int = 1) -> CheckResult:
    """Laplace form of the super recursion.

    ``original``: ``dF/dt1 = sign/4 Pr[sec (A1 + A2) - 4 sum_j sec t_j D_j/(t_j^2 - t1^2)]``.

    ``new``: ``-Pr[cos(2 pi t1) dF/dt1] = sign (-(A1 + A2)/4 + sum_j Pr[t_j D_j(t1)/(t_j^2 - t1^2)
    + t1 D_j(t_j)/(t1^2 - t_j^2)])``.

    ``sign=1`` is the orientation consistent with ``V^su_{1,1} = 1/8`` and
    the sech kernel; ``sign=-1`` flips the whole right-hand side.
    """
    if form not in ("original", "new"):
        raise ValueError(f"unknown form {form!r}")
    _require_recursive(g, n, sup=True)
    table = _table(table)
    dF = transform(g, n, True, table).poly.diff(0)
    A1, A2 = _first_terms(g, n, True, table)
    parts = list(_j_parts(g, n, True, table))
    h = _dF(g, n - 1, True, table) if parts else None
    depth = _pole_depth(dF, A1, A2, *(D for _, D in parts))

    if form == "original":
        def build(K):
            sec = kernel_series("sec", K, n)
            inner = sec * LaurentObject(A1 + A2)
            for j, D in parts:
                inner = inner - sec * expand_pole(n, j, K) * LaurentObject(D * _tj(n, j)) * 4
            rhs = pr_part(inner).poly * Fraction(sign, 4)
            return dF == rhs, {}
    else:
        def build(K):
            lhs = -pr_part(kernel_series("cos", K, n) * LaurentObject(dF)).poly
            jsum = LaurentObject(SparsePoly.zero(n), 0, None)
            for j, D in parts:
                other = [k for k in range(1, n) if k != j]
                Dj = h.embed(n, [j] + other)  # first argument t_j
                pole = expand_pole(n, j, K)
                jsum = jsum + pole * LaurentObject(D * _tj(n, j))
                # t1 D(t_j) / (t1^2 - t_j^2) = -t1 D(t_j) / (t_j^2 - t1^2)
                jsum = jsum - pole * LaurentObject(Dj.mul_monomial((1,) + (0,) * (n - 1)))
            rhs = (A1 + A2) * Fraction(-1, 4) + pr_part(jsum).poly
            return lhs == rhs * sign, {}

    return _with_retry(build, depth, f"super_laplace_{form}")


def check_lemma_laplace_shift(P: SparsePoly, parity: str = "sine", K: int | None = None) -> bool:
    """Transform of a complex-shift combination equals a principal part.

    ``sine``: ``LT([P(L+2 pi i) - P(L-2 pi i)]/(4 pi i)) = Pr(sin(2 pi t)/(2 pi) LT(P))``
    for any polynomial ``P``.
    ``cosine``: ``LT([P(L+2 pi i) + P(L-2 pi i)]/2) = Pr(cos(2 pi t) LT(P))`` for odd ``P``.
    """
    if P.nvars != 1:
        raise ValueError("expected a polynomial in one variable")
    P = MultiPoly(1, P.terms)
    if not P:
        return True
    depth = P.degree_in(0) + 2 if K is None else K
    F = laplace_transform(P)
    if parity == "sine":
        lhs = laplace_transform(_shift_diff_any(P)).poly
        rhs = pr_part(kernel_series("sin", depth) * F).poly
    elif parity == "cosine":
        if not P.is_odd_in(0):
            raise ValueError("cosine form needs an odd polynomial")
        lhs = laplace_transform(_shift_sum_any(P) / 2).poly
        rhs = pr_part(kernel_series("cos", depth) * F).poly
    else:
        raise ValueError(f"unknown parity {parity!r}")
    return lhs == rhs
