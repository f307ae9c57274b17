"""Sparse multivariate polynomials over Q[pi^2] and the operators the
volume recursions are built from.

Variables are addressed by slot index.  For a volume ``V_{g,n}`` slot ``i``
holds ``L_{i+1}``; the first slot (``L_1``) is the distinguished boundary.

The complex shifts ``L -> L +- 2 pi i`` are never evaluated numerically.
Both shift operators are finite Taylor sums whose coefficients are powers
of ``(2 pi i)^2 = -4 pi^2`` and so stay inside Q[pi^2].
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

from .ring import ZERO, RingElem

__all__ = [
    "SparsePoly",
    "MultiPoly",
    "ParityError",
    "InconsistentSystemError",
    "shift_diff_op",
    "shift_sum_op",
    "invert_shift_diff",
    "invert_shift_sum",
    "double_polygon_integral",
    "double_polygon_convolution",
    "segment_integral",
    "segment_convolution_integral",
    "pair_interval_integral",
    "eval_at_2pi_i",
]


class ParityError(ValueError):
    """Polynomial does not have the parity an operator requires."""


class InconsistentSystemError(ArithmeticError):
    """A triangular solve left a nonzero residual."""


@lru_cache(maxsize=None)
def minus_4pi2_pow(j: int) -> RingElem:
    """``(2 pi i)^(2j) = (-4 pi^2)^j``."""
    return RingElem.pi2_power(j, (-4) ** j)


def _as_ring(c) -> RingElem:
    return c if isinstance(c, RingElem) else RingElem.coerce(c)


class SparsePoly:
    """Sparse polynomial with integer exponent vectors of fixed length.

    Exponents may be negative here; :class:`MultiPoly` restricts them to be
    nonnegative.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        self.nvars = nvars
        clean: dict[tuple[int, ...], RingElem] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has wrong length for {nvars} variables")
            self._check_exp(exp)
            c = _as_ring(c)
            if exp in clean:
                c = clean[exp] + c
            if c:
                clean[exp] = c
            else:
                clean.pop(exp, None)
        self.terms = clean

    @staticmethod
    def _check_exp(exp: tuple[int, ...]) -> None:
        pass

    @classmethod
    def _raw(cls, nvars: int, terms: dict):
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c=1):
        c = _as_ring(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def monomial(cls, nvars: int, exp: Sequence[int], c=1):
        return cls(nvars, {tuple(exp): c})

    @classmethod
    def variable(cls, nvars: int, i: int, c=1):
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): c})

    # -- inspection -------------------------------------------------------
    def __iter__(self) -> Iterator[tuple[tuple[int, ...], RingElem]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, exp: Sequence[int]) -> RingElem:
        return self.terms.get(tuple(exp), ZERO)

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")

    def degree_in(self, i: int) -> int:
        self._check_index(i)
        return max((e[i] for e in self.terms), default=-1)

    def min_degree_in(self, i: int) -> int | None:
        self._check_index(i)
        return min((e[i] for e in self.terms), default=None)

    def total_degree(self) -> int:
        """Maximal exponent sum (pi^2 carries no degree); -1 for zero."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_part(self, d: int):
        return type(self)._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def is_even_in(self, i: int) -> bool:
        self._check_index(i)
        return all(e[i] % 2 == 0 for e in self.terms)

    def is_odd_in(self, i: int) -> bool:
        self._check_index(i)
        return all(e[i] % 2 == 1 for e in self.terms)

    def is_even(self) -> bool:
        return all(x % 2 == 0 for e in self.terms for x in e)

    def is_symmetric(self, slots: Sequence[int] | None = None) -> bool:
        """Invariance under every permutation of ``slots`` (default: all).

        A transposition and a full cycle generate the symmetric group, so
        checking those two suffices.
        """
        slots = list(range(self.nvars)) if slots is None else list(slots)
        if len(slots) < 2:
            return True
        swap = {slots[0]: slots[1], slots[1]: slots[0]}
        cycle = {slots[k]: slots[(k + 1) % len(slots)] for k in range(len(slots))}
        for gen in (swap, cycle):
            for e, c in self.terms.items():
                f = list(e)
                for src, dst in gen.items():
                    f[dst] = e[src]
                if self.terms.get(tuple(f)) != c:
                    return False
        return True

    def is_pi_free(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    # -- arithmetic -------------------------------------------------------
    def _check_compat(self, other: "SparsePoly") -> None:
        if other.nvars != self.nvars:
            raise ValueError(f"incompatible variable counts {self.nvars} and {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            if isinstance(other, (int, Rational, RingElem)):
                other = type(self).constant(self.nvars, other)
            else:
                return NotImplemented
        self._check_compat(other)
        if len(self.terms) < len(other.terms):
            small, big = self.terms, other.terms
        else:
            small, big = other.terms, self.terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return type(self)._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Rational, RingElem)):
            other = type(self).constant(self.nvars, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SparsePoly":
        c = _as_ring(c)
        if not c:
            return type(self).zero(self.nvars)
        out = {}
        for e, v in self.terms.items():
            p = v * c
            if p:
                out[e] = p
        return type(self)._raw(self.nvars, out)

    def __mul__(self, other):
        if isinstance(other, (int, Rational, RingElem)):
            return self.scale(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check_compat(other)
        out: dict[tuple[int, ...], RingElem] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                s = out.get(e)
                out[e] = p if s is None else s + p
        return type(self)._raw(self.nvars, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, RingElem)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = type(self).constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Rational, RingElem)):
            return self.terms == type(self).constant(self.nvars, other).terms
        return NotImplemented

    __hash__ = None

    def mul_monomial(self, exp: Sequence[int], c=1):
        c = _as_ring(c)
        if not c:
            return type(self).zero(self.nvars)
        return type(self)._raw(
            self.nvars, {tuple(a + b for a, b in zip(e, exp)): v * c for e, v in self.terms.items()}
        )

    # -- calculus / structural maps ---------------------------------------
    def diff(self, i: int, times: int = 1):
        self._check_index(i)
        p = self
        for _ in range(times):
            out = {}
            for e, c in p.terms.items():
                k = e[i]
                if k == 0:
                    continue
                f = list(e)
                f[i] = k - 1
                out[tuple(f)] = c * k
            p = type(self)._raw(self.nvars, out)
        return p

    def permute(self, perm: Sequence[int]):
        """Move variable ``i`` to slot ``perm[i]``."""
        if sorted(perm) != list(range(self.nvars)):
            raise ValueError("not a permutation")
        out = {}
        for e, c in self.terms.items():
            f = [0] * self.nvars
            for i, k in enumerate(e):
                f[perm[i]] = k
            out[tuple(f)] = c
        return type(self)._raw(self.nvars, out)

    def embed(self, nvars: int, mapping: Sequence[int]):
        """Re-home into ``nvars`` variables; variable ``i`` goes to slot ``mapping[i]``.

        Slots hit twice have their exponents added (a diagonal restriction).
        """
        if len(mapping) != self.nvars:
            raise ValueError("mapping length must equal nvars")
        for m in mapping:
            if not 0 <= m < nvars:
                raise IndexError(f"target slot {m} out of range")
        out: dict = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, k in enumerate(e):
                f[mapping[i]] += k
            f = tuple(f)
            s = out.get(f)
            out[f] = c if s is None else s + c
        return type(self)._raw(nvars, {e: c for e, c in out.items() if c})

    def insert_var(self, pos: int):
        """Add a fresh variable (absent from every term) at slot ``pos``."""
        if not 0 <= pos <= self.nvars:
            raise IndexError(f"insert position {pos} out of range")
        mapping = [i if i < pos else i + 1 for i in range(self.nvars)]
        return self.embed(self.nvars + 1, mapping)

    def drop_var(self, i: int):
        """Remove slot ``i``; every term must have exponent 0 there."""
        self._check_index(i)
        out = {}
        for e, c in self.terms.items():
            if e[i] != 0:
                raise ValueError(f"variable {i} still present")
            out[e[:i] + e[i + 1:]] = c
        return type(self)._raw(self.nvars - 1, out)

    def merge_vars(self, i: int, j: int):
        """Set variable ``j`` equal to variable ``i`` and drop slot ``j``."""
        self._check_index(i)
        self._check_index(j)
        if i == j:
            raise ValueError("cannot merge a variable with itself")
        mapping = []
        for k in range(self.nvars):
            src = i if k == j else k
            mapping.append(src if src < j else src - 1)
        return self.embed(self.nvars - 1, mapping)

    def negate_var(self, i: int):
        """Substitute ``x_i -> -x_i``."""
        self._check_index(i)
        return type(self)._raw(
            self.nvars, {e: (-c if e[i] % 2 else c) for e, c in self.terms.items()}
        )

    def substitute(self, i: int, expr: "SparsePoly"):
        """Replace variable ``i`` by the polynomial ``expr`` (same nvars)."""
        self._check_index(i)
        self._check_compat(expr)
        powers = {0: type(self).constant(self.nvars, 1)}
        result = type(self).zero(self.nvars)
        by_power: dict[int, dict] = {}
        for e, c in self.terms.items():
            if e[i] < 0:
                raise ValueError("cannot substitute into a negative power")
            f = list(e)
            f[i] = 0
            by_power.setdefault(e[i], {})[tuple(f)] = c
        for k in sorted(by_power):
            while max(powers) < k:
                m = max(powers)
                powers[m + 1] = powers[m] * expr
            result = result + type(self)._raw(self.nvars, by_power[k]) * powers[k]
        return result

    def split_by(self, i: int) -> dict[int, dict[tuple[int, ...], RingElem]]:
        """Group terms as ``{power of x_i: {exponent with x_i zeroed: coef}}``."""
        self._check_index(i)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            f = list(e)
            f[i] = 0
            out.setdefault(e[i], {})[tuple(f)] = c
        return out

    def coefficient_in(self, i: int, k: int):
        """Coefficient of ``x_i^k`` as a polynomial with slot ``i`` zeroed."""
        return type(self)._raw(self.nvars, dict(self.split_by(i).get(k, {})))

    # -- serialization -----------------------------------------------------
    def to_json(self) -> list:
        return [
            {"exp": list(e), "coef": self.terms[e].to_canonical()}
            for e in sorted(self.terms)
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], nvars: int):
        return cls(nvars, {tuple(t["exp"]): RingElem.from_canonical(t["coef"]) for t in data})

    def float_arrays(self):
        """``(exponents, coefficients)`` as numpy arrays for fast evaluation."""
        import numpy as np

        items = sorted(self.terms.items())
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), self.nvars)
        coefs = np.array([float(c) for _, c in items], dtype=float)
        return exps, coefs

    def to_text(self, names: Sequence[str] | None = None) -> str:
        from .render import render_text

        return render_text(self, names)

    def __repr__(self):
        return f"{type(self).__name__}({self.nvars}, {self.to_text()})"


class MultiPoly(SparsePoly):
    """Polynomial in boundary lengths with nonnegative exponents."""

    __slots__ = ()

    @staticmethod
    def _check_exp(exp: tuple[int, ...]) -> None:
        if any(e < 0 for e in exp):
            raise ValueError(f"negative exponent in {exp}")

    def divide_by_var(self, i: int) -> "MultiPoly":
        """Exact division by ``x_i``; fails if some term lacks ``x_i``."""
        self._check_index(i)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                raise ArithmeticError(f"not divisible by variable {i}")
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = c
        return MultiPoly._raw(self.nvars, out)


# ---------------------------------------------------------------------------
# complex-shift operators
# ---------------------------------------------------------------------------


def _shift_diff_any(Q: SparsePoly, var: int = 0) -> SparsePoly:
    """``[Q(x + 2 pi i) - Q(x - 2 pi i)] / (4 pi i)`` in slot ``var``, any parity."""
    out: dict = {}
    for e, c in Q.terms.items():
        m = e[var]
        if m < 0:
            raise ValueError("shift operators need nonnegative exponents")
        f = list(e)
        for j in range((m - 1) // 2 + 1):
            f[var] = m - 2 * j - 1
            key = tuple(f)
            term = c * minus_4pi2_pow(j) * comb(m, 2 * j + 1)
            s = out.get(key)
            out[key] = term if s is None else s + term
    return type(Q)._raw(Q.nvars, {e: c for e, c in out.items() if c})


def _shift_sum_any(Q: SparsePoly, var: int = 0) -> SparsePoly:
    """``Q(x + 2 pi i) + Q(x - 2 pi i)`` in slot ``var``, any parity."""
    out: dict = {}
    for e, c in Q.terms.items():
        m = e[var]
        if m < 0:
            raise ValueError("shift operators need nonnegative exponents")
        f = list(e)
        for j in range(m // 2 + 1):
            f[var] = m - 2 * j
            key = tuple(f)
            term = c * minus_4pi2_pow(j) * (2 * comb(m, 2 * j))
            s = out.get(key)
            out[key] = term if s is None else s + term
    return type(Q)._raw(Q.nvars, {e: c for e, c in out.items() if c})


def shift_diff_op(Q: SparsePoly, var: int = 0) -> SparsePoly:
    """Symmetric difference quotient ``[Q(L+2 pi i) - Q(L-2 pi i)]/(4 pi i)``.

    ``Q`` must be odd in ``var``; the result is even there and one degree lower.
    """
    if not Q.is_odd_in(var):
        raise ParityError("shift_diff_op needs a polynomial odd in the shifted variable")
    return _shift_diff_any(Q, var)


def shift_sum_op(Q: SparsePoly, var: int = 0) -> SparsePoly:
    """``Q(L+2 pi i) + Q(L-2 pi i)`` for ``Q`` odd in ``var``."""
    if not Q.is_odd_in(var):
        raise ParityError("shift_sum_op needs a polynomial odd in the shifted variable")
    return _shift_sum_any(Q, var)


def _triangular_solve(R: SparsePoly, var: int, kind: str) -> SparsePoly:
    out: dict = {}
    for rest, column in _columns(R, var):
        col = dict(column)  # power -> RingElem, mutated below
        while col:
            top = max(col)
            c = col.pop(top)
            if kind == "diff":
                m = top + 1
                q = c / m
                # subtract lower-order images of q * x^m
                for j in range(1, (m - 1) // 2 + 1):
                    p = m - 2 * j - 1
                    col[p] = col.get(p, ZERO) - q * minus_4pi2_pow(j) * comb(m, 2 * j + 1)
                    if not col[p]:
                        del col[p]
            else:
                m = top
                q = c / 2
                for j in range(1, m // 2 + 1):
                    p = m - 2 * j
                    col[p] = col.get(p, ZERO) - q * minus_4pi2_pow(j) * (2 * comb(m, 2 * j))
                    if not col[p]:
                        del col[p]
            f = list(rest)
            f[var] = m
            out[tuple(f)] = q
    return type(R)._raw(R.nvars, out)


def _columns(R: SparsePoly, var: int):
    cols: dict[tuple[int, ...], dict[int, RingElem]] = {}
    for e, c in R.terms.items():
        f = list(e)
        f[var] = 0
        cols.setdefault(tuple(f), {})[e[var]] = c
    return cols.items()


def invert_shift_diff(R: SparsePoly, var: int = 0) -> SparsePoly:
    """Unique ``Q`` odd in ``var`` with ``shift_diff_op(Q) == R``.

    Solved top degree first; the forward operator is re-applied and must
    reproduce ``R`` exactly.
    """
    if not R.is_even_in(var):
        raise ParityError("invert_shift_diff needs a polynomial even in the shifted variable")
    Q = _triangular_solve(R, var, "diff")
    if shift_diff_op(Q, var) != R:
        raise InconsistentSystemError("shift_diff_op(Q) does not reproduce the right-hand side")
    return Q


def invert_shift_sum(R: SparsePoly, var: int = 0) -> SparsePoly:
    """Unique ``Q`` odd in ``var`` with ``shift_sum_op(Q) == R``."""
    if not R.is_odd_in(var):
        raise ParityError("invert_shift_sum needs a polynomial odd in the shifted variable")
    Q = _triangular_solve(R, var, "sum")
    if shift_sum_op(Q, var) != R:
        raise InconsistentSystemError("shift_sum_op(Q) does not reproduce the right-hand side")
    return Q


# ---------------------------------------------------------------------------
# closed-form integrals
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _beta(p: int, q: int) -> Fraction:
    """``int_0^1 x^p (1-x)^q dx = p! q! / (p+q+1)!``."""
    return Fraction(factorial(p) * factorial(q), factorial(p + q + 1))


def double_polygon_integral(P: MultiPoly) -> MultiPoly:
    """``iint_{x,y>=0, x+y<=L} P(x, y, S) x y dx dy`` for ``P`` in ``(x, y, S...)``.

    Result lives in ``(L, S...)``: the monomial ``x^a y^b`` becomes
    ``(a+1)!(b+1)!/(a+b+4)! L^(a+b+4)``.
    """
    if P.nvars < 2:
        raise ValueError("double_polygon_integral needs at least two variables")
    out: dict = {}
    for e, c in P.terms.items():
        a, b = e[0] + 1, e[1] + 1
        w = Fraction(factorial(a) * factorial(b), factorial(a + b + 2))
        key = (a + b + 2,) + e[2:]
        term = c * w
        s = out.get(key)
        out[key] = term if s is None else s + term
    return MultiPoly._raw(P.nvars - 1, {e: c for e, c in out.items() if c})


def segment_integral(P: MultiPoly) -> MultiPoly:
    """``int_0^L P(x, L - x, S) x (L - x) dx`` for ``P`` in ``(x, y, S...)``."""
    if P.nvars < 2:
        raise ValueError("segment_integral needs at least two variables")
    out: dict = {}
    for e, c in P.terms.items():
        a, b = e[0] + 1, e[1] + 1
        key = (a + b + 1,) + e[2:]
        term = c * _beta(a, b)
        s = out.get(key)
        out[key] = term if s is None else s + term
    return MultiPoly._raw(P.nvars - 1, {e: c for e, c in out.items() if c})


def _pair_product(P1: MultiPoly, P2: MultiPoly) -> MultiPoly:
    if P1.nvars != P2.nvars:
        raise ValueError("factors must share the spectator layout")
    return P1.insert_var(1) * P2.insert_var(0)


def double_polygon_convolution(P1: MultiPoly, P2: MultiPoly) -> MultiPoly:
    """``iint_{x+y<=L} P1(x, S) P2(y, S) x y``; both factors in ``(first, S...)``."""
    return double_polygon_integral(_pair_product(P1, P2))


def segment_convolution_integral(P1: MultiPoly, P2: MultiPoly) -> MultiPoly:
    """``int_0^L P1(x, S) P2(L - x, S) x (L - x) dx``; both in ``(first, S...)``."""
    return segment_integral(_pair_product(P1, P2))


def pair_interval_integral(P: MultiPoly, j: int) -> MultiPoly:
    """``(int_0^{L+M} + int_0^{L-M}) P(x, S) x dx`` with ``M`` inserted at slot ``j``.

    ``P`` lives in ``(x, S...)``; the result lives in ``(L, ..., M, ...)``
    with ``x`` renamed to ``L`` (slot 0) and ``M`` placed at slot ``j >= 1``.
    Odd powers of ``M`` cancel between the two intervals, so no absolute
    values ever appear.
    """
    if not 1 <= j <= P.nvars:
        raise IndexError(f"slot {j} out of range for insertion")
    out: dict = {}
    for e, c in P.terms.items():
        k = e[0] + 2  # antiderivative of x^(a+1)
        rest = list(e[1:])
        rest.insert(j - 1, 0)
        for m in range(0, k + 1, 2):
            f = [k - m] + rest
            f[j] = m
            key = tuple(f)
            term = c * Fraction(2 * comb(k, m), k)
            s = out.get(key)
            out[key] = term if s is None else s + term
    return MultiPoly._raw(P.nvars + 1, {e: c for e, c in out.items() if c})


def eval_at_2pi_i(P: SparsePoly, parity: str, var: int = 0) -> SparsePoly:
    """Evaluate slot ``var`` at ``2 pi i`` exactly; the slot is dropped.

    ``parity="even"`` returns ``P(2 pi i)``; ``parity="odd"`` returns
    ``P(2 pi i) / (2 pi i)``.  Both are real, with Q[pi^2] coefficients.
    """
    if parity == "even":
        ok, shift = P.is_even_in(var), 0
    elif parity == "odd":
        ok, shift = P.is_odd_in(var), 1
    else:
        raise ValueError(f"unknown parity {parity!r}")
    if not ok:
        raise ParityError(f"polynomial is not purely {parity} in slot {var}")
    out: dict = {}
    for e, c in P.terms.items():
        key = e[:var] + e[var + 1:]
        term = c * minus_4pi2_pow((e[var] - shift) // 2)
        s = out.get(key)
        out[key] = term if s is None else s + term
    return type(P)._raw(P.nvars - 1, {e: c for e, c in out.items() if c})
