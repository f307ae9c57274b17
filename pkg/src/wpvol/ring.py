"""Exact arithmetic in Q[pi^2].

Every volume coefficient produced by the engine is a polynomial in the
symbol ``pi^2`` with rational coefficients.  :class:`RingElem` stores the
coefficient list ``c`` with ``value = sum(c[k] * pi**(2*k))``.

Rationals are :class:`fractions.Fraction`; they are already canonical
(reduced, positive denominator, zero is ``0/1``).
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "Fraction",
    "RingElem",
    "ZERO",
    "ONE",
    "PI2",
    "ring_add",
    "ring_mul",
    "ring_eval_float",
    "format_rational",
    "parse_rational",
]


def format_rational(q: Fraction) -> str:
    """Canonical ``"p/q"`` text (always with a denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(text.strip())


def _trim(coeffs: Iterable[Fraction]) -> tuple[Fraction, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class RingElem:
    """Immutable element of Q[pi^2]."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Sequence = ()):
        object.__setattr__(self, "coeffs", _trim(Fraction(c) for c in coeffs))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    @classmethod
    def _raw(cls, coeffs: tuple[Fraction, ...]) -> "RingElem":
        # coeffs must already be trimmed Fractions
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", coeffs)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def coerce(cls, value) -> "RingElem":
        if isinstance(value, RingElem):
            return value
        if isinstance(value, (int, Rational)):
            return cls((Fraction(value),))
        raise TypeError(f"cannot coerce {type(value).__name__} to RingElem")

    @classmethod
    def pi2_power(cls, k: int, scalar=1) -> "RingElem":
        """``scalar * (pi^2)**k``."""
        return cls([0] * k + [Fraction(scalar)])

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree in pi^2; -1 for zero."""
        return len(self.coeffs) - 1

    def is_rational(self) -> bool:
        return len(self.coeffs) <= 1

    def rational_part(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = RingElem.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RingElem._raw(_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return RingElem._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        try:
            other = RingElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RingElem.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                return ZERO
            f = Fraction(other)
            return RingElem._raw(tuple(c * f for c in self.coeffs))
        if not isinstance(other, RingElem):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZERO
        if len(b) == 1:
            f = b[0]
            return RingElem._raw(tuple(c * f for c in a))
        if len(a) == 1:
            f = a[0]
            return RingElem._raw(tuple(c * f for c in b))
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return RingElem._raw(_trim(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RingElem):
            if not other.is_rational():
                raise ZeroDivisionError("division only by nonzero rational scalars")
            other = other.rational_part()
        if not isinstance(other, (int, Rational)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("division by zero")
        f = Fraction(other)
        return RingElem._raw(tuple(c / f for c in self.coeffs))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)):
            return self.coeffs == RingElem.coerce(other).coeffs
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.coeffs)
            object.__setattr__(self, "_hash", h)
        return h

    # -- evaluation / text -------------------------------------------------
    def eval_float(self, precision: int = 15):
        return ring_eval_float(self, precision)

    def __float__(self):
        return float(ring_eval_float(self, 20))

    def to_canonical(self) -> list:
        """``[[k, "p/q"], ...]`` for the nonzero coefficients."""
        return [[k, format_rational(c)] for k, c in enumerate(self.coeffs) if c]

    @classmethod
    def from_canonical(cls, pairs) -> "RingElem":
        if not pairs:
            return ZERO
        top = max(int(k) for k, _ in pairs)
        coeffs = [Fraction(0)] * (top + 1)
        for k, text in pairs:
            coeffs[int(k)] += parse_rational(text)
        return cls(coeffs)

    def to_text(self, pi_name: str = "pi") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                mono = f"{pi_name}^{2 * k}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"RingElem({self.to_text()})"

    __str__ = to_text


ZERO = RingElem()
ONE = RingElem((1,))
PI2 = RingElem.pi2_power(1)


def ring_add(a: RingElem, b: RingElem) -> RingElem:
    return a + b


def ring_mul(a: RingElem, b: RingElem) -> RingElem:
    return a * b


def ring_eval_float(a: RingElem, precision: int = 15):
    """Evaluate ``a`` with pi taken to ``precision`` decimal digits.

    Returns a :class:`mpmath.mpf` carrying ``precision`` digits (plus guard
    digits); ``float()`` it for double precision work.
    """
    if precision < 15:
        raise ValueError("precision must be >= 15")
    with mpmath.workdps(precision + 10):
        pi2 = mpmath.pi ** 2
        acc = mpmath.mpf(0)
        # Horner in pi^2
        for c in reversed(a.coeffs):
            acc = acc * pi2 + mpmath.mpf(c.numerator) / c.denominator
        return +acc
