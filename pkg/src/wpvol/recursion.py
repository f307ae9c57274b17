"""Memoized volume recursions.

Ordinary volumes solve ``shift_diff_op(L1 * V) = RHS`` and super volumes
solve ``shift_sum_op(L1 * V) = RHS``, where each right-hand side is built
from strictly smaller volumes with closed-form polynomial integrals.
Both are triangular systems, so every volume is exact in Q[pi^2].
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator

from .poly import (
    MultiPoly,
    double_polygon_convolution,
    double_polygon_integral,
    invert_shift_diff,
    invert_shift_sum,
    pair_interval_integral,
    segment_convolution_integral,
    segment_integral,
)
from .ring import RingElem

ENGINE_VERSION = "1"
CACHE_ENV = "WPVOL_CACHE"
DEFAULT_CACHE_NAME = "wpvol_cache.json"

__all__ = [
    "ENGINE_VERSION",
    "VolumeKey",
    "VolumeTable",
    "InvariantError",
    "MissingDependencyError",
    "UnstableError",
    "is_stable",
    "mirzakhani_rhs",
    "super_rhs",
    "compute_volume",
    "compute_super_volume",
    "volume",
    "super_volume",
    "default_table",
    "keys_up_to",
    "default_cache_path",
    "check_self_consistency",
]


class InvariantError(AssertionError):
    """A computed volume violated a structural invariant."""


class MissingDependencyError(KeyError):
    pass


class UnstableError(ValueError):
    def __init__(self, g: int = None, n: int = None):
        super().__init__("unstable: 2g-2+n must be positive")
        self.g, self.n = g, n


def is_stable(g: int, n: int) -> bool:
    if g < 0 or n < 0:
        raise ValueError("g and n must be nonnegative")
    return 2 * g - 2 + n > 0


def keys_up_to(max_dim: int) -> Iterator[tuple[int, int]]:
    """Stable ``(g, n)`` with ``n >= 1`` and ``3g - 3 + n <= max_dim``, by dimension."""
    out = []
    for g in range(max_dim // 3 + 2):
        for n in range(1, max_dim - 3 * g + 4):
            if is_stable(g, n) and 3 * g - 3 + n <= max_dim:
                out.append((g, n))
    out.sort(key=lambda k: (3 * k[0] - 3 + k[1], k[0]))
    return iter(out)


@dataclass(frozen=True, order=True)
class VolumeKey:
    g: int
    n: int
    super: bool = False

    def __post_init__(self):
        if self.g < 0 or self.n < 1:
            raise ValueError(f"invalid key g={self.g}, n={self.n}")

    def text(self) -> str:
        return f"{self.g},{self.n},{int(self.super)}"

    @classmethod
    def parse(cls, text: str) -> "VolumeKey":
        g, n, s = text.split(",")
        return cls(int(g), int(n), bool(int(s)))


def default_cache_path() -> Path:
    return Path(os.environ.get(CACHE_ENV, DEFAULT_CACHE_NAME))


def _check_invariants(key: VolumeKey, V: MultiPoly) -> None:
    if V.nvars != key.n:
        raise InvariantError(f"{key}: expected {key.n} variables, got {V.nvars}")
    if not V.is_even():
        raise InvariantError(f"{key}: odd exponent present")
    if not V.is_symmetric():
        raise InvariantError(f"{key}: not symmetric in the boundary lengths")
    if key.super:
        return
    deg = 6 * key.g - 6 + 2 * key.n
    if V.total_degree() != deg:
        raise InvariantError(f"{key}: total degree {V.total_degree()}, expected {deg}")
    for e, c in V.terms.items():
        if any(q < 0 for q in c.coeffs):
            raise InvariantError(f"{key}: negative coefficient at {e}")


class VolumeTable:
    """Map ``VolumeKey -> MultiPoly`` with an optional JSON backing file.

    A key is published only after its invariants pass.  Entries loaded from
    disk are re-checked for degree and symmetry before use.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._data: dict[VolumeKey, MultiPoly] = {}
        self._lock = threading.RLock()
        self.loaded_from_cache = 0
        self.cache_state = "none"
        if self.path is not None:
            self._load()

    # -- mapping protocol -------------------------------------------------
    def __contains__(self, key: VolumeKey) -> bool:
        return key in self._data

    def __len__(self) -> int:
        return len(self._data)

    def keys(self):
        return sorted(self._data)

    def get(self, key: VolumeKey) -> MultiPoly | None:
        return self._data.get(key)

    def require(self, key: VolumeKey) -> MultiPoly:
        try:
            return self._data[key]
        except KeyError:
            raise MissingDependencyError(f"volume {key.text()} not in table") from None

    def put(self, key: VolumeKey, V: MultiPoly) -> None:
        _check_invariants(key, V)
        with self._lock:
            self._data.setdefault(key, V)

    # -- persistence ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "version": ENGINE_VERSION,
            "volumes": {k.text(): self._data[k].to_json() for k in sorted(self._data)},
        }

    def save(self, path: str | os.PathLike | None = None) -> None:
        target = Path(path) if path is not None else self.path
        if target is None:
            raise ValueError("no cache path configured")
        with self._lock:
            text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        tmp = target.with_name(target.name + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, target)

    def _load(self) -> None:
        if not self.path.exists():
            self.cache_state = "cold"
            return
        try:
            data = json.loads(self.path.read_text())
        except (OSError, json.JSONDecodeError):
            self.cache_state = "corrupt"
            return
        if data.get("version") != ENGINE_VERSION:
            self.cache_state = "stale"
            return
        for text, terms in data.get("volumes", {}).items():
            key = VolumeKey.parse(text)
            V = MultiPoly.from_json(terms, key.n)
            # cheap spot check; a failure drops the whole cache
            deg_ok = key.super or V.total_degree() == 6 * key.g - 6 + 2 * key.n
            if not (deg_ok and V.is_symmetric()):
                self._data.clear()
                self.cache_state = "invalid"
                return
            self._data[key] = V
        self.loaded_from_cache = len(self._data)
        self.cache_state = "warm"


_DEFAULT = VolumeTable()


def default_table() -> VolumeTable:
    return _DEFAULT


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------


def _factor(table: VolumeTable, g: int, slots: list[int], n: int, sup: bool) -> MultiPoly:
    """``V_{g, |slots|+1}(x, L_slots)`` laid out in ``(x, L_2..L_n)``."""
    V = table.require(VolumeKey(g, len(slots) + 1, sup))
    return V.embed(n, [0] + slots)


def _splittings(g: int, n: int, min_genus: int = 0):
    """Ordered ``(g1, I), (g2, J)`` with ``I`` ⊔ ``J`` = slots 1..n-1, both stable."""
    others = list(range(1, n))
    for g1 in range(min_genus, g - min_genus + 1):
        g2 = g - g1
        for mask in range(1 << len(others)):
            I = [s for b, s in enumerate(others) if mask >> b & 1]
            J = [s for b, s in enumerate(others) if not mask >> b & 1]
            if is_stable(g1, len(I) + 1) and is_stable(g2, len(J) + 1):
                yield g1, I, g2, J


def _validate_recursive(g: int, n: int) -> None:
    if not is_stable(g, n):
        raise UnstableError(g, n)
    if (g, n) in ((0, 3), (1, 1)):
        raise ValueError(f"({g},{n}) is a base case")


def mirzakhani_rhs(g: int, n: int, table: VolumeTable) -> MultiPoly:
    """Right-hand side of the shift-difference recursion for ``V_{g,n}``.

    Even in ``L1``; every needed smaller volume must already be in ``table``.
    """
    _validate_recursive(g, n)
    half = Fraction(1, 2)
    rhs = MultiPoly.zero(n)
    if g >= 1 and is_stable(g - 1, n + 1):
        rhs = rhs + double_polygon_integral(table.require(VolumeKey(g - 1, n + 1))) * half
    split = MultiPoly.zero(n)
    for g1, I, g2, J in _splittings(g, n):
        split = split + double_polygon_convolution(
            _factor(table, g1, I, n, False), _factor(table, g2, J, n, False)
        )
    rhs = rhs + split * half
    if n >= 2 and is_stable(g, n - 1):
        Vp = table.require(VolumeKey(g, n - 1))
        pairs = MultiPoly.zero(n)
        for j in range(1, n):
            pairs = pairs + pair_interval_integral(Vp, j)
        rhs = rhs + pairs * half
    return rhs


def super_rhs(g: int, n: int, table: VolumeTable) -> MultiPoly:
    """Right-hand side of the shift-sum recursion for ``V^su_{g,n}``; odd in ``L1``."""
    _validate_recursive(g, n)
    if g < 1:
        raise ValueError("super recursion needs g >= 1")
    minus_half = Fraction(-1, 2)
    rhs = MultiPoly.zero(n)
    # genus-0 super volumes vanish, so term 1 needs g >= 2
    if g >= 2:
        rhs = rhs + segment_integral(table.require(VolumeKey(g - 1, n + 1, True))) * minus_half
    split = MultiPoly.zero(n)
    for g1, I, g2, J in _splittings(g, n, min_genus=1):
        split = split + segment_convolution_integral(
            _factor(table, g1, I, n, True), _factor(table, g2, J, n, True)
        )
    rhs = rhs + split * minus_half
    if n >= 2 and is_stable(g, n - 1):
        Vp = table.require(VolumeKey(g, n - 1, True))
        L1 = MultiPoly.variable(n, 0)
        for j in range(1, n):
            Lj = MultiPoly.variable(n, j)
            lifted = Vp.insert_var(j)
            for shifted in (L1 + Lj, L1 - Lj):
                rhs = rhs - lifted.substitute(0, shifted) * shifted
    return rhs


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------


def _v11() -> MultiPoly:
    return MultiPoly(1, {(2,): Fraction(1, 48), (0,): RingElem.pi2_power(1, Fraction(1, 12))})


def _dependencies(g: int, n: int, sup: bool) -> list[tuple[int, int]]:
    deps = []
    if g >= 1 and is_stable(g - 1, n + 1):
        deps.append((g - 1, n + 1))
    for g1 in range(g + 1):
        for k in range(n):  # |I| = k
            if is_stable(g1, k + 1) and is_stable(g - g1, n - k):
                deps.append((g1, k + 1))
    if n >= 2 and is_stable(g, n - 1):
        deps.append((g, n - 1))
    if sup:
        deps = [d for d in deps if d[0] >= 1]
    return deps


def _ensure(g: int, n: int, sup: bool, table: VolumeTable) -> MultiPoly:
    # iterative post-order walk keeps deep tables off the Python stack
    stack = [(g, n)]
    while stack:
        gg, nn = stack[-1]
        key = VolumeKey(gg, nn, sup)
        if key in table:
            stack.pop()
            continue
        missing = [d for d in _dependencies(gg, nn, sup) if VolumeKey(*d, sup) not in table]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        table.put(key, _solve(gg, nn, sup, table))
    return table.require(VolumeKey(g, n, sup))


def _solve(g: int, n: int, sup: bool, table: VolumeTable) -> MultiPoly:
    if sup:
        if g == 0:
            return MultiPoly.zero(n)
        if (g, n) == (1, 1):
            return MultiPoly.constant(1, Fraction(1, 8))
        Q = invert_shift_sum(super_rhs(g, n, table))
    else:
        if (g, n) == (0, 3):
            return MultiPoly.constant(3, 1)
        if (g, n) == (1, 1):
            return _v11()
        Q = invert_shift_diff(mirzakhani_rhs(g, n, table))
    try:
        return Q.divide_by_var(0)
    except ArithmeticError as exc:
        raise InvariantError(f"({g},{n}): L1 does not divide the solved polynomial") from exc


def compute_volume(g: int, n: int, table: VolumeTable | None = None) -> MultiPoly:
    """Weil-Petersson volume ``V_{g,n}(L_1, ..., L_n)`` (half convention for (1,1))."""
    if not is_stable(g, n):
        raise UnstableError(g, n)
    if n < 1:
        raise ValueError("at least one boundary is required")
    return _ensure(g, n, False, _DEFAULT if table is None else table)


def compute_super_volume(g: int, n: int, table: VolumeTable | None = None) -> MultiPoly:
    """Super volume ``V^su_{g,n}``; identically zero in genus 0."""
    if not is_stable(g, n):
        raise UnstableError(g, n)
    if n < 1:
        raise ValueError("at least one boundary is required")
    return _ensure(g, n, True, _DEFAULT if table is None else table)


def volume(g: int, n: int, super: bool = False, table: VolumeTable | None = None) -> MultiPoly:
    return (compute_super_volume if super else compute_volume)(g, n, table)


def super_volume(g: int, n: int, table: VolumeTable | None = None) -> MultiPoly:
    return compute_super_volume(g, n, table)


def check_self_consistency(g: int, n: int, super: bool = False, table: VolumeTable | None = None) -> bool:
    """Apply the forward shift operator to ``L1 * V`` and compare with the right-hand side."""
    from .poly import shift_diff_op, shift_sum_op

    table = _DEFAULT if table is None else table
    V = volume(g, n, super, table)
    lifted = V.mul_monomial((1,) + (0,) * (n - 1))
    if super:
        return shift_sum_op(lifted) == super_rhs(g, n, table)
    return shift_diff_op(lifted) == mirzakhani_rhs(g, n, table)
