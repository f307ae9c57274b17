"""Verification suites: every check over every key up to a dimension budget.

Each entry of a report is a plain dict ``{suite, name, key, status, anchor,
detail}`` with ``status`` in ``pass``, ``fail`` or ``skipped``; ``anchor``
names the identity being checked.  Reports contain no timings, so two runs
on the same inputs give identical output.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .checks import CheckResult, NotApplicable
from .identities import (
    admissible_indices,
    check_derivative_relation,
    check_do_norbury,
    check_dvv,
    check_leading_recursion,
    check_second_derivative,
)
from .laplace import (
    check_laplace_new,
    check_laplace_original,
    check_lemma_laplace_shift,
    check_super_laplace,
    check_toprec,
    inverse_laplace_transform,
    transform,
)
from .numeric import (
    check_original_recursion_numeric,
    check_super_recursion_numeric,
    verify_appendix_series,
)
from .poly import MultiPoly
from .recursion import VolumeTable, check_self_consistency, default_table, keys_up_to, volume
from .ring import RingElem

SUITES = ("identities", "laplace", "numeric", "appendix")

ANCHORS = {
    "invariants": "even symmetric polynomial of degree 6g-6+2n",
    "super_invariants": "even symmetric super volume",
    "shift_recursion": "shift-difference volume recursion",
    "super_shift_recursion": "shift-sum super volume recursion",
    "leading_recursion": "top-degree recursion",
    "dvv": "Virasoro (DVV) recursion for psi-class intersections",
    "do_norbury": "value at L1 = 2 pi i",
    "derivative_relation": "first derivative at L1 = 2 pi i",
    "second_derivative": "second derivative at L1 = 2 pi i",
    "transform_roundtrip": "Laplace transform is invertible on polynomials",
    "laplace_original": "Laplace form of the kernel recursion (csc kernel)",
    "laplace_new": "Laplace form of the shift recursion (sine kernel)",
    "toprec": "topological recursion with the csc kernel",
    "super_laplace_original": "Laplace form of the super kernel recursion (sec kernel)",
    "super_laplace_new": "Laplace form of the super shift recursion (cosine kernel)",
    "original_numeric": "quadrature of the logistic-kernel recursion",
    "super_numeric": "quadrature of the sech-kernel recursion",
    "lemma_sine": "transform of the shift difference is Pr(sin * F)",
    "lemma_cosine": "transform of the shift sum is Pr(cos * F)",
    "series_A1a": "kernel integral series, first form",
    "series_A1b": "kernel integral series, second form",
    "series_A2a": "double kernel integral series, variant a",
    "series_A2b": "double kernel integral series, variant b",
    "series_A2c": "double kernel integral series, variant c",
    "series_A2d": "double kernel integral series, variant d",
    "series_A3": "partial fractions of csc",
}

# fixed parameter points for the kernel series identities
A1_POINTS = [(0.5, 0.3), (1.0, 0.7), (2.0, 1.3), (3.0, 0.2), (5.0, 2.1)]
A2_POINTS = [(0.5, 0.3, 0.7), (1.0, 0.7, 0.2), (2.0, 1.3, 0.4), (3.0, 0.2, 1.1), (1.5, 2.1, 0.6)]
A3_POWER_POINTS = [(0.3, p) for p in range(5)]
A3_EVEN_F = [1.0, 0.0, 0.5, 0.0, 0.25]
A3_F_POINTS = [0.2, 0.35, 0.7, 1.3, 2.2]

Entry = dict


def _run_one(suite: str, name: str, key, fn: Callable) -> Entry:
    entry = {"suite": suite, "name": name, "key": key, "anchor": ANCHORS[name.split("[")[0]]}
    try:
        out = fn()
    except NotApplicable as exc:
        entry.update(status="skipped", detail={"reason": str(exc)})
        return entry
    if isinstance(out, CheckResult):
        entry.update(status="pass" if out.passed else "fail", detail=out.detail)
    else:
        entry.update(status="pass" if out else "fail", detail={})
    return entry


def _structural(g: int, n: int, sup: bool, table: VolumeTable) -> bool:
    V = volume(g, n, sup, table)
    ok = V.nvars == n and V.is_even() and V.is_symmetric()
    if not sup:
        ok = ok and V.total_degree() == 6 * g - 6 + 2 * n
    return ok


def _self_consistency(g, n, sup, table):
    if (g, n) in ((0, 3), (1, 1)):
        raise NotApplicable(f"({g},{n}) is a base case")
    if sup and g == 0:
        raise NotApplicable("super volumes vanish in genus 0")
    return check_self_consistency(g, n, sup, table)


def _roundtrip(g, n, sup, table):
    V = volume(g, n, sup, table)
    return inverse_laplace_transform(transform(g, n, sup, table)) == V


def identities_suite(max_dim: int, table: VolumeTable) -> Iterator[Entry]:
    for g, n in keys_up_to(max_dim):
        key = [g, n]
        yield _run_one("identities", "invariants", key, lambda: _structural(g, n, False, table))
        yield _run_one("identities", "super_invariants", key, lambda: _structural(g, n, True, table))
        yield _run_one("identities", "shift_recursion", key, lambda: _self_consistency(g, n, False, table))
        yield _run_one("identities", "super_shift_recursion", key, lambda: _self_consistency(g, n, True, table))
        yield _run_one("identities", "leading_recursion", key, lambda: check_leading_recursion(g, n, table))
        if (g, n) in ((0, 3), (1, 1)):
            yield _run_one("identities", "dvv", key, lambda: check_dvv(g, (0,) * n if g == 0 else (1,), table))
        else:
            for alpha in admissible_indices(g, n):
                name = "dvv[" + ",".join(map(str, alpha)) + "]"
                yield _run_one("identities", name, key, lambda: check_dvv(g, alpha, table))
        yield _run_one("identities", "do_norbury", key, lambda: check_do_norbury(g, n, table))
        yield _run_one("identities", "derivative_relation", key, lambda: check_derivative_relation(g, n, table))
        yield _run_one("identities", "second_derivative", key, lambda: check_second_derivative(g, n, table))


def laplace_suite(max_dim: int, table: VolumeTable) -> Iterator[Entry]:
    for g, n in keys_up_to(max_dim):
        key = [g, n]
        yield _run_one("laplace", "transform_roundtrip", key, lambda: _roundtrip(g, n, False, table))
        yield _run_one("laplace", "laplace_original", key, lambda: check_laplace_original(g, n, table))
        yield _run_one("laplace", "laplace_new", key, lambda: check_laplace_new(g, n, table))
        yield _run_one("laplace", "toprec", key, lambda: check_toprec(g, n, table))
        yield _run_one("laplace", "super_laplace_original", key,
                       lambda: check_super_laplace(g, n, "original", table))
        yield _run_one("laplace", "super_laplace_new", key, lambda: check_super_laplace(g, n, "new", table))


def numeric_suite(max_dim: int, table: VolumeTable, tol: float = 1e-8) -> Iterator[Entry]:
    for g, n in keys_up_to(max_dim):
        key = [g, n]
        yield _run_one("numeric", "original_numeric", key,
                       lambda: check_original_recursion_numeric(g, n, tol=tol, table=table))
        yield _run_one("numeric", "super_numeric", key,
                       lambda: check_super_recursion_numeric(g, n, tol=tol, table=table))


def random_polynomial(rng: random.Random, degree: int, odd: bool = False) -> MultiPoly:
    """One-variable polynomial of exact degree ``degree`` with small rational Q[pi^2] coefficients."""
    terms = {}
    for d in range(degree + 1):
        if odd and d % 2 == 0:
            continue
        if d < degree and rng.random() < 0.3:
            continue
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(rng.randint(1, 3))]
        c = RingElem(coeffs)
        if d == degree and not c:
            c = RingElem([1])
        if c:
            terms[(d,)] = c
    return MultiPoly(1, terms)


def appendix_suite(tol: float = 1e-6, seed: int = 0, count: int = 11) -> Iterator[Entry]:
    rng = random.Random(seed)
    for i in range(count):
        P = random_polynomial(rng, i % 11)
        yield _run_one("appendix", f"lemma_sine[{i}]", None, lambda: check_lemma_laplace_shift(P, "sine"))
    for i in range(count):
        P = random_polynomial(rng, 2 * (i % 5) + 1, odd=True)
        yield _run_one("appendix", f"lemma_cosine[{i}]", None, lambda: check_lemma_laplace_shift(P, "cosine"))
    for which in ("A1a", "A1b"):
        for x, t in A1_POINTS:
            yield _run_one("appendix", f"series_{which}", None,
                           lambda: verify_appendix_series(which, {"x": x, "t": t}, tol=tol))
    for variant in "abcd":
        for x, t1, t2 in A2_POINTS:
            yield _run_one("appendix", f"series_A2{variant}", None,
                           lambda: verify_appendix_series("A2" + variant, {"x": x, "t1": t1, "t2": t2}, tol=tol))
    for t, p in A3_POWER_POINTS:
        yield _run_one("appendix", "series_A3", None, lambda: verify_appendix_series("A3", {"t": t, "p": p}, tol=tol))
    for t in A3_F_POINTS:
        yield _run_one("appendix", "series_A3", None,
                       lambda: verify_appendix_series("A3", {"t": t, "f": A3_EVEN_F}, tol=tol))


def run_suites(suite: str, max_dim: int, table: VolumeTable | None = None, tol: float = 1e-8) -> list[Entry]:
    """Run ``suite`` (or ``all``) and return the entries in a fixed order."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    table = default_table() if table is None else table
    chosen = SUITES if suite == "all" else (suite,)
    gens: list[Iterable[Entry]] = []
    for s in chosen:
        if s == "identities":
            gens.append(identities_suite(max_dim, table))
        elif s == "laplace":
            gens.append(laplace_suite(max_dim, table))
        elif s == "numeric":
            gens.append(numeric_suite(max_dim, table, tol))
        else:
            gens.append(appendix_suite(max(tol, 1e-6)))
    return [e for gen in gens for e in gen]


def summarize(entries: list[Entry]) -> dict:
    out = {"pass": 0, "fail": 0, "skipped": 0}
    for e in entries:
        out[e["status"]] += 1
    return out
