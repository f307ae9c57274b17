"""Floating-point cross-checks against the original kernel recursions.

The exact polynomials are evaluated in double precision and the kernel
integrals are done by quadrature on ``[0, X]`` with an explicit bound on the
exponentially small tail.  Nothing here feeds back into the exact engine.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .checks import CheckResult, NotApplicable
from .poly import SparsePoly
from .recursion import (
    VolumeTable,
    _splittings,
    compute_super_volume,
    compute_volume,
    default_table,
    is_stable,
)

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "eval_H",
    "eval_Hsu",
    "quad_semi_infinite",
    "poly_evaluator",
    "default_samples",
    "check_original_recursion_numeric",
    "check_super_recursion_numeric",
    "verify_appendix_series",
    "hol_csc_over_power",
]


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for :func:`quad_semi_infinite`.

    ``cutoff=None`` picks ``X`` automatically so that the tail bound falls
    below ``tail_rtol`` times the running estimate.
    """

    cutoff: float | None = None
    panels: int = 8
    rtol: float = 1e-12
    tail_rtol: float = 1e-16
    limit: int = 200


DEFAULT_CONFIG = QuadratureConfig()


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _logistic_neg(z):
    """``1 / (1 + exp(z))`` without overflow."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z > 0
    ez = np.exp(-z[pos])
    out[pos] = ez / (1.0 + ez)
    out[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
    return out


def _sech(z):
    a = np.abs(np.asarray(z, dtype=float))
    e = np.exp(-a)
    return 2.0 * e / (1.0 + e * e)


def eval_H(x, L):
    """``1/(1 + e^((x+L)/2)) + 1/(1 + e^((x-L)/2))``; scalar in, scalar out."""
    x, L = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(L, dtype=float))
    out = _logistic_neg((x + L) / 2) + _logistic_neg((x - L) / 2)
    return float(out) if out.ndim == 0 else out


def eval_Hsu(x, L):
    """``(sech((x+L)/4) - sech((x-L)/4)) / 2``; odd in ``L``."""
    x, L = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(L, dtype=float))
    out = 0.5 * (_sech((x + L) / 4) - _sech((x - L) / 4))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def quad_semi_infinite(
    f: Callable[[float], float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    decay: float = 1.0,
    start: float = 0.0,
) -> tuple[float, float]:
    """``int_0^inf f`` for ``f`` decaying like ``poly * exp(-decay * x)`` beyond ``start``.

    Returns ``(value, error_estimate)``; the estimate adds the panel errors
    and the tail bound ``2 |f(X)| / decay``.
    """
    if decay <= 0:
        raise ValueError("decay rate must be positive")

    def finite(X):
        edges = np.linspace(0.0, X, cfg.panels + 1)
        total = err = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            v, e, *info = integrate.quad(f, a, b, epsabs=0.0, epsrel=cfg.rtol, limit=cfg.limit, full_output=1)
            if len(info) > 1 and info[1] and e > 1e3 * cfg.rtol * max(abs(v), 1e-300):
                raise QuadratureError(f"panel [{a:g}, {b:g}] did not converge: {info[1]}")
            total += v
            err += e
        return total, err

    if cfg.cutoff is not None:
        X = cfg.cutoff
        value, err = finite(X)
        tail = 2.0 * abs(f(X)) / decay
        return value, err + tail
    X = start + 40.0 / decay
    for _ in range(30):
        value, err = finite(X)
        tail = 2.0 * abs(f(X)) / decay
        if tail <= cfg.tail_rtol * max(abs(value), 1e-300) or tail == 0.0:
            return value, err + tail
        X += 20.0 / decay
    raise QuadratureError("tail did not fall below the requested bound")


# ---------------------------------------------------------------------------
# polynomial evaluation
# ---------------------------------------------------------------------------


def poly_evaluator(P: SparsePoly) -> Callable:
    """Vectorised double-precision evaluator ``f(x_0, x_1, ...)``."""
    exps, coefs = P.float_arrays()

    def f(*xs):
        if len(xs) != P.nvars:
            raise ValueError(f"expected {P.nvars} arguments")
        xs = [np.asarray(x, dtype=float) for x in xs]
        shape = np.broadcast(*xs).shape if xs else ()
        acc = np.zeros((len(coefs),) + shape)
        acc[...] = coefs.reshape((-1,) + (1,) * len(shape))
        for i, x in enumerate(xs):
            acc = acc * _powers(x, exps[:, i])
        return acc.sum(axis=0)

    return f


def _powers(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    # x ** k[:, None...] broadcast over the term axis
    return np.power(x[None, ...], k.reshape((-1,) + (1,) * x.ndim))


def _collapse(V: SparsePoly, keep: int, spectators: Sequence[float]):
    """Substitute the spectators; returns ``(exponents of the first keep slots, coefs)``."""
    exps, coefs = V.float_arrays()
    if len(spectators) != V.nvars - keep:
        raise ValueError("wrong number of spectator values")
    w = coefs.copy()
    for i, val in enumerate(spectators):
        w = w * float(val) ** exps[:, keep + i]
    return exps[:, :keep], w


def _segment_profile(V: SparsePoly, spectators: Sequence[float]):
    """``u -> int_0^u V(x, u - x, S) x (u - x) dx`` by Gauss-Legendre (exact for polynomials)."""
    e, w = _collapse(V, 2, spectators)
    deg = int((e[:, 0] + e[:, 1]).max()) + 2 if len(w) else 2
    nodes, weights = np.polynomial.legendre.leggauss(deg // 2 + 2)
    a, b = e[:, 0:1], e[:, 1:2]

    def G(u):
        x = 0.5 * u * (nodes + 1.0)
        y = u - x
        vals = (w[:, None] * x[None, :] ** a * y[None, :] ** b).sum(axis=0) * x * y
        return 0.5 * u * float(np.dot(weights, vals))

    return G


def _pair_profile(V1: SparsePoly, S1, V2: SparsePoly, S2):
    """``u -> int_0^u V1(x, S1) V2(u - x, S2) x (u - x) dx``."""
    e1, w1 = _collapse(V1, 1, S1)
    e2, w2 = _collapse(V2, 1, S2)
    deg = (int(e1.max()) if len(w1) else 0) + (int(e2.max()) if len(w2) else 0) + 2
    nodes, weights = np.polynomial.legendre.leggauss(deg // 2 + 2)

    def G(u):
        x = 0.5 * u * (nodes + 1.0)
        y = u - x
        f1 = (w1[:, None] * x[None, :] ** e1).sum(axis=0)
        f2 = (w2[:, None] * y[None, :] ** e2).sum(axis=0)
        return 0.5 * u * float(np.dot(weights, f1 * f2 * x * y))

    return G


def _univariate(V: SparsePoly, spectators: Sequence[float]) -> np.ndarray:
    """Coefficient vector (ascending) of ``x -> V(x, S)``."""
    e, w = _collapse(V, 1, spectators)
    c = np.zeros(int(e.max()) + 1 if len(w) else 1)
    np.add.at(c, e[:, 0], w)
    return c


def default_samples(n: int, count: int = 3) -> list[tuple[float, ...]]:
    """Generic positive sample points; the first one is deliberately asymmetric."""
    pts = []
    for k in range(count):
        pts.append(tuple(round(0.7 + 0.45 * i + 0.3 * k + 0.11 * (i * k % 3), 4) for i in range(n)))
    return pts


def _table(table):
    return default_table() if table is None else table


def _rel_err(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale else 0.0


def _rhs_terms(g, n, L, table, sup: bool, cfg):
    """Quadrature of the right-hand side; terms sharing a kernel are merged."""
    kernel = eval_Hsu if sup else eval_H
    decay = 0.25 if sup else 0.5
    L1 = L[0]
    vol = compute_super_volume if sup else compute_volume
    total = err = 0.0
    profiles = []
    if g >= 1 and is_stable(g - 1, n + 1) and not (sup and g == 1):
        profiles.append(_segment_profile(vol(g - 1, n + 1, table), L[1:]))
    for g1, I, g2, J in _splittings(g, n, min_genus=1 if sup else 0):
        profiles.append(
            _pair_profile(vol(g1, len(I) + 1, table), [L[i] for i in I], vol(g2, len(J) + 1, table), [L[j] for j in J])
        )
    if profiles:
        v, e = quad_semi_infinite(lambda u: kernel(u, L1) * sum(G(u) for G in profiles), cfg, decay, abs(L1))
        total += 0.5 * v
        err += 0.5 * e
    if n >= 2 and is_stable(g, n - 1):
        Vp = vol(g, n - 1, table)
        weight = 1.0 if sup else 0.5
        pieces = []
        for j in range(1, n):
            rest = [L[k] for k in range(1, n) if k != j]
            pieces.append((_univariate(Vp, rest), L1 + L[j], L1 - L[j]))
        reach = max(max(abs(a), abs(b)) for _, a, b in pieces)

        def f(x):
            acc = 0.0
            for c, a, b in pieces:
                acc += np.polynomial.polynomial.polyval(x, c) * (kernel(x, a) + kernel(x, b))
            return acc * x

        v, e = quad_semi_infinite(f, cfg, decay, reach)
        total += weight * v
        err += weight * e
    return total, err


def _run(name, g, n, samples, tol, table, sup, lhs_poly, cfg):
    rows = []
    ok = True
    for L in samples:
        L = tuple(float(x) for x in L)
        if len(L) != n or min(L) <= 0:
            raise ValueError(f"need {n} strictly positive sample lengths, got {L}")
        lhs = float(poly_evaluator(lhs_poly)(*L))
        rhs, qerr = _rhs_terms(g, n, L, table, sup, cfg)
        rel = _rel_err(lhs, rhs)
        passed = rel <= tol
        ok &= passed
        rows.append({"samples": list(L), "lhs": lhs, "rhs": rhs, "rel_err": rel, "quad_err": qerr, "pass": passed})
    return CheckResult(name, ok, {"key": [g, n], "tol": tol, "rows": rows})


def check_original_recursion_numeric(
    g: int,
    n: int,
    L_samples: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-8,
    table: VolumeTable | None = None,
    volume: SparsePoly | None = None,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckResult:
    """``d/dL1 (L1 V_{g,n})`` against quadrature of the three kernel integrals.

    ``volume`` overrides the left-hand polynomial (used for mutation tests).
    """
    if not is_stable(g, n) or (g, n) in ((0, 3), (1, 1)):
        raise NotApplicable(f"({g},{n}) is a base case or unstable")
    table = _table(table)
    V = compute_volume(g, n, table) if volume is None else volume
    lhs_poly = V.mul_monomial((1,) + (0,) * (n - 1)).diff(0)
    samples = default_samples(n) if L_samples is None else L_samples
    return _run("original_recursion_numeric", g, n, samples, tol, table, False, lhs_poly, cfg)


def check_super_recursion_numeric(
    g: int,
    n: int,
    L_samples: Sequence[Sequence[float]] | None = None,
    tol: float = 1e-8,
    table: VolumeTable | None = None,
    volume: SparsePoly | None = None,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> CheckResult:
    """``4 pi L1 V^su_{g,n}`` against quadrature with the sech kernel."""
    if not is_stable(g, n) or g < 1 or (g, n) == (1, 1):
        raise NotApplicable(f"({g},{n}) has no super recursion to check")
    table = _table(table)
    V = compute_super_volume(g, n, table) if volume is None else volume
    # 4 pi is not in Q[pi^2]: keep 4 L1 V exact and multiply by pi after evaluation
    lhs_poly = V.mul_monomial((1,) + (0,) * (n - 1)) * 4
    samples = default_samples(n) if L_samples is None else L_samples
    res = _run("super_recursion_numeric", g, n, samples, math.inf, table, True, lhs_poly, cfg)
    ok = True
    for row in res.detail["rows"]:
        row["lhs"] *= math.pi
        row["rel_err"] = _rel_err(row["lhs"], row["rhs"])
        row["pass"] = row["rel_err"] <= tol
        ok &= row["pass"]
    res.passed = ok
    res.detail["tol"] = tol
    return res


# ---------------------------------------------------------------------------
# appendix series identities
# ---------------------------------------------------------------------------


def _warn_poles(*ts: float) -> None:
    for t in ts:
        k = round(2 * t)
        if abs(t - k / 2) < 1e-3:
            warnings.warn(f"t = {t} is within 1e-3 of the pole {k / 2}", RuntimeWarning, stacklevel=3)


def _csc_pi(t: float) -> float:
    return 2 * math.pi / math.sin(2 * math.pi * t)


def hol_csc_over_power(t: float, p: int, f_coeffs: Sequence[float] | None = None) -> float:
    """Holomorphic part at 0 of ``2 pi / (t^p sin 2 pi t)`` (or ``2 pi f(1/t) / sin``).

    Computed as the function minus its exact principal part, which comes
    from the exact cosecant series.
    """
    from .laplace import kernel_series

    if f_coeffs is None:
        f_coeffs = [0.0] * p + [1.0]  # f(x) = x^p
    deg = len(f_coeffs) - 1
    series = kernel_series("csc", deg + 2).poly
    full = 0.0
    principal = 0.0
    for q, a in enumerate(f_coeffs):
        if not a:
            continue
        full += a * _csc_pi(t) / t ** q
        for e, c in series.terms.items():
            k = e[0] - q
            if k < 0:
                principal += a * float(c) * t ** k
    return full - principal


def _sum_A1a(x, t, N):
    k = np.arange(1, N + 1)
    return float(-np.sum((-1.0) ** k * np.exp(-x * k / 2) / (t + k / 2)))


def _sum_A1b(x, t, N):
    k = np.arange(1, N + 1)
    return _csc_pi(t) * math.exp(-t * x) - float(np.sum((-1.0) ** k * np.exp(-x * k / 2) / (t - k / 2)))


def _sum_A2(variant, x, t1, t2, N):
    k = np.arange(1, N + 1)
    w = (-1.0) ** k * np.exp(-x * k / 2)
    h = k / 2
    if variant == "a":
        return float(-np.sum(w / ((t1 + h) * (t2 + h))))
    if variant == "b":
        return 2 * math.pi * math.exp(-x * t1) / ((t1 + t2) * math.sin(2 * math.pi * t1)) - float(np.sum(w / ((t1 - h) * (t2 + h))))
    if variant == "c":
        return 2 * math.pi * math.exp(-x * t2) / ((t1 + t2) * math.sin(2 * math.pi * t2)) - float(np.sum(w / ((t1 + h) * (t2 - h))))
    if variant == "d":
        closed = 2 * math.pi / (t1 - t2) * (
            math.exp(-x * t2) / math.sin(2 * math.pi * t2) - math.exp(-x * t1) / math.sin(2 * math.pi * t1)
        )
        return closed - float(np.sum(w / ((t1 - h) * (t2 - h))))
    raise ValueError(f"unknown variant {variant!r}")


_A2_SIGNS = {"a": (1, 1), "b": (-1, 1), "c": (1, -1), "d": (-1, -1)}


def _integral_A2(variant, x, t1, t2, tol):
    s1, s2 = _A2_SIGNS[variant]

    def inner(l2):
        def f(l1):
            return math.exp(-l1 * t1 - l2 * t2) * float(_logistic_neg((x + s1 * l1 + s2 * l2) / 2))

        v, _ = quad_semi_infinite(f, QuadratureConfig(rtol=1e-11, panels=4), min(t1, 0.5) if s1 < 0 else t1 + 0.5, 0.0)
        return v

    rate2 = min(t2, 0.5) if s2 < 0 else t2 + 0.5
    v, _ = quad_semi_infinite(inner, QuadratureConfig(rtol=1e-10, panels=4), rate2, 0.0)
    return v


def verify_appendix_series(which: str, params: dict, N: int | None = None, tol: float = 1e-6) -> CheckResult:
    """Check one of the kernel series lemmas at a parameter point.

    ``A1a``/``A1b``: ``params = {x, t}``; ``A2a``..``A2d`` (or ``A2`` with
    ``variant``): ``{x, t1, t2}``; ``A3``: ``{t, p}`` for part (i) or
    ``{t, f}`` (even coefficient list) for part (ii).
    """
    which = which.upper() if which.upper() in ("A1A", "A1B", "A3") else which
    if which == "A2":
        which = "A2" + params.get("variant", "a")
    if which.upper() == "A1A":
        x, t = params["x"], params["t"]
        N = N or max(50, int(2 * 40 / max(x, 1e-3)))
        lhs, _ = quad_semi_infinite(lambda l: math.exp(-l * t) * float(_logistic_neg((x + l) / 2)), decay=t + 0.5)
        rhs = _sum_A1a(x, t, N)
    elif which.upper() == "A1B":
        x, t = params["x"], params["t"]
        if t <= 0:
            raise ValueError("A1b needs t > 0 for convergence")
        _warn_poles(t)
        N = N or max(50, int(2 * 40 / max(x, 1e-3)))
        lhs, _ = quad_semi_infinite(lambda l: math.exp(-l * t) * float(_logistic_neg((x - l) / 2)), decay=min(t, 0.5), start=x)
        rhs = _sum_A1b(x, t, N)
    elif which.startswith("A2"):
        variant = which[2:].lower()
        x, t1, t2 = params["x"], params["t1"], params["t2"]
        _warn_poles(t1, t2)
        N = N or max(50, int(2 * 40 / max(x, 1e-3)))
        lhs = _integral_A2(variant, x, t1, t2, tol)
        rhs = _sum_A2(variant, x, t1, t2, N)
    elif which.upper() == "A3":
        t = params["t"]
        _warn_poles(t)
        N = N or 10_000
        k = np.arange(1, N + 1, dtype=float)
        if "f" in params:
            coeffs = list(params["f"])
            if any(c for i, c in enumerate(coeffs) if i % 2):
                raise ValueError("f must be even")
            fk = sum(c * (2 / k) ** i for i, c in enumerate(coeffs))
            lhs = float(np.sum((-1.0) ** k * 2 * t / (t * t - (k / 2) ** 2) * fk))
            rhs = hol_csc_over_power(t, 0, coeffs)
        else:
            p = int(params["p"])
            # k and -k paired: (-1)^k (2/k)^p [1/(t - k/2) + (-1)^p / (t + k/2)]
            terms = (-1.0) ** k * (2 / k) ** p * (1 / (t - k / 2) + (-1.0) ** p / (t + k / 2))
            lhs = float(np.sum(terms))
            rhs = hol_csc_over_power(t, p)
    else:
        raise ValueError(f"unknown identity {which!r}")
    rel = _rel_err(lhs, rhs)
    return CheckResult(f"appendix_{which}", rel <= tol, {"params": dict(params), "lhs": lhs, "rhs": rhs, "rel_err": rel, "N": N})
