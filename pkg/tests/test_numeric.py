import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from wpvol.checks import NotApplicable
from wpvol.numeric import (
    QuadratureConfig,
    QuadratureError,
    check_original_recursion_numeric,
    check_super_recursion_numeric,
    default_samples,
    eval_H,
    eval_Hsu,
    hol_csc_over_power,
    poly_evaluator,
    quad_semi_infinite,
    verify_appendix_series,
)
from wpvol.poly import MultiPoly
from wpvol.recursion import compute_super_volume, compute_volume, keys_up_to

KEYS4 = [k for k in keys_up_to(4) if k not in ((0, 3), (1, 1))]
SUPER4 = [k for k in keys_up_to(4) if k[0] >= 1 and k != (1, 1)]


# -- kernels -------------------------------------------------------------------


@pytest.mark.parametrize("x,L", [(0.0, 0.0), (1.0, 2.0), (3.5, 0.7), (10.0, 4.0)])
def test_kernels_match_mpmath(x, L):
    H = 1 / (1 + mpmath.exp((x + L) / 2)) + 1 / (1 + mpmath.exp((x - L) / 2))
    assert eval_H(x, L) == pytest.approx(float(H), rel=1e-14)
    Hs = (mpmath.sech((x + L) / 4) - mpmath.sech((x - L) / 4)) / 2
    assert eval_Hsu(x, L) == pytest.approx(float(Hs), rel=1e-13, abs=1e-300)


def test_kernels_do_not_overflow():
    with np.errstate(over="raise"):
        assert eval_H(2000.0, 10.0) == 0.0
        assert eval_H(-2000.0, 0.0) == pytest.approx(2.0)
        assert eval_Hsu(5000.0, 1.0) == 0.0


def test_kernel_vectorized():
    xs = np.linspace(0, 5, 7)
    assert eval_H(xs, 1.0).shape == (7,)


def test_first_moment_of_kernel():
    # int_0^inf x H(x, L) dx = L^2/2 + 2 pi^2/3
    for L in (0.5, 2.0, 4.0):
        v, err = quad_semi_infinite(lambda x: x * eval_H(x, L), decay=0.5)
        assert v == pytest.approx(L * L / 2 + 2 * math.pi**2 / 3, rel=1e-12)
        assert err < 1e-8


def test_super_kernel_moment_against_mpmath():
    want = mpmath.quad(lambda x: x * (mpmath.sech((x + 1) / 4) - mpmath.sech((x - 1) / 4)) / 2, [0, 20, mpmath.inf])
    v, _ = quad_semi_infinite(lambda x: x * eval_Hsu(x, 1.0), decay=0.25)
    assert v == pytest.approx(float(want), rel=1e-11)
    assert v == pytest.approx(-2 * math.pi, rel=1e-11)


def test_quadrature_basics():
    v, _ = quad_semi_infinite(lambda x: math.exp(-x))
    assert v == pytest.approx(1.0, rel=1e-13)
    with pytest.raises(ValueError):
        quad_semi_infinite(lambda x: 1.0, decay=0.0)
    with pytest.raises(QuadratureError):
        quad_semi_infinite(lambda x: 1.0, decay=1.0)  # never decays


def test_fixed_cutoff_reports_tail():
    _, err = quad_semi_infinite(lambda x: math.exp(-x), QuadratureConfig(cutoff=5.0))
    assert err >= 2 * math.exp(-5.0)


def test_poly_evaluator():
    V = compute_volume(1, 2)
    f = poly_evaluator(V)
    want = (4 * math.pi**2 + 5) * (12 * math.pi**2 + 5) / 192
    assert f(1.0, 2.0) == pytest.approx(want, rel=1e-15)


def test_default_samples_are_positive():
    s = default_samples(4)
    assert len(s) == 3 and all(len(p) == 4 and min(p) > 0 for p in s)


# -- recursion cross-checks ----------------------------------------------------


def test_examples_at_given_points():
    assert check_original_recursion_numeric(0, 4, [(1, 2, 3, 4)]).passed
    assert check_original_recursion_numeric(1, 2, [(1, 1)]).passed


@pytest.mark.parametrize("g,n", KEYS4)
def test_original_recursion(g, n):
    t0 = time.perf_counter()
    res = check_original_recursion_numeric(g, n)
    elapsed = time.perf_counter() - t0
    assert res.passed, res.detail
    assert len(res.detail["rows"]) >= 3
    assert all(r["rel_err"] <= 1e-8 for r in res.detail["rows"])
    assert elapsed < 5.0


@pytest.mark.parametrize("g,n", SUPER4)
def test_super_recursion(g, n):
    res = check_super_recursion_numeric(g, n)
    assert res.passed, res.detail


@pytest.mark.parametrize("delta", [Fraction(1), Fraction(1, 1000)])
def test_mutation_detected(delta):
    V = compute_volume(0, 4) + MultiPoly.constant(4, delta)
    assert not check_original_recursion_numeric(0, 4, [(1, 2, 3, 4)], volume=V).passed


def test_super_mutation_detected():
    V = compute_super_volume(2, 1) + MultiPoly.constant(1, Fraction(1, 1000))
    assert not check_super_recursion_numeric(2, 1, volume=V).passed


def test_numeric_not_applicable():
    with pytest.raises(NotApplicable):
        check_original_recursion_numeric(1, 1)
    with pytest.raises(NotApplicable):
        check_super_recursion_numeric(0, 4)


def test_rejects_bad_samples():
    with pytest.raises(ValueError):
        check_original_recursion_numeric(0, 4, [(1, 2, 3)])
    with pytest.raises(ValueError):
        check_original_recursion_numeric(0, 4, [(1, 2, 3, -1)])


# -- series identities ---------------------------------------------------------


@pytest.mark.parametrize("which", ["A1a", "A1b"])
@pytest.mark.parametrize("x,t", [(0.5, 0.3), (1.0, 0.7), (2.0, 1.3), (3.0, 0.2), (5.0, 2.1)])
def test_series_A1(which, x, t):
    res = verify_appendix_series(which, {"x": x, "t": t})
    assert res.passed, res.detail


@pytest.mark.parametrize("variant", "abcd")
@pytest.mark.parametrize("x,t1,t2", [(0.5, 0.3, 0.7), (1.0, 0.7, 0.2), (2.0, 1.3, 0.4)])
def test_series_A2(variant, x, t1, t2):
    res = verify_appendix_series("A2" + variant, {"x": x, "t1": t1, "t2": t2})
    assert res.passed, res.detail


@pytest.mark.parametrize("p", range(5))
def test_series_A3_powers(p):
    assert verify_appendix_series("A3", {"t": 0.3, "p": p}).passed


def test_series_A3_even_function():
    assert verify_appendix_series("A3", {"t": 0.7, "f": [1.0, 0.0, 0.5]}).passed
    with pytest.raises(ValueError):
        verify_appendix_series("A3", {"t": 0.7, "f": [1.0, 1.0]})


def test_hol_csc_against_mpmath():
    t = mpmath.mpf("0.3")
    full = 2 * mpmath.pi / mpmath.sin(2 * mpmath.pi * t)
    want = full - 1 / t  # principal part of 2 pi / sin(2 pi t) is 1/t
    assert hol_csc_over_power(0.3, 0) == pytest.approx(float(want), rel=1e-13)
    # 2 pi / (t^2 sin 2 pi t): principal part 1/t^3 + (2 pi^2 / 3)/t
    want2 = full / t**2 - 1 / t**3 - 2 * mpmath.pi**2 / 3 / t
    assert hol_csc_over_power(0.3, 2) == pytest.approx(float(want2), rel=1e-12)


def test_pole_warning():
    with pytest.warns(RuntimeWarning):
        verify_appendix_series("A3", {"t": 0.5002, "p": 1})


def test_unknown_series():
    with pytest.raises(ValueError):
        verify_appendix_series("A9", {})


def _perturbations(V, nvars):
    from wpvol.ring import RingElem

    for e, c in sorted(V.terms.items()):
        for k in range(len(c.coeffs)):
            yield e, k, V + MultiPoly(nvars, {e: RingElem.pi2_power(k, Fraction(1, 1000))})


@pytest.mark.parametrize("g,n", [(0, 4), (1, 2), (0, 5), (1, 3), (2, 1)])
def test_every_coefficient_perturbation_detected_at_default_tol(g, n):
    V = compute_volume(g, n)
    sample = [default_samples(n)[0]]
    missed = [(e, k) for e, k, W in _perturbations(V, n)
              if check_original_recursion_numeric(g, n, sample, volume=W).passed]
    assert not missed


@pytest.mark.parametrize("g,n", [(0, 6), (1, 4)])
def test_perturbations_of_large_volumes_detected_at_tight_tol(g, n):
    # these volumes are large enough that 1e-3 is below 1e-8 relative;
    # the quadrature itself is accurate to ~1e-15
    V = compute_volume(g, n)
    sample = [default_samples(n)[0]]
    missed = [(e, k) for e, k, W in _perturbations(V, n)
              if check_original_recursion_numeric(g, n, sample, tol=1e-12, volume=W).passed]
    assert not missed
