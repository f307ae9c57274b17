from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import pytest

from wpvol.checks import NotApplicable
from wpvol.identities import (
    IntersectionIndex,
    admissible_indices,
    check_derivative_relation,
    check_do_norbury,
    check_dvv,
    check_leading_recursion,
    check_second_derivative,
    correlator,
    double_factorial,
    intersection_numbers,
)
from wpvol.poly import MultiPoly
from wpvol.recursion import VolumeKey, VolumeTable, compute_volume, keys_up_to

KEYS5 = list(keys_up_to(5))
NON_BASE = [k for k in KEYS5 if k not in ((0, 3), (1, 1))]
REDUCIBLE = [(g, n) for g, n in KEYS5 if n >= 2 and (g, n - 1) in KEYS5 + [(0, 3)] and 2 * g - 3 + n > 0]


# -- independent oracle: Witten-Kontsevich numbers from two seeds only --------


def _df(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=None)
def wk(g, alphas):
    """``<tau_alphas>_g`` from the Virasoro recursion seeded by <tau_0^3>_0 and <tau_1>_1."""
    alphas = tuple(sorted(alphas, reverse=True))
    n = len(alphas)
    if g < 0 or n == 0 or min(alphas) < 0 or sum(alphas) != 3 * g - 3 + n or 2 * g - 2 + n <= 0:
        return Fraction(0)
    if (g, alphas) == (0, (0, 0, 0)):
        return Fraction(1)
    if (g, alphas) == (1, (1,)):
        return Fraction(1, 24)
    k, rest = alphas[0], alphas[1:]
    total = Fraction(0)
    for j, d in enumerate(rest):
        others = rest[:j] + rest[j + 1:]
        total += Fraction(_df(2 * k + 2 * d - 1), _df(2 * d - 1)) * wk(g, (k + d - 1,) + others)
    for a in range(k - 1):
        b = k - 2 - a
        w = Fraction(_df(2 * a + 1) * _df(2 * b + 1), 2)
        s = wk(g - 1, (a, b) + rest)
        for g1 in range(g + 1):
            for r in range(len(rest) + 1):
                for I in combinations(range(len(rest)), r):
                    J = [i for i in range(len(rest)) if i not in I]
                    s += wk(g1, (a,) + tuple(rest[i] for i in I)) * wk(g - g1, (b,) + tuple(rest[i] for i in J))
        total += w * s
    return total / _df(2 * k + 1)


@pytest.mark.parametrize("g,n", KEYS5)
def test_intersection_numbers_match_oracle(g, n):
    for idx, value in intersection_numbers(g, n).items():
        assert value == wk(idx.g, idx.alphas), idx


@pytest.mark.parametrize("g,alphas,value", [
    (0, (0, 0, 0), Fraction(1)),
    (1, (1,), Fraction(1, 24)),
    (0, (0, 0, 0, 0), Fraction(0)),  # off degree
    (0, (0, 0, 0, 1), Fraction(1)),
    (2, (4,), Fraction(1, 1152)),
    (2, (2, 3), Fraction(29, 5760)),
    (2, (2, 2, 2), Fraction(7, 240)),
    (1, (1, 1), Fraction(1, 24)),
])
def test_known_correlators(g, alphas, value):
    assert correlator(g, alphas) == value


@pytest.mark.parametrize("g,n", [k for k in KEYS5 if k[1] >= 2])
def test_string_and_dilaton(g, n):
    # string: <tau_0 tau_S> = sum_j <tau_S with d_j lowered>; dilaton: <tau_1 tau_S> = (2g-2+|S|) <tau_S>
    for idx in intersection_numbers(g, n):
        a = list(idx.alphas)
        if a[0] == 0 and (g, n) != (0, 3):
            rest = a[1:]
            want = sum(correlator(g, rest[:j] + [rest[j] - 1] + rest[j + 1:]) for j in range(len(rest)) if rest[j])
            assert correlator(g, a) == want
        if 1 in a and (g, n) != (1, 1):
            rest = list(a)
            rest.remove(1)
            assert correlator(g, a) == (2 * g - 2 + len(rest)) * correlator(g, rest)


def test_index_is_sorted():
    assert IntersectionIndex(1, (2, 0, 1)).alphas == (0, 1, 2)
    assert IntersectionIndex(0, (0, 0, 0)).is_top_degree()


def test_double_factorial():
    assert [double_factorial(k) for k in (-1, 0, 1, 5, 6)] == [1, 1, 1, 15, 48]
    with pytest.raises(ValueError):
        double_factorial(-3)


def test_correlator_degenerate_inputs():
    assert correlator(0, (0, 0)) == 0
    assert correlator(1, (-1, 3)) == 0
    assert correlator(-1, (0,)) == 0


@pytest.mark.parametrize("g,n", NON_BASE)
def test_dvv_all_admissible(g, n):
    idx = admissible_indices(g, n)
    assert idx
    for alpha in idx:
        assert check_dvv(g, alpha), alpha


def test_dvv_base_and_unstable_are_not_applicable():
    with pytest.raises(NotApplicable):
        check_dvv(0, (0, 0, 0))
    with pytest.raises(NotApplicable):
        check_dvv(1, (1,))
    with pytest.raises(NotApplicable):
        check_dvv(0, (0, 0))


def test_dvv_rejects_off_degree_index():
    with pytest.raises(ValueError):
        check_dvv(1, (0, 1))


def test_dvv_detects_corruption():
    t = VolumeTable()
    for g, n in keys_up_to(2):
        compute_volume(g, n, t)
    V = t.require(VolumeKey(1, 2))
    bad = V + MultiPoly(2, {(2, 2): Fraction(1, 96)})  # <tau_1 tau_1>_1 doubled
    t._data[VolumeKey(1, 2)] = bad
    assert not check_dvv(1, (1, 1), t)


@pytest.mark.parametrize("g,n", NON_BASE)
def test_leading_recursion(g, n):
    assert check_leading_recursion(g, n)


@pytest.mark.parametrize("g,n", REDUCIBLE)
def test_evaluations_at_2pi_i(g, n):
    assert check_do_norbury(g, n)
    assert check_derivative_relation(g, n)
    assert check_second_derivative(g, n)


def test_evaluation_examples():
    # V_{0,4}(2 pi i, L2, L3, L4) = (L2^2 + L3^2 + L4^2)/2 = sum_k int_0^{L_k} L_k dL_k
    from wpvol.poly import eval_at_2pi_i

    got = eval_at_2pi_i(compute_volume(0, 4), "even")
    assert got == MultiPoly(3, {(2, 0, 0): Fraction(1, 2), (0, 2, 0): Fraction(1, 2), (0, 0, 2): Fraction(1, 2)})


def test_evaluations_need_a_neighbour():
    for fn in (check_do_norbury, check_derivative_relation, check_second_derivative):
        with pytest.raises(NotApplicable):
            fn(2, 1)
        with pytest.raises(NotApplicable):
            fn(0, 3)


def test_evaluation_detects_corruption():
    t = VolumeTable()
    for g, n in keys_up_to(2):
        compute_volume(g, n, t)
    t._data[VolumeKey(1, 2)] = t.require(VolumeKey(1, 2)) + MultiPoly.constant(2, 1)
    assert not check_do_norbury(1, 2, t)
