"""Shared helpers: sympy conversion and hypothesis strategies."""
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import strategies as st

from wpvol.poly import MultiPoly, SparsePoly
from wpvol.ring import RingElem


def ring_to_sympy(c: RingElem):
    return sum((sp.Rational(q.numerator, q.denominator) * sp.pi ** (2 * k) for k, q in enumerate(c.coeffs)),
               sp.Integer(0))


def to_sympy(P: SparsePoly, syms):
    expr = sp.Integer(0)
    for e, c in P.terms.items():
        mono = sp.Integer(1)
        for s, k in zip(syms, e):
            mono *= s ** k
        expr += ring_to_sympy(c) * mono
    return sp.expand(expr)


def sym_equal(a, b) -> bool:
    return sp.simplify(sp.expand(a - b)) == 0


fractions = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 20))
ring_elems = st.lists(fractions, max_size=4).map(RingElem)


def polys(nvars: int, max_deg: int = 6, max_terms: int = 6, parity=None):
    """Random ``MultiPoly``; ``parity`` of the first slot may be 'even' or 'odd'."""
    def fix(e):
        e = list(e)
        if parity == "even" and e[0] % 2:
            e[0] -= 1
        if parity == "odd" and e[0] % 2 == 0:
            e[0] += 1
        return tuple(e)

    exps = st.tuples(*[st.integers(0, max_deg)] * nvars).map(fix)
    return st.dictionaries(exps, ring_elems, max_size=max_terms).map(lambda d: MultiPoly(nvars, d))


@pytest.fixture
def L():
    return sp.symbols("L1:6")


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
