from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercoh.grading import (
    Bidegree,
    CGAMonomial,
    cga_basis,
    cga_coproduct,
    cga_multiply,
    dim_ext_gamma,
    elem_multiply,
    map_tensor_sign,
    tensor_multiply,
    twist_sign,
)

from strategies import cga_monomials


@pytest.mark.parametrize("a,b,want", [((0, 0), (5, 1), 1), ((1, 1), (1, 1), 1), ((1, 0), (1, 0), -1)])
def test_twist_sign_examples(a, b, want):
    assert twist_sign(Bidegree(*a), Bidegree(*b)) == want


def test_map_tensor_sign_examples():
    assert map_tensor_sign((0, 0), (3, 1)) == 1
    assert map_tensor_sign((1, 1), (1, 1)) == 1
    assert map_tensor_sign((-1, 0), (1, 0)) == -1


def test_bidegree_addition():
    assert Bidegree(1, 1) + Bidegree(2, 1) == Bidegree(3, 0)


def m(ext=(), gam=(0,), gamp=(0,)):
    return CGAMonomial(tuple(ext), tuple(gam), tuple(gamp))


def test_multiply_examples():
    assert cga_multiply(m((0,)), m((0,)), 3)[0] == 0
    assert cga_multiply(m(gam=(1,)), m(gam=(1,)), 3) == (2, m(gam=(2,)))
    assert cga_multiply(m(gam=(2,)), m(gam=(3,)), 5)[0] == 0


def test_coproduct_examples():
    one = m()
    assert cga_coproduct(one, 3) == ((1, one, one),)
    x = m((0,))
    assert set(cga_coproduct(x, 3)) == {(1, x, one), (1, one, x)}
    y1, y2 = m(gam=(1,)), m(gam=(2,))
    assert set(cga_coproduct(y2, 5)) == {(1, y2, one), (1, y1, y1), (1, one, y2)}


def test_bidegree_of_monomial():
    mono = CGAMonomial((0, 1), (1, 2), (1, 0))
    assert mono.bidegree == Bidegree(2 + 3 + 2, 1)


@pytest.mark.parametrize("s,t", [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)])
def test_basis_sizes(s, t):
    for n in range(6):
        assert len(cga_basis(s, t, n)) == dim_ext_gamma(s, t, n)
        assert len(set(cga_basis(s, t, n, primed=True))) == len(cga_basis(s, t, n, primed=True))
    assert dim_ext_gamma(1, 1, 3) == comb(1, 0) * comb(3, 3) + comb(1, 1) * comb(2, 2)


SHAPE = st.sampled_from([(1, 1), (2, 1), (1, 2), (2, 2)])


@settings(max_examples=80, deadline=None)
@given(SHAPE.flatmap(lambda st_: st.tuples(*(cga_monomials(*st_) for _ in range(3)))), st.sampled_from([3, 5]))
def test_associative(monos, p):
    a, b, c = ({x: 1} for x in monos)
    assert elem_multiply(elem_multiply(a, b, p), c, p) == elem_multiply(a, elem_multiply(b, c, p), p)


@settings(max_examples=80, deadline=None)
@given(SHAPE.flatmap(lambda st_: st.tuples(*(cga_monomials(*st_) for _ in range(2)))), st.sampled_from([3, 5]))
def test_graded_commutative(monos, p):
    a, b = monos
    c1, m1 = cga_multiply(a, b, p)
    c2, m2 = cga_multiply(b, a, p)
    assert (c1 - twist_sign(a.bidegree, b.bidegree) * c2) % p == 0
    if c1:
        assert m1 == m2 and m1.bidegree == a.bidegree + b.bidegree


@settings(max_examples=60, deadline=None)
@given(SHAPE.flatmap(lambda st_: st.tuples(*(cga_monomials(*st_, max_pow=3) for _ in range(2)))), st.sampled_from([3, 5]))
def test_coproduct_multiplicative(monos, p):
    a, b = monos
    c, ab = cga_multiply(a, b, p)
    lhs = {} if not c else {(l, r): (c * v) % p for v, l, r in cga_coproduct(ab, p)}
    lhs = {k: v for k, v in lhs.items() if v}
    da = {(l, r): v for v, l, r in cga_coproduct(a, p)}
    db = {(l, r): v for v, l, r in cga_coproduct(b, p)}
    assert lhs == tensor_multiply(da, db, p)


@settings(max_examples=60, deadline=None)
@given(SHAPE.flatmap(lambda st_: cga_monomials(*st_, max_pow=3)), st.sampled_from([3, 5]))
def test_coproduct_coassociative_and_counital(mono, p):
    one = CGAMonomial((), (0,) * len(mono.gam), (0,) * len(mono.gamp))
    left, right = {}, {}
    for c, a, b in cga_coproduct(mono, p):
        for c2, a1, a2 in cga_coproduct(a, p):
            key = (a1, a2, b)
            left[key] = (left.get(key, 0) + c * c2) % p
        for c2, b1, b2 in cga_coproduct(b, p):
            key = (a, b1, b2)
            right[key] = (right.get(key, 0) + c * c2) % p
    assert {k: v for k, v in left.items() if v} == {k: v for k, v in right.items() if v}
    terms = cga_coproduct(mono, p)
    assert (1, mono, one) in terms and (1, one, mono) in terms or mono == one
