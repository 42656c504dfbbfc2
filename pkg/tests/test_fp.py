import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from supercoh import fp

PRIMES = st.sampled_from([3, 5, 7])


def mats(p, max_side=7):
    shape = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shape.flatmap(lambda s: arrays(np.int64, s, elements=st.integers(0, p - 1)))


def test_prime_field_rejects_two_and_composites():
    with pytest.raises(ValueError):
        fp.PrimeField(2)
    with pytest.raises(ValueError):
        fp.PrimeField(9)
    assert fp.PrimeField(5).inv(2) == 3


@pytest.mark.parametrize("a,p,want", [(1, 5, 1), (2, 5, 3), (2, 3, 2)])
def test_field_inverse_examples(a, p, want):
    assert fp.field_inverse(a, p) == want


def test_field_inverse_zero_raises():
    with pytest.raises(fp.ZeroInverse):
        fp.field_inverse(0, 5)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_inverse_table_is_inverse(p):
    inv = fp.inverse_table(p)
    assert all(a * inv[a] % p == 1 for a in range(1, p))


def test_rank_kernel_image_examples():
    r = fp.rank_kernel_image(np.zeros((3, 3), dtype=np.int64), 5)
    assert r.rank == 0 and r.kernel.shape[0] == 3
    r = fp.rank_kernel_image(np.eye(4, dtype=np.int64), 3)
    assert r.rank == 4 and r.kernel.shape[0] == 0
    assert fp.rank(np.array([[1, 2, 0], [2, 4, 0]]), 5) == 1


def test_solve_linear_examples():
    b = np.array([1, 2, 0])
    assert np.array_equal(fp.solve_linear(np.eye(3, dtype=np.int64), b, 5), b)
    assert fp.solve_linear(np.zeros((2, 2), dtype=np.int64), np.array([1, 0]), 5) is None
    assert list(fp.solve_linear(np.array([[1, 1], [0, 0]]), np.array([2, 0]), 3)) == [2, 0]


def test_subquotient_examples():
    e = np.eye(2, dtype=np.int64)
    assert fp.subquotient(e, np.zeros((0, 2), dtype=np.int64), 3).dim == 2
    assert fp.subquotient(e, e, 3).dim == 0
    q = fp.subquotient(np.array([[1, 0], [1, 1]]), np.array([[1, 0]]), 3)
    assert q.dim == 1
    assert list(q.coords(np.array([0, 1]), 3)) == [1]
    assert list(q.coords(np.array([2, 1]), 3)) == [1]


@settings(max_examples=60, deadline=None)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_rank_nullity_and_kernel(pm):
    p, m = pm
    r = fp.rank_kernel_image(m, p)
    assert r.rank + r.kernel.shape[0] == m.shape[1]
    assert not np.any((m @ r.kernel.T) % p)
    assert fp.rank(m.T, p) == r.rank


@settings(max_examples=60, deadline=None)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), mats(p, 9))))
def test_sparse_rank_agrees_with_dense(pm):
    p, m = pm
    dense = fp.rank(m, p, threshold=2.0)
    sparse = fp.rank(sp.csr_matrix(m), p, threshold=0.0)
    assert dense == sparse == fp.rank(m, p)


@settings(max_examples=40, deadline=None)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_numpy_fallback_matches_kernel(pm):
    p, m = pm
    inv = fp.inverse_table(p)
    a1, a2 = m.copy() % p, m.copy() % p
    piv1 = fp._rref_numpy(a1, p, inv)
    piv2 = fp._rref_kernel(a2, p, inv)
    assert np.array_equal(piv1, piv2) and np.array_equal(a1, a2)


@settings(max_examples=40, deadline=None)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), mats(p), st.data())))
def test_solve_linear_solutions_solve(pmd):
    p, m, data = pmd
    x = data.draw(arrays(np.int64, m.shape[1], elements=st.integers(0, p - 1)))
    b = (m @ x) % p
    sol = fp.solve_linear(m, b, p)
    assert sol is not None and np.array_equal((m @ sol) % p, b)


@settings(max_examples=40, deadline=None)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_sparse_echelon_containment(pm):
    p, m = pm
    E = fp.SparseEchelon(m.shape[1], p)
    E.insert(sp.csr_matrix(m).T)
    assert E.rank == fp.rank(m, p)
    for row in m:
        assert E.contains(row)
    combo = (m.sum(axis=0) * 2) % p
    assert E.contains(combo)


@settings(max_examples=40, deadline=None)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_sparse_kernel_and_row_basis(pm):
    p, m = pm
    K = fp.sparse_kernel(sp.csr_matrix(m), p)
    assert K.shape[0] == m.shape[1] - fp.rank(m, p)
    assert not np.any((m @ K.T) % p)
    R = fp.sparse_row_basis(sp.csr_matrix(m), p)
    assert R.shape[0] == fp.rank(m, p) == fp.rank(np.vstack([R, m]), p)


def test_entries_stay_reduced():
    m = np.array([[4, 7], [9, 13]])
    r, piv = fp.rref(m, 5)
    assert r.min() >= 0 and r.max() < 5
