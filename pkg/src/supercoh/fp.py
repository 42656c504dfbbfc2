"""Exact linear algebra over F_p for small odd primes.

Dense matrices are numpy int64 arrays with entries in [0, p).  Sparse
matrices are scipy CSR/CSC matrices with the same entry convention.  The
hot loops (dense row reduction, sparse column reduction) are compiled with
numba unless ``SUPERCOH_DISABLE_NUMBA=1`` is set, in which case the pure
numpy / pure python versions run instead.
"""

import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

SPARSE_FILL_THRESHOLD = 0.25

USE_NUMBA = os.environ.get("SUPERCOH_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba
        from numba.typed import List as _NList
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _maybe_njit(func):
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


class ZeroInverse(ZeroDivisionError):
    pass


class NotContained(ValueError):
    pass


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class PrimeField:
    def __init__(self, p):
        p = int(p)
        if p < 3 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        self.p = p
        self._inv = inverse_table(p)

    def inv(self, a):
        return field_inverse(a, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


def field_inverse(a, p):
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def inverse_table(p):
    t = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        t[a] = pow(a, p - 2, p)
    return t


# ---------------------------------------------------------------- dense RREF


@_maybe_njit
def _rref_kernel(a, p, inv):
    nrows, ncols = a.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, ncols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        s = inv[a[r, c]]
        if s != 1:
            for j in range(c, ncols):
                a[r, j] = (a[r, j] * s) % p
        for i in range(nrows):
            if i != r:
                f = a[i, c]
                if f != 0:
                    f = p - f
                    for j in range(c, ncols):
                        a[i, j] = (a[i, j] + f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return pivots[:r]


def _rref_numpy(a, p, inv):
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    return np.array(pivots, dtype=np.int64)


def rref(m, p):
    """Reduced row echelon form of a dense matrix; returns (R, pivot_columns).

    Pivots are chosen as the first nonzero entry in column order, so the
    result is a deterministic function of the input.
    """
    a = np.array(m, dtype=np.int64, copy=True) % p
    if a.ndim != 2:
        raise ValueError("rref expects a 2d array")
    if a.size == 0:
        return a, np.zeros(0, dtype=np.int64)
    inv = inverse_table(p)
    if USE_NUMBA:
        piv = _rref_kernel(a, p, inv)
    else:
        piv = _rref_numpy(a, p, inv)
    return a, piv


# ------------------------------------------------------- sparse column reduce


@_maybe_njit
def _merge_sub(ai, av, bi, bv, f, p):
    # returns a - f*b for sorted sparse vectors
    n1 = ai.shape[0]
    n2 = bi.shape[0]
    oi = np.empty(n1 + n2, dtype=np.int64)
    ov = np.empty(n1 + n2, dtype=np.int64)
    i = 0
    j = 0
    k = 0
    while i < n1 or j < n2:
        if j >= n2 or (i < n1 and ai[i] < bi[j]):
            oi[k] = ai[i]
            ov[k] = av[i]
            i += 1
            k += 1
        elif i >= n1 or bi[j] < ai[i]:
            v = (p - (f * bv[j]) % p) % p
            if v != 0:
                oi[k] = bi[j]
                ov[k] = v
                k += 1
            j += 1
        else:
            v = (av[i] - f * bv[j]) % p
            if v != 0:
                oi[k] = ai[i]
                ov[k] = v
                k += 1
            i += 1
            j += 1
    return oi[:k], ov[:k]


@_maybe_njit
def _reduce_vec(idx, val, pivot_of, store_i, store_v, p, inv):
    while idx.shape[0] > 0:
        low = idx[idx.shape[0] - 1]
        k = pivot_of[low]
        if k < 0:
            break
        f = val[val.shape[0] - 1]
        idx, val = _merge_sub(idx, val, store_i[k], store_v[k], f, p)
    return idx, val


@_maybe_njit
def _sparse_insert_columns(indptr, indices, data, pivot_of, store_i, store_v, p, inv):
    ncols = indptr.shape[0] - 1
    added = np.zeros(ncols, dtype=np.bool_)
    for j in range(ncols):
        a = indptr[j]
        b = indptr[j + 1]
        if a == b:
            continue
        idx = indices[a:b].copy()
        val = data[a:b].copy()
        order = np.argsort(idx)
        idx = idx[order]
        val = val[order] % p
        keep = val != 0
        idx = idx[keep]
        val = val[keep]
        idx, val = _reduce_vec(idx, val, pivot_of, store_i, store_v, p, inv)
        if idx.shape[0] > 0:
            s = inv[val[val.shape[0] - 1]]
            val = (val * s) % p
            pivot_of[idx[idx.shape[0] - 1]] = len(store_i)
            store_i.append(idx)
            store_v.append(val)
            added[j] = True
    return added


class SparseEchelon:
    """Incremental echelon basis of sparse vectors in F_p^n.

    Vectors are inserted column-wise from a CSC matrix; each stored vector
    is reduced against earlier ones by its largest index.
    """

    def __init__(self, n, p):
        self.n = int(n)
        self.p = p
        self.inv = inverse_table(p)
        self.pivot_of = np.full(self.n, -1, dtype=np.int64)
        if USE_NUMBA:
            self.store_i = _NList.empty_list(numba.int64[:])
            self.store_v = _NList.empty_list(numba.int64[:])
        else:
            self.store_i = []
            self.store_v = []

    @property
    def rank(self):
        return len(self.store_i)

    def insert(self, mat):
        """Insert the columns of ``mat`` (shape n x k); returns a bool mask of independent columns."""
        c = sp.csc_matrix(mat)
        if c.shape[0] != self.n:
            raise ValueError("dimension mismatch")
        c.sort_indices()
        return _sparse_insert_columns(
            c.indptr.astype(np.int64), c.indices.astype(np.int64), c.data.astype(np.int64) % self.p,
            self.pivot_of, self.store_i, self.store_v, self.p, self.inv)

    def contains(self, vec):
        v = np.asarray(vec, dtype=np.int64) % self.p
        idx = np.nonzero(v)[0].astype(np.int64)
        val = v[idx]
        idx, val = _reduce_vec(idx, val, self.pivot_of, self.store_i, self.store_v, self.p, self.inv)
        return idx.shape[0] == 0


# ------------------------------------------------------------ public API


def sparse_row_basis(m, p):
    """Dense rows spanning the row space of a (possibly tall, sparse) matrix."""
    m = sp.csr_matrix(m)
    k = m.shape[1]
    if m.shape[0] == 0 or k == 0 or m.nnz == 0:
        return np.zeros((0, k), dtype=np.int64)
    ech = SparseEchelon(k, p)
    ech.insert(m.T)
    out = np.zeros((ech.rank, k), dtype=np.int64)
    for r in range(ech.rank):
        out[r, np.asarray(ech.store_i[r])] = np.asarray(ech.store_v[r])
    return out % p


def sparse_kernel(m, p):
    """Rows spanning ker m, computed from a compressed row basis."""
    return rank_kernel_image(sparse_row_basis(m, p), p).kernel if m.shape[1] else np.zeros((0, 0), dtype=np.int64)


def fill_ratio(m):
    if sp.issparse(m):
        tot = m.shape[0] * m.shape[1]
        return (m.nnz / tot) if tot else 0.0
    m = np.asarray(m)
    return (np.count_nonzero(m) / m.size) if m.size else 0.0


def to_dense(m, p):
    if sp.issparse(m):
        return np.asarray(m.toarray(), dtype=np.int64) % p
    return np.asarray(m, dtype=np.int64) % p


def rank(m, p, threshold=None):
    """Rank over F_p; sparse column reduction when the fill ratio is low."""
    threshold = SPARSE_FILL_THRESHOLD if threshold is None else threshold
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return 0
    if sp.issparse(m) and fill_ratio(m) <= threshold:
        mm = m if cols <= rows else m.T
        ech = SparseEchelon(mm.shape[0], p)
        ech.insert(mm)
        return ech.rank
    d = to_dense(m, p)
    if d.shape[0] > d.shape[1]:
        d = d.T
    return len(rref(d, p)[1])


@dataclass
class RankKernelImage:
    rank: int
    kernel: np.ndarray  # rows are basis vectors of ker M
    image: np.ndarray  # rows are basis vectors of the column space


def kernel_from_rref(r, piv, ncols, p):
    pivset = set(int(c) for c in piv)
    free = [c for c in range(ncols) if c not in pivset]
    ker = np.zeros((len(free), ncols), dtype=np.int64)
    for k, fc in enumerate(free):
        ker[k, fc] = 1
        for i, pc in enumerate(piv):
            ker[k, pc] = (-r[i, fc]) % p
    return ker


def rank_kernel_image(m, p):
    d = to_dense(m, p)
    rows, cols = d.shape
    r, piv = rref(d, p)
    ker = kernel_from_rref(r, piv, cols, p)
    # column space: pivot columns of the original matrix
    img = d[:, piv].T.copy() if len(piv) else np.zeros((0, rows), dtype=np.int64)
    return RankKernelImage(len(piv), ker, img)


def solve_linear(m, b, p):
    """Canonical solution of m x = b (free variables 0), or None."""
    d = to_dense(m, p)
    rows, cols = d.shape
    b = np.asarray(b, dtype=np.int64).reshape(-1) % p
    if b.shape[0] != rows:
        raise ValueError("right-hand side has wrong length")
    aug = np.concatenate([d, b.reshape(-1, 1)], axis=1)
    r, piv = rref(aug, p)
    if len(piv) and piv[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = r[i, cols]
    return x


def solve_many(m, bs, p):
    """Canonical solutions for several right-hand sides (columns of bs).

    Returns (X, ok) with ok[j] False when column j is not in the image.
    """
    d = to_dense(m, p)
    rows, cols = d.shape
    bs = to_dense(bs, p).reshape(rows, -1)
    aug = np.concatenate([d, bs], axis=1)
    r, piv = rref(aug, p)
    main = [int(c) for c in piv if c < cols]
    rk = len(main)
    x = np.zeros((cols, bs.shape[1]), dtype=np.int64)
    for i, c in enumerate(main):
        x[c] = r[i, cols:]
    ok = ~np.any(r[rk:, cols:] != 0, axis=0)
    x[:, ~ok] = 0
    return x, ok


@dataclass
class SubquotientBasis:
    ambient: int
    Z: np.ndarray
    B: np.ndarray
    reps: np.ndarray

    @property
    def dim(self):
        return self.reps.shape[0]

    def coords(self, vec, p):
        """Coordinates of vec (in span Z) modulo span B in terms of reps."""
        stack = np.concatenate([self.B, self.reps], axis=0).T
        x = solve_linear(stack, vec, p)
        if x is None:
            raise NotContained("vector is not in span(Z)")
        return x[self.B.shape[0]:]


def _as_rows(vs, n):
    vs = np.asarray(vs, dtype=np.int64)
    if vs.size == 0:
        return np.zeros((0, n), dtype=np.int64)
    return vs.reshape(-1, n)


def row_basis(vs, p):
    """Echelon basis (rows) of the span of the given row vectors."""
    vs = np.asarray(vs, dtype=np.int64)
    if vs.shape[0] == 0:
        return vs.reshape(0, vs.shape[1] if vs.ndim == 2 else 0)
    r, piv = rref(vs, p)
    return r[: len(piv)]


def subquotient(Z, B, p, n=None):
    """Coset representatives of span(Z)/span(B), drawn from the rows of Z.

    Z rows are scanned in order; a row becomes a representative when it is
    independent of span(B) together with previously chosen representatives.
    """
    if n is None:
        n = np.asarray(Z).shape[-1] if np.asarray(Z).size else np.asarray(B).shape[-1]
    Z = _as_rows(Z, n) % p
    B = _as_rows(B, n) % p
    rz = len(rref(Z, p)[1]) if Z.shape[0] else 0
    if B.shape[0]:
        both = np.concatenate([Z, B], axis=0)
        if len(rref(both, p)[1]) != rz:
            raise NotContained("span(B) is not contained in span(Z)")
    rb = len(rref(B, p)[1]) if B.shape[0] else 0
    # greedy selection: columns [B | Z], pivots among the Z part give reps
    stack = np.concatenate([B, Z], axis=0).T
    if stack.size == 0:
        reps = np.zeros((0, n), dtype=np.int64)
    else:
        _, piv = rref(stack, p)
        chosen = [int(c) - B.shape[0] for c in piv if c >= B.shape[0]]
        reps = Z[chosen] if chosen else np.zeros((0, n), dtype=np.int64)
    assert reps.shape[0] == rz - rb
    return SubquotientBasis(n, Z, B, reps)
