"""Finite based complexes over F_p.

A ``CochainComplex`` holds, for each degree n in a finite range, an ordered
list of basis keys together with per-basis-vector parity, filtration level
and an optional grading key (used to split the differential into blocks),
and sparse matrices ``d[n]`` from degree n to degree n+1.
"""

from collections import defaultdict

import numpy as np
import scipy.sparse as sp

from . import fp


def sparse_from_entries(entries, shape, p):
    """entries: dict {(row, col): value}."""
    if not entries:
        return sp.csr_matrix(shape, dtype=np.int64)
    rows, cols, vals = zip(*((r, c, v % p) for (r, c), v in entries.items() if v % p))
    if not rows:
        return sp.csr_matrix(shape, dtype=np.int64)
    return sp.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=shape)


def mod_matmul(a, b, p):
    c = (a @ b)
    if sp.issparse(c):
        c = c.tocsr()
        c.data %= p
        c.eliminate_zeros()
        return c
    return c % p


def is_zero(m, p):
    if sp.issparse(m):
        m = m.tocsr()
        return not np.any(m.data % p)
    return not np.any(np.asarray(m) % p)


def group_blocks(keys):
    groups = defaultdict(list)
    for i, k in enumerate(keys):
        groups[k].append(i)
    return groups


class BlockRegistry:
    """Consistent integer ids for (weight, parity) rows across the degrees of one complex."""

    def __init__(self):
        self.ids = {}

    def encode(self, weight, parity):
        parity = np.asarray(parity, dtype=np.int64) % 2
        if weight is None:
            rows = parity.reshape(-1, 1)
        else:
            rows = np.hstack([np.asarray(weight, dtype=np.int64).reshape(len(parity), -1), parity.reshape(-1, 1)])
        if len(rows) == 0:
            return np.zeros(0, dtype=np.int64)
        uniq, inv = np.unique(rows, axis=0, return_inverse=True)
        lut = np.array([self.ids.setdefault(tuple(r.tolist()), len(self.ids)) for r in uniq], dtype=np.int64)
        return lut[np.asarray(inv).reshape(-1)]


_default_registry = BlockRegistry()


def encode_blocks(weight, parity, registry=None):
    """Integer block id per basis vector from an (n, r) weight array and parities."""
    return (registry or _default_registry).encode(weight, parity)


def _groups(ids):
    ids = np.asarray(ids)
    order = np.argsort(ids, kind="stable")
    vals, starts = np.unique(ids[order], return_index=True)
    ends = list(starts[1:]) + [len(order)]
    return {int(v): order[a:b] for v, a, b in zip(vals, starts, ends)}


def block_rank(m, row_blocks, col_blocks, p):
    """Rank of a matrix that is block diagonal with respect to the given block ids."""
    m = sp.csr_matrix(m)
    if m.shape[0] == 0 or m.shape[1] == 0:
        return 0
    if row_blocks is None or col_blocks is None:
        return fp.rank(m, p)
    rg = _groups(row_blocks)
    cg = _groups(col_blocks)
    tot = 0
    mc = m.tocsc()
    for k, cols in cg.items():
        rows = rg.get(k)
        if rows is None or not len(rows):
            continue
        sub = mc[:, cols].tocsr()[rows, :]
        if sub.nnz:
            tot += fp.rank(sub, p)
    return tot


class CochainComplex:
    def __init__(self, p, lo, hi):
        self.p = p
        self.lo = lo
        self.hi = hi
        self.basis = {}
        self.parity = {}
        self.level = {}
        self.weight = {}
        self.d = {}
        self.block = {}
        self.registry = BlockRegistry()

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, n):
        return len(self.basis.get(n, ()))

    def set_degree(self, n, basis, parity=None, level=None, weight=None):
        self.basis[n] = list(basis)
        k = len(self.basis[n])
        self.parity[n] = np.zeros(k, dtype=np.int64) if parity is None else np.asarray(parity, dtype=np.int64)
        self.level[n] = np.zeros(k, dtype=np.int64) if level is None else np.asarray(level, dtype=np.int64)
        self.weight[n] = None if weight is None or k == 0 else np.asarray(weight, dtype=np.int64).reshape(k, -1)
        self.block[n] = encode_blocks(self.weight[n], self.parity[n], self.registry)

    def diff(self, n):
        """Matrix of d: C^n -> C^{n+1}."""
        if n in self.d:
            return self.d[n]
        return sp.csr_matrix((self.dim(n + 1), self.dim(n)), dtype=np.int64)

    def block_keys(self, n):
        return self.block.get(n)

    def rank_d(self, n):
        if n < self.lo or n + 1 > self.hi and n not in self.d:
            return 0
        m = self.diff(n)
        if m.shape[0] == 0 or m.shape[1] == 0:
            return 0
        return block_rank(m, self.block_keys(n + 1), self.block_keys(n), self.p)

    def betti(self, n):
        """dim H^n; requires d[n] (into degree n+1) when n < hi."""
        return self.dim(n) - self.rank_d(n) - (self.rank_d(n - 1) if n > self.lo else 0)

    def rank_d_split(self, n):
        """rank d^n split by the parity of the source (d is even)."""
        out = np.zeros(2, dtype=np.int64)
        if n < self.lo or n >= self.hi or self.dim(n) == 0 or self.dim(n + 1) == 0:
            return out
        m = sp.csc_matrix(self.diff(n))
        for _, cols in _groups(self.block_keys(n)).items():
            sub = m[:, cols]
            if sub.nnz:
                rows = np.unique(sub.nonzero()[0])
                out[int(self.parity[n][cols[0]]) % 2] += fp.rank(sub.tocsr()[rows, :], self.p)
        return out

    def betti_parity(self, n):
        """(even, odd) dimensions of H^n."""
        par = np.asarray(self.parity[n]) % 2
        dims = np.array([np.count_nonzero(par == 0), np.count_nonzero(par == 1)])
        return dims - self.rank_d_split(n) - (self.rank_d_split(n - 1) if n > self.lo else 0)

    def betti_table(self, top=None):
        top = self.hi - 1 if top is None else top
        return [self.betti(n) for n in range(self.lo, top + 1)]

    def check_d_squared(self):
        bad = []
        for n in range(self.lo, self.hi - 1):
            if n in self.d and n + 1 in self.d:
                if not is_zero(mod_matmul(self.d[n + 1], self.d[n], self.p), self.p):
                    bad.append(n)
        return bad

    def cocycles(self, n):
        """Rows form a basis of ker d^n (dense)."""
        m = fp.to_dense(self.diff(n), self.p)
        return fp.rank_kernel_image(m, self.p).kernel

    def coboundaries(self, n):
        if n - 1 < self.lo:
            return np.zeros((0, self.dim(n)), dtype=np.int64)
        m = fp.to_dense(self.diff(n - 1), self.p)
        img = fp.rank_kernel_image(m, self.p).image
        return img.reshape(-1, self.dim(n))

    def cohomology(self, n):
        Z = self.cocycles(n)
        B = self.coboundaries(n)
        return fp.subquotient(Z, B, self.p, n=self.dim(n))

    def is_coboundary(self, n, vec):
        B = self.coboundaries(n)
        if B.shape[0] == 0:
            return not np.any(np.asarray(vec) % self.p)
        return fp.solve_linear(B.T, vec, self.p) is not None

    def filtration_preserved(self):
        for n, m in self.d.items():
            m = sp.coo_matrix(m)
            src = self.level[n][m.col]
            dst = self.level[n + 1][m.row]
            if np.any(dst < src):
                return False
        return True


def chain_homology_dims(dims, mats, p, keys=None):
    """Homology of a chain complex C_0 <- C_1 <- ... ; mats[n] : C_n -> C_{n-1}.

    Returns dims of H_n for n = 0..len(dims)-2 (the top degree only feeds ranks).
    """
    ranks = {}
    for n, m in mats.items():
        if keys is not None:
            ranks[n] = block_rank(m, keys[n - 1], keys[n], p)
        else:
            ranks[n] = fp.rank(sp.csr_matrix(m), p) if m.shape[0] and m.shape[1] else 0
    out = []
    for n in range(len(dims) - 1):
        out.append(dims[n] - ranks.get(n, 0) - ranks.get(n + 1, 0))
    return out
