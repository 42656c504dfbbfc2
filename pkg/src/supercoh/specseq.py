"""Spectral sequences of finite filtered cochain complexes over F_p.

Filtrations are decreasing and spanned by basis vectors: F^i C^n is the span
of the basis vectors of degree n whose level is at least i.  Page
dimensions come from ranks of corner submatrices of the differential,

    dim E_r^{i}(n) = dim Z_r^i - dim Z_{r-1}^{i+1} - dim (d Z_{r-1}^{i-r+1} mod F^{i+1}),

with dim Z_r^i = dim F^i - rank(d | F^i -> C / F^{i+r}) and the last term
equal to rank(d | F^q -> C / F^{i+1}) - rank(d | F^q -> C / F^i), q = i-r+1.
Explicit pages (representatives, page differentials) are built densely per
block for small complexes and cross-checked against the rank formula.

Bidegrees follow the usual convention (i, j) with i the filtration index and
i + j the total degree.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from . import fp
from .complexes import _groups


class NotInPage(ValueError):
    pass


INF = 10**9


def lambda_s_dim(s, t, a):
    """dim of the degree-a part of Lambda(k^s) (x) S(k^t)."""
    if a < 0:
        return 0
    tot = 0
    for u in range(min(a, s) + 1):
        b = a - u
        tot += comb(s, u) * (comb(t + b - 1, b) if t else (1 if b == 0 else 0))
    return tot


def e1_closed_form(s, t, p, i, j, dim_m=1):
    """dim E_1^{i,j}: sum over a + p b = i, a + 2 b = i + j of dim Lambda_s^a * dim S^b(k^s)."""
    tot = 0
    for b in range(0, i // p + 1):
        a = i - p * b
        if a < 0 or a + 2 * b != i + j:
            continue
        tot += lambda_s_dim(s, t, a) * (comb(s + b - 1, b) if s else (1 if b == 0 else 0))
    return dim_m * tot


class FilteredComplex:
    """A cochain complex (``complexes.CochainComplex``) viewed as filtered by its basis levels."""

    def __init__(self, C, top=None):
        self.C = C
        self.p = C.p
        # page data in degree n needs d^n, so the usable range stops below C.hi
        self.top = C.hi - 1 if top is None else min(top, C.hi - 1)
        self._csc = {}
        self._rho = {}
        self._blk = {}

    # -- per-degree bookkeeping
    def level(self, n):
        if n < self.C.lo or n > self.C.hi:
            return np.zeros(0, dtype=np.int64)
        return np.asarray(self.C.level[n], dtype=np.int64)

    def parity(self, n):
        if n < self.C.lo or n > self.C.hi:
            return np.zeros(0, dtype=np.int64)
        return np.asarray(self.C.parity[n], dtype=np.int64) % 2

    def levels(self, n):
        return sorted(set(self.level(n).tolist()))

    def check_filtration(self):
        return self.C.filtration_preserved()

    def _d(self, n):
        if n not in self._csc:
            self._csc[n] = sp.csc_matrix(self.C.diff(n)) if self.C.lo <= n < self.C.hi else None
        return self._csc[n]

    def _blocks(self, n):
        if n not in self._blk:
            b = self.C.block_keys(n) if self.C.lo <= n <= self.C.hi else None
            if b is None:
                b = self.parity(n)
            self._blk[n] = _groups(b) if len(b) else {}
        return self._blk[n]

    def f_dim(self, n, i):
        """dim F^i C^n split by parity."""
        lv, par = self.level(n), self.parity(n)
        m = lv >= i
        return np.array([np.count_nonzero(m & (par == 0)), np.count_nonzero(m & (par == 1))])

    def rho(self, n, a, b):
        """rank(d^n : F^a C^n -> C^{n+1} / F^b C^{n+1}) split by the parity of the source."""
        if b <= a:
            return np.zeros(2, dtype=np.int64)
        prof = self._profile(n)
        if prof is None:
            return np.zeros(2, dtype=np.int64)
        src, dst, cum = prof
        ka = np.searchsorted(src, a, side="left")
        kb = np.searchsorted(dst, b, side="right")
        if ka >= len(src) or kb == 0:
            return np.zeros(2, dtype=np.int64)
        return cum[kb - 1, ka]

    def _profile(self, n):
        """Rank profile of d^n with respect to (row level, column level) corners.

        Rows are inserted in increasing level into an echelon basis whose
        pivot is the last nonzero column, columns ordered by increasing
        level.  Each reduced row is the original row plus earlier rows, so the
        rank of the corner (row level < b, column level >= a) equals the number
        of stored rows with level < b whose pivot column has level >= a.
        """
        if n in self._rho:
            return self._rho[n]
        d = self._d(n)
        if d is None or d.shape[0] == 0 or d.shape[1] == 0:
            self._rho[n] = None
            return None
        lv_src, lv_dst = self.level(n), self.level(n + 1)
        par = self.parity(n)
        src = np.array(self.levels(n), dtype=np.int64)
        dst = np.array(self.levels(n + 1), dtype=np.int64)
        counts = np.zeros((len(dst), len(src), 2), dtype=np.int64)
        dr = d.tocsr()
        for _, cols in self._blocks(n).items():
            cols = cols[np.argsort(lv_src[cols], kind="stable")]
            sub = dr[:, cols].tocsr()
            rows = np.unique(sub.nonzero()[0])
            if not len(rows):
                continue
            rows = rows[np.argsort(lv_dst[rows], kind="stable")]
            ech = fp.SparseEchelon(len(cols), self.p)
            mask = ech.insert(sub[rows, :].T)
            e = int(par[cols[0]])
            piv = np.array([int(ech.store_i[k][-1]) for k in range(ech.rank)], dtype=np.int64)
            rl = np.searchsorted(dst, lv_dst[rows[np.asarray(mask, dtype=bool)]])
            cl = np.searchsorted(src, lv_src[cols[piv]])
            np.add.at(counts, (rl, cl, e), 1)
        # cum[k, m] = stored rows with row level <= dst[k] and pivot level >= src[m]
        cum = np.cumsum(np.cumsum(counts[:, ::-1, :], axis=1)[:, ::-1, :], axis=0)
        self._rho[n] = (src, dst + 1, cum)
        return self._rho[n]

    # -- pages
    def page_dim(self, r, i, n):
        """(even, odd) dimension of E_r^{i, n-i}."""
        z_r = self.f_dim(n, i) - self.rho(n, i, i + r)
        z_r1 = self.f_dim(n, i + 1) - self.rho(n, i + 1, i + r)
        q = i - r + 1
        bd = self.rho(n - 1, q, i + 1) - self.rho(n - 1, q, i)
        return z_r - z_r1 - bd

    def infinity_dim(self, i, n):
        return self.page_dim(INF // 2, i, n)

    def stable_page(self, n):
        """Smallest r with E_r = E_infinity in total degree n (from the level spread)."""
        spans = [0]
        for a, b in ((n, n + 1), (n - 1, n)):
            la, lb = self.levels(a), self.levels(b)
            if la and lb:
                spans.append(max(lb) - min(la))
        return max(spans) + 1

    def filtration_range(self, n):
        lv = self.levels(n)
        return (min(lv), max(lv)) if lv else (0, -1)

    def page_table(self, r, top=None):
        """{(i, j): (even, odd)} for total degrees up to top (nonzero entries only)."""
        top = self.top if top is None else top
        out = {}
        for n in range(self.C.lo, top + 1):
            lo, hi = self.filtration_range(n)
            for i in range(lo, hi + 1):
                dims = self.page_dim(r, i, n)
                if dims.sum():
                    out[(i, n - i)] = tuple(int(x) for x in dims)
        return out

    def total_dims(self, r, top=None):
        top = self.top if top is None else top
        tab = self.page_table(r, top)
        tot = [0] * (top + 1 - self.C.lo)
        for (i, j), dims in tab.items():
            tot[i + j - self.C.lo] += sum(dims)
        return tot

    def betti(self, top=None):
        top = self.top if top is None else top
        return [self.C.betti(n) for n in range(self.C.lo, top + 1)]

    # -- representative-level checks
    def _block_of(self, n, vec):
        """Block id (from the complex's block keys) containing the support of a homogeneous vector."""
        nz = np.nonzero(np.asarray(vec) % self.p)[0]
        if not len(nz):
            return None
        keys = self.C.block_keys(n)
        if keys is None:
            return None
        ids = set(np.asarray(keys)[nz].tolist())
        if len(ids) != 1:
            raise ValueError("vector is not homogeneous for the block decomposition")
        return ids.pop()

    def _restrict(self, n, blk):
        """Column indices of the block in degree n (all columns when blocks are absent)."""
        if blk is None:
            return np.arange(self.C.dim(n))
        return np.asarray(self._blocks(n).get(blk, np.zeros(0, dtype=np.int64)))

    def _solvable(self, rows_src, src_cols, rhs):
        """Is there y supported on src_cols with (d restricted to rows) y = rhs?"""
        A, rows = rows_src
        if A is None or not len(src_cols):
            return not np.any(rhs % self.p)
        sub = fp.to_dense(A[rows, :][:, src_cols], self.p)
        return fp.solve_linear(sub, rhs, self.p) is not None

    def track_class(self, n, vec, r_max=None):
        """Follow the class of ``vec`` (in F^i C^n, nonzero in gr_i) through the pages.

        Returns a ``ClassTrack``: ``permanent`` when every d_r with r <= r_max
        vanishes on the class, ``dies_at`` the first page on which the class
        has become zero (it was hit by an earlier differential).
        """
        p = self.p
        vec = np.asarray(vec, dtype=np.int64) % p
        lv = self.level(n)
        nz = np.nonzero(vec)[0]
        if not len(nz):
            raise NotInPage("zero representative")
        i = int(lv[nz].min())
        r_max = self.stable_page(n) if r_max is None else r_max
        blk = self._block_of(n, vec)
        cols_n = self._restrict(n, blk)
        cols_m = self._restrict(n - 1, blk) if n - 1 >= self.C.lo else np.zeros(0, dtype=np.int64)
        d_n = self._d(n)
        d_m = self._d(n - 1) if n - 1 >= self.C.lo else None
        lv1 = self.level(n + 1)
        dvec = (d_n @ vec) % p if d_n is not None else np.zeros(0, dtype=np.int64)
        track = ClassTrack(n=n, i=i, j=n - i, r_max=r_max)
        for r in range(1, r_max + 1):
            # alive on E_r: the gr_i part is not hit by d of Z_{r-1}^{i-r+1}
            alive = True
            if d_m is not None:
                q = i - r + 1
                src = cols_m[self.level(n - 1)[cols_m] >= q]
                lvn = lv[cols_n]
                rows = cols_n[lvn <= i]
                A = d_m.tocsr()
                # rows with level < i must vanish, rows of level i must match vec
                rhs = np.where(lv[rows] == i, vec[rows], 0)
                alive = not self._solvable((A, rows), src, rhs)
            if not alive and r == 1:
                raise NotInPage(f"class at ({i}, {n - i}) is already zero on E_1")
            if not alive:
                # a zero class stays in the kernel of every later d_r
                track.dies_at = r
                track.permanent = True
                return track
            # d_1..d_r vanish on the class iff vec + y has d in F^{i+r+1} for some y in F^{i+1}
            if d_n is not None:
                A = d_n.tocsr()
                rows = np.nonzero(lv1 < i + r + 1)[0]
                if blk is not None:
                    rows = np.intersect1d(rows, self._restrict(n + 1, blk))
                src = cols_n[lv[cols_n] >= i + 1]
                ok = self._solvable((A, rows), src, (-dvec[rows]) % p)
                if not ok:
                    track.first_nonzero_dr = r
                    return track
            track.survived = r
        track.permanent = True
        return track


@dataclass
class ClassTrack:
    n: int
    i: int
    j: int
    r_max: int
    survived: int = 0
    dies_at: int = None
    first_nonzero_dr: int = None
    permanent: bool = False

    @property
    def survives(self):
        return self.permanent and self.dies_at is None

    def verdict(self):
        if self.dies_at is not None:
            return f"permanent, boundary from page {self.dies_at}"
        if self.permanent:
            return f"permanent through r={self.r_max}"
        return f"d_{self.first_nonzero_dr} nonzero"


def permanent_cycle_check(F, n, vec, r_max=None):
    return F.track_class(n, vec, r_max)


# ---------------------------------------------------------------- explicit pages


@dataclass
class Page:
    r: int
    spots: dict = field(default_factory=dict)  # (i, n) -> SubquotientBasis in block-local coordinates
    diff: dict = field(default_factory=dict)  # (i, n) -> matrix E_r^{i,n} -> E_r^{i+r,n+1}

    def dim(self, i, n):
        s = self.spots.get((i, n))
        return 0 if s is None else s.dim


class ExplicitPages:
    """Dense page-by-page construction inside one block of a filtered complex.

    Degrees lo..top are kept; ``block`` selects the basis vectors with that
    block id in every degree (all of them when None).
    """

    def __init__(self, F, block=None, top=None):
        self.F = F
        self.p = F.p
        C = F.C
        self.top = F.top if top is None else top
        self.idx = {}
        self.lv = {}
        self.mat = {}
        for n in range(C.lo, self.top + 2):
            if n > C.hi:
                break
            cols = F._restrict(n, block) if block is not None else np.arange(C.dim(n))
            self.idx[n] = np.asarray(cols, dtype=np.int64)
            self.lv[n] = F.level(n)[self.idx[n]]
        for n in range(C.lo, self.top + 1):
            if n + 1 in self.idx:
                d = sp.csr_matrix(C.diff(n))
                self.mat[n] = fp.to_dense(d[self.idx[n + 1], :][:, self.idx[n]], self.p)

    def _dim(self, n):
        return len(self.idx.get(n, ()))

    def _z(self, n, q, r):
        """Basis rows of Z_r^q in degree n (block-local coordinates)."""
        k = self._dim(n)
        sel = np.nonzero(self.lv[n] >= q)[0]
        if not len(sel):
            return np.zeros((0, k), dtype=np.int64)
        if n not in self.mat:
            out = np.zeros((len(sel), k), dtype=np.int64)
            out[np.arange(len(sel)), sel] = 1
            return out
        rows = np.nonzero(self.lv[n + 1] < q + r)[0]
        if len(rows):
            ker = fp.rank_kernel_image(self.mat[n][np.ix_(rows, sel)], self.p).kernel
        else:
            ker = np.eye(len(sel), dtype=np.int64)
        out = np.zeros((ker.shape[0], k), dtype=np.int64)
        out[:, sel] = ker
        return out

    def _denominator(self, n, i, r):
        k = self._dim(n)
        if k == 0:
            return np.zeros((0, 0), dtype=np.int64)
        parts = [self._z(n, i + 1, r - 1)]
        if n - 1 in self.mat:
            w = self._z(n - 1, i - r + 1, r - 1)
            if w.shape[0]:
                parts.append((w @ self.mat[n - 1].T) % self.p)
        st = np.concatenate([x.reshape(-1, k) for x in parts], axis=0)
        return fp.row_basis(st, self.p) if st.shape[0] else st

    def spot(self, n, i, r):
        Z = self._z(n, i, r)
        D = self._denominator(n, i, r)
        return fp.subquotient(Z, D, self.p, n=self._dim(n))

    def page(self, r, degrees=None):
        degrees = range(self.F.C.lo, self.top + 1) if degrees is None else degrees
        pg = Page(r)
        for n in degrees:
            lv = sorted(set(self.lv[n].tolist()))
            for i in lv:
                pg.spots[(i, n)] = self.spot(n, i, r)
        for (i, n), sq in list(pg.spots.items()):
            if n not in self.mat or sq.dim == 0:
                continue
            tgt = pg.spots.get((i + r, n + 1))
            if tgt is None:
                tgt = self.spot(n + 1, i + r, r)
            if tgt.dim == 0:
                pg.diff[(i, n)] = np.zeros((0, sq.dim), dtype=np.int64)
                continue
            cols = []
            for x in sq.reps:
                y = (self.mat[n] @ x) % self.p
                cols.append(tgt.coords(y, self.p))
            pg.diff[(i, n)] = np.array(cols, dtype=np.int64).T % self.p
        return pg

    def verify(self, r_max):
        """d_r^2 = 0 and dim E_{r+1} = dim H(E_r, d_r), at every spot with n <= top - 1."""
        bad = []
        pages = [self.page(r) for r in range(r_max + 2)]
        for r in range(r_max + 1):
            pg, nxt = pages[r], pages[r + 1]
            for (i, n), m in pg.diff.items():
                nxt_m = pg.diff.get((i + r, n + 1))
                if nxt_m is not None and m.size and nxt_m.size:
                    if np.any((nxt_m @ m) % self.p):
                        bad.append(("d_r^2", r, i, n))
            for (i, n), sq in pg.spots.items():
                if n >= self.top:
                    continue
                out = pg.diff.get((i, n))
                inc = pg.diff.get((i - r, n - 1))
                rk_out = fp.rank(out, self.p) if out is not None and out.size else 0
                rk_in = fp.rank(inc, self.p) if inc is not None and inc.size else 0
                if sq.dim - rk_out - rk_in != nxt.dim(i, n):
                    bad.append(("homology", r, i, n))
        return bad, pages


def explicit_blocks(F, n):
    """Block ids present in degree n."""
    return list(F._blocks(n).keys())


# ---------------------------------------------------------------- comparison


def colblock_rank(m, col_blocks, p):
    """Rank of a matrix whose column blocks have pairwise disjoint row supports."""
    m = sp.csc_matrix(m)
    if m.shape[0] == 0 or m.shape[1] == 0:
        return 0
    owner = np.full(m.shape[0], -1, dtype=np.int64)
    tot = 0
    for k, cols in _groups(col_blocks).items():
        sub = m[:, cols]
        rows = np.unique(sub.indices)
        if not len(rows):
            continue
        if np.any((owner[rows] >= 0) & (owner[rows] != k)):
            raise ValueError("column blocks share rows; block ranks do not add up")
        owner[rows] = k
        tot += fp.rank(sub.tocsr()[rows, :], p)
    return tot


@dataclass
class ComparisonReport:
    spots: dict  # (i, j) -> (dim E_1, dim D_1, rank of induced map)

    @property
    def bijective(self):
        return all(e == d == r for e, d, r in self.spots.values())


def compare_E_D(FE, FD, mu_star, top):
    """Induced map E_1 -> D_1 of a filtration-preserving cochain map mu_star[n]: C_E^n -> C_D^n.

    D is assumed to have a zero E_0-differential (so D_1 = D_0); the map is
    bijective on E_1^{i,j} iff dim E_1 = dim D_0 = rank of gr(mu*) on Z(E_0).
    The last quantity is rank([gr mu*; d_0]) - rank(d_0) per filtration level.
    """
    p = FE.p
    spots = {}
    for n in range(FE.C.lo, top + 1):
        M = sp.coo_matrix(mu_star[n])
        lvE, lvD = FE.level(n), FD.level(n)
        if np.any(lvD[M.row] < lvE[M.col]):
            raise ValueError("mu* does not preserve the filtration")
        keep = lvD[M.row] == lvE[M.col]
        grmu = sp.csr_matrix((M.data[keep] % p, (M.row[keep], M.col[keep])), shape=M.shape)
        dE = sp.coo_matrix(FE.C.diff(n)) if n < FE.C.hi else sp.coo_matrix((0, FE.C.dim(n)))
        lv1 = FE.level(n + 1)
        if dE.nnz:
            k0 = lv1[dE.row] == lvE[dE.col]
            d0 = sp.csr_matrix((dE.data[k0], (dE.row[k0], dE.col[k0])), shape=dE.shape)
        else:
            d0 = sp.csr_matrix(dE.shape, dtype=np.int64)
        blocks = FE.C.block_keys(n)
        for i in sorted(set(lvE.tolist()) | set(lvD.tolist())):
            ce = np.nonzero(lvE == i)[0]
            rd = np.nonzero(lvD == i)[0]
            eb = blocks[ce] if blocks is not None else np.zeros(len(ce), dtype=np.int64)
            stack = sp.vstack([grmu[rd, :][:, ce], d0[:, ce]]).tocsr() if len(ce) else None
            if stack is None:
                r_mu = 0
            else:
                r_mu = colblock_rank(stack, eb, p) - colblock_rank(d0[:, ce], eb, p)
            dimE = int(FE.page_dim(1, i, n).sum())
            dimD = int(FD.page_dim(1, i, n).sum())
            if dimE or dimD or r_mu:
                spots[(i, n - i)] = (dimE, dimD, r_mu)
    return ComparisonReport(spots)


def gr_zero(F, n):
    """Is the E_0-differential of F zero in degree n?"""
    d = sp.coo_matrix(F.C.diff(n))
    if not d.nnz:
        return True
    d.data %= F.p
    lv0, lv1 = F.level(n), F.level(n + 1)
    return not np.any((lv1[d.row] == lv0[d.col]) & (d.data != 0))


# ---------------------------------------------------------------- reindexing


def reindex(table, scheme, p):
    """Relabel page data keyed by (r, i, j) in the original indexing.

    jantzen: new E_r^{a,b} = old E_{(p-2)r+1}^{(p-1)a+b, -(p-2)a}; old pages
    whose index is not of that form carry no new information and are dropped.
    friedlander-parshall: the jantzen E_r^{a,b} is placed at E_{2r}^{2a, b-a}.
    """
    if scheme == "may-original":
        return dict(table)
    if scheme == "jantzen":
        out = {}
        for (r, i, j), dims in table.items():
            a, b = jantzen_index(i, j, p)
            if a is None or (r - 1) % (p - 2):
                continue
            out[((r - 1) // (p - 2), a, b)] = dims
        return out
    if scheme == "friedlander-parshall":
        out = {}
        for (r, i, j), dims in table.items():
            a, b = jantzen_index(i, j, p)
            if a is None or (r - 1) % (p - 2):
                continue
            out[(2 * ((r - 1) // (p - 2)), 2 * a, b - a)] = dims
        return out
    raise ValueError(f"unknown reindexing scheme {scheme!r}")


def jantzen_index(i, j, p):
    """(a, b) with i = (p-1)a + b and j = -(p-2)a, or (None, None)."""
    if j % (p - 2):
        return None, None
    a = -j // (p - 2)
    return a, i - (p - 1) * a
