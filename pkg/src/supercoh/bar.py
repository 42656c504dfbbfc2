"""Bar and cobar complexes of V(L).

Bar chains are dicts {(z0, (z1, ..., zn)): c} with every z a PBW monomial of
V(L).  The cobar complex is built on normalized cochains: a basis cochain
delta_(alpha; z1..zn) sends [z1|...|zn] to the alpha-th basis vector of M and
vanishes on the other standard monomials, where every z_i is a non-unit PBW
monomial.  Its matrices are assembled from Kronecker products, so degree n
costs O(dim M * (dim V - 1)^(n+1)) memory.
"""

from math import comb

import numpy as np
import scipy.sparse as sp

from . import fp
from .complexes import CochainComplex, _groups
from .env import DualBialgebra, Env, _add
from .liesuper import trivial_module, weight_lattice

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, needed, budget):
        super().__init__(f"bar complex needs {needed} basis elements, budget is {budget}")
        self.needed = needed
        self.budget = budget


class ParityError(ValueError):
    pass


class BarAlgebra:
    """V(L) with the data needed by bar-side constructions."""

    def __init__(self, L):
        self.L = L
        self.p = L.p
        self.V = Env(L, restricted=True)
        self.basis = self.V.basis()
        self.dim = len(self.basis)
        self.one = self.V.one_mono
        self.length = np.array([sum(m) for m in self.basis], dtype=np.int64)
        self.par = np.array([self.V.parity(m) for m in self.basis], dtype=np.int64)
        # non-unit monomials, in basis order (the unit is index 0)
        self.nonunit = [m for m in self.basis if m != self.one]
        self.nu_index = {m: i for i, m in enumerate(self.nonunit)}
        self._T = None
        self._dual = None

    @property
    def dual(self):
        if self._dual is None:
            self._dual = DualBialgebra(self.V)
        return self._dual

    @property
    def T(self):
        if self._T is None:
            self._T = self.V.structure_constants()
        return self._T

    def eps(self, z):
        return 1 if z == self.one else 0

    # -- chains
    def d(self, chain, normalized=False):
        """Bar differential; with normalized=True, tuples containing 1 are dropped."""
        V, p = self.V, self.p
        out = {}
        for (z0, zs), c in chain.items():
            n = len(zs)
            if n == 0:
                continue
            for m, v in V.mono_mul(z0, zs[0]).items():
                _add(out, (m, zs[1:]), c * v, p)
            for i in range(n - 1):
                for m, v in V.mono_mul(zs[i], zs[i + 1]).items():
                    if normalized and m == self.one:
                        continue
                    _add(out, (z0, zs[:i] + (m,) + zs[i + 2:]), (-1) ** (i + 1) * c * v, p)
            if not normalized and zs[-1] == self.one:
                _add(out, (z0, zs[:-1]), (-1) ** n * c, p)
        return out

    def s(self, chain, normalized=False):
        """Contracting homotopy a0[a1|...|an] -> 1[a0|a1|...|an]."""
        out = {}
        for (z0, zs), c in chain.items():
            if normalized and z0 == self.one:
                continue
            _add(out, (self.one, (z0,) + zs), c, self.p)
        return out

    def augment(self, chain):
        return sum(c for (z0, zs), c in chain.items() if not zs and z0 == self.one) % self.p

    def chain_parity(self, key):
        z0, zs = key
        return (self.V.parity(z0) + sum(self.V.parity(z) for z in zs)) % 2

    def left_mul(self, a, chain):
        """a . chain for a in V (coefficient dict), acting on z0."""
        out = {}
        for m, ca in a.items():
            for (z0, zs), c in chain.items():
                for m2, v in self.V.mono_mul(m, z0).items():
                    _add(out, (m2, zs), ca * c * v, self.p)
        return out

    def filtration_level(self, chain):
        """Largest total monomial length appearing (the least i with chain in F_i)."""
        return max((sum(z0) + sum(sum(z) for z in zs) for (z0, zs) in chain), default=None)

    # -- diagonal approximation
    def diagonal(self, chain):
        """D(a0[a1|...|an]) = Delta(a0) . sum_i [a1'|...|ai'] (x) a1''...ai''[a_{i+1}|...|an].

        The result is a dict {(key_left, key_right): c}; the sign collects
        (-1)^{sum_{k<l<=i} a_k'' a_l'} and the Koszul sign of the diagonal
        action of Delta(a0).
        """
        V, p = self.V, self.p
        out = {}
        for (z0, zs), c in chain.items():
            gen = self._diag_generator(zs)
            for v0, l0, r0 in V.mono_coproduct(z0):
                for (kl, kr), cv in gen.items():
                    # (a'(x)a'')(x(x)y) = (-1)^{a'' x} a'x (x) a''y
                    sgn = -1 if V.parity(r0) and self.chain_parity(kl) else 1
                    for ml, vl in V.mono_mul(l0, kl[0]).items():
                        for mr, vr in V.mono_mul(r0, kr[0]).items():
                            _add(out, ((ml, kl[1]), (mr, kr[1])), sgn * c * v0 * cv * vl * vr, p)
        return out

    def _diag_generator(self, zs):
        V, p = self.V, self.p
        n = len(zs)
        out = {}
        for i in range(n + 1):
            # choose coproduct terms for a_1..a_i
            partial = [((), self.one, 0, 1)]  # (left tuple, product of rights, sum of right parities so far, coeff)
            for k in range(i):
                nxt = []
                for lt, prod, rpar, c in partial:
                    for v, l, r in V.mono_coproduct(zs[k]):
                        sgn = -1 if rpar and V.parity(l) else 1
                        for m, w in V.mono_mul(prod, r).items():
                            nxt.append((lt + (l,), m, (rpar + V.parity(r)) % 2, c * v * w * sgn))
                partial = nxt
            for lt, prod, _, c in partial:
                _add(out, ((self.one, lt), (prod, zs[i:])), c, p)
        return out

    def tensor_d(self, tchain, normalized=False):
        """(d (x) 1 + 1 (x) d) with the sign (-1)^{deg x} on the second factor."""
        out = {}
        for (kl, kr), c in tchain.items():
            for k2, v in self.d({kl: 1}, normalized).items():
                _add(out, (k2, kr), c * v, self.p)
            sgn = -1 if len(kl[1]) % 2 else 1
            for k2, v in self.d({kr: 1}, normalized).items():
                _add(out, (kl, k2), sgn * c * v, self.p)
        return out


def bar_differential(chain, B, normalized=False):
    return B.d(chain, normalized)


def contracting_homotopy(chain, B, normalized=False):
    return B.s(chain, normalized)


def diagonal_approximation(chain, B):
    return B.diagonal(chain)


# -- cobar complex


class ProductBasis:
    """Lazy ordered basis (alpha, (z1, ..., zn)) with alpha most significant."""

    def __init__(self, dim_m, d, n, names=None):
        self.dim_m = dim_m
        self.d = d
        self.n = n
        self.names = names

    def __len__(self):
        return self.dim_m * self.d**self.n

    def __getitem__(self, i):
        if i < 0 or i >= len(self):
            raise IndexError(i)
        zs = []
        for _ in range(self.n):
            i, r = divmod(i, self.d)
            zs.append(r)
        return i, tuple(reversed(zs))

    def index(self, key):
        a, zs = key
        i = a
        for z in zs:
            i = i * self.d + z
        return i

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _tuple_sum(vec, n):
    """Array over tuples of length n of sum_k vec[z_k] (lexicographic order)."""
    out = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        out = (out[:, None] + vec[None, :]).reshape(-1)
    return out


def _tuple_sum_rows(mat, n):
    out = np.zeros((1, mat.shape[1]), dtype=np.int64)
    for _ in range(n):
        out = (out[:, None, :] + mat[None, :, :]).reshape(-1, mat.shape[1])
    return out


def _eye(k):
    return sp.identity(k, dtype=np.int64, format="csr")


def _kron(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = sp.kron(out, m, format="csr")
    return out


class CobarComplex(CochainComplex):
    def __init__(self, B, M, top, budget=DEFAULT_BUDGET, gr=False, weights=True):
        p = B.p
        super().__init__(p, 0, top)
        L = B.L
        self.bar = B
        self.module = M
        self.gr = gr
        dm = M.dim
        d = len(B.nonunit)
        self.d_nu = d
        need = sum(dm * d**n for n in range(top + 1))
        if need > budget:
            raise BudgetExceeded(need, budget)
        nu_len = B.length[1:]
        nu_par = B.par[1:]
        mpar = np.array(M.parity, dtype=np.int64)
        if weights:
            W, (Wm,) = weight_lattice(L, [M])
        else:
            W = Wm = None
        use_w = W is not None and W.shape[1] > 0
        if use_w:
            nu_w = np.array([np.asarray(m, dtype=np.int64) @ W for m in B.nonunit], dtype=np.int64).reshape(d, -1)
        self.W = W
        for n in range(top + 1):
            lv = np.tile(_tuple_sum(nu_len, n), dm)
            par = (np.repeat(mpar, d**n) + np.tile(_tuple_sum(nu_par, n), dm)) % 2
            wt = None
            if use_w:
                # cochain weight: weight of the argument minus the weight of the value
                tw = _tuple_sum_rows(nu_w, n)
                wt = np.tile(tw, (dm, 1)) - np.repeat(Wm, d**n, axis=0)
            self.set_degree(n, ProductBasis(dm, d, n), parity=par, level=lv, weight=wt)
        self._mu = None
        self._R = None
        for n in range(top):
            self.d[n] = self._build(n)

    def _mu_matrix(self):
        """(d^2 x d) matrix of the product of non-unit monomials, constant part dropped."""
        if self._mu is None:
            T = self.bar.T[1:, 1:, 1:] % self.p
            d = T.shape[0]
            self._mu = sp.csr_matrix(T.reshape(d * d, d))
        return self._mu

    def _action_parts(self):
        if self._R is None:
            B, M, p = self.bar, self.module, self.p
            d, dm = self.d_nu, M.dim
            R0 = np.zeros((dm * d, dm), dtype=np.int64)
            R1 = np.zeros((dm * d, dm), dtype=np.int64)
            for w, mono in enumerate(B.nonunit):
                rho = B.V.rho_mono(M, mono) % p
                tgt = R1 if B.par[w + 1] else R0
                for b in range(dm):
                    tgt[b * d + w, :] = rho[b, :]
            sa = np.where(np.array(M.parity) % 2 == 1, -1, 1)
            self._R = (sp.csr_matrix(R0), sp.csr_matrix(R1 * sa[None, :]))
        return self._R

    def _build(self, n):
        p, d, dm = self.p, self.d_nu, self.module.dim
        sgn_n = -1 if n % 2 else 1
        R0, R1 = self._action_parts()
        srest = np.where(_tuple_sum(self.bar.par[1:], n) % 2 == 1, -1, 1)
        mat = _kron(R0, _eye(d**n)) + _kron(R1, sp.diags(srest, format="csr", dtype=np.int64))
        mat = sgn_n * mat
        mu = self._mu_matrix()
        for i in range(1, n + 1):
            term = _kron(_eye(dm * d ** (i - 1)), mu, _eye(d ** (n - i)))
            mat = mat + ((-1) ** (n + i)) * term
        mat = sp.csr_matrix(mat)
        mat.data %= p
        mat.eliminate_zeros()
        if self.gr:
            coo = mat.tocoo()
            keep = self.level[n + 1][coo.row] == self.level[n][coo.col]
            mat = sp.csr_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=mat.shape)
        return mat

    # -- cochain helpers
    def delta(self, n, alpha, monos):
        v = np.zeros(self.dim(n), dtype=np.int64)
        v[self.basis[n].index((alpha, tuple(self.bar.nu_index[m] for m in monos)))] = 1
        return v


def cobar_complex(L, M=None, top=5, budget=DEFAULT_BUDGET, gr=False, B=None, weights=True):
    B = B if B is not None else BarAlgebra(L)
    M = trivial_module(L) if M is None else M
    return CobarComplex(B, M, top, budget, gr, weights)


def cobar_differential(C, n, vec):
    return np.asarray(C.diff(n) @ np.asarray(vec, dtype=np.int64)) % C.p


def cochain_parity_split(B, n):
    return _tuple_sum(B.par[1:], n) % 2


def cup_product_bar(f, m, g, n, B, p):
    """(f . g)[a1|...|a_{m+n}] = (-1)^{mn + g-bar (a1+...+am)} f[a1..am] g[a_{m+1}..].

    f may carry module coefficients (alpha most significant); g is a
    trivial-coefficient cochain.  Inhomogeneous g is split by parity.
    """
    f = np.asarray(f, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    pf = cochain_parity_split(B, m)
    pg = cochain_parity_split(B, n)
    dm = len(f) // len(pf)
    sf = np.tile(np.where(pf == 1, -1, 1), dm)
    g_even = np.where(pg == 0, g, 0)
    g_odd = np.where(pg == 1, g, 0)
    out = np.kron(f, g_even) + np.kron(f * sf, g_odd)
    if (m * n) % 2:
        out = -out
    return out % p


def cbinom(p, i):
    return comb(p, i) // p


def beta_map(f, B):
    """beta(f) = sum_{i=1}^{p-1} c(p,i) f^i (x) f^{p-i} for an even 1-cochain f."""
    p = B.p
    f = np.asarray(f, dtype=np.int64) % p
    if np.any(f[B.par[1:] == 1]):
        raise ParityError("beta is defined on even cochains")
    D = B.dual
    full = np.concatenate([[0], f])
    pw = [D.unit]
    for _ in range(p - 1):
        pw.append(D.mul(pw[-1], full))
    out = np.zeros(len(f) ** 2, dtype=np.int64)
    for i in range(1, p):
        out = out + cbinom(p, i) * np.kron(pw[i][1:], pw[p - i][1:])
    return out % p


def beta_cross_term(f1, f2, B):
    """sum_{i=1}^{p-1} c(p,i) f1^i f2^{p-i} as a 1-cochain."""
    p = B.p
    D = B.dual
    a = np.concatenate([[0], np.asarray(f1) % p])
    b = np.concatenate([[0], np.asarray(f2) % p])
    out = np.zeros(len(a), dtype=np.int64)
    for i in range(1, p):
        out = out + cbinom(p, i) * D.mul(D.power(a, i), D.power(b, p - i))
    return (out % p)[1:]


def cochain_filtration_level(C, n, vec):
    vec = np.asarray(vec) % C.p
    nz = np.nonzero(vec)[0]
    if nz.size == 0:
        return None
    return int(C.level[n][nz].min())


class CohomologyClasses:
    """Blockwise basis of H^n of a cochain complex, with representative cocycles."""

    def __init__(self, C, n):
        self.C = C
        self.n = n
        p = C.p
        self.reps = []  # full-length cocycle vectors
        self.parity = []
        self._local = {}  # block -> (cols, B rows, reps rows, offset)
        dn = sp.csc_matrix(C.diff(n)) if n < C.hi else None
        dm = sp.csr_matrix(C.diff(n - 1)) if n - 1 >= C.lo else None
        blocks = _groups(C.block_keys(n)) if C.dim(n) else {}
        for blk, cols in sorted(blocks.items()):
            k = len(cols)
            if dn is not None:
                Z = fp.sparse_kernel(dn[:, cols], p)
            else:
                Z = np.eye(k, dtype=np.int64)
            if not Z.shape[0]:
                continue
            if dm is not None:
                Bm = fp.sparse_row_basis(dm[cols, :].T, p)
            else:
                Bm = np.zeros((0, k), dtype=np.int64)
            sq = fp.subquotient(Z, Bm, p, n=k)
            if not sq.dim:
                continue
            self._local[blk] = (cols, sq, len(self.reps))
            for r in sq.reps:
                v = np.zeros(C.dim(n), dtype=np.int64)
                v[cols] = r
                self.reps.append(v)
                self.parity.append(int(C.parity[n][cols[0]]) % 2)

    @property
    def dim(self):
        return len(self.reps)

    def coords(self, vec):
        """Coordinates of the class of a cocycle in the basis of representatives."""
        p = self.C.p
        vec = np.asarray(vec, dtype=np.int64) % p
        out = np.zeros(self.dim, dtype=np.int64)
        blocks = self.C.block_keys(self.n)
        for blk in set(blocks[np.nonzero(vec)[0]].tolist()):
            if blk not in self._local:
                if not self.is_coboundary_block(blk, vec):
                    raise fp.NotContained("cocycle outside the computed classes")
                continue
            cols, sq, off = self._local[blk]
            out[off:off + sq.dim] = sq.coords(vec[cols], p)
        return out % p

    def is_coboundary_block(self, blk, vec):
        C, p = self.C, self.C.p
        cols = np.nonzero(C.block_keys(self.n) == blk)[0]
        if self.n - 1 < C.lo:
            return not np.any(vec[cols] % p)
        sub = sp.csr_matrix(C.diff(self.n - 1))[cols, :].tocsc()
        src = np.unique(sub.nonzero()[1])
        if not len(src):
            return not np.any(vec[cols] % p)
        return fp.solve_linear(fp.to_dense(sub[:, src], p), vec[cols], p) is not None


class _LazyClasses(dict):
    def __init__(self, C):
        super().__init__()
        self.C = C

    def __missing__(self, n):
        self[n] = CohomologyClasses(self.C, n)
        return self[n]


def is_coboundary(C, n, vec):
    """Blockwise test of vec in the image of d^{n-1}."""
    vec = np.asarray(vec, dtype=np.int64) % C.p
    if not np.any(vec):
        return True
    h = CohomologyClasses.__new__(CohomologyClasses)
    h.C, h.n = C, n
    blocks = C.block_keys(n)
    return all(h.is_coboundary_block(b, vec) for b in set(blocks[np.nonzero(vec)[0]].tolist()))


class CohomologyRing:
    """Cup products on H^*(V(L), k) through the cobar complex, up to degree ``top``.

    The cobar complex must reach degree top + 1 so that H^top is known.
    """

    def __init__(self, C, top):
        if C.hi < top + 1:
            raise ValueError("cobar complex too short for the requested degree")
        self.C = C
        self.B = C.bar
        self.top = top
        self.p = C.p
        self.H = _LazyClasses(C)

    def betti(self):
        return [self.H[n].dim for n in range(self.top + 1)]

    def product(self, a, i, b, j):
        """Cocycle representing [class i of degree a] . [class j of degree b]."""
        return cup_product_bar(self.H[a].reps[i], a, self.H[b].reps[j], b, self.B, self.p)

    def product_coords(self, a, i, b, j):
        return self.H[a + b].coords(self.product(a, i, b, j))

    def commutator_is_zero(self, a, i, b, j):
        """[x][y] - (-1)^{ab + |x||y|} [y][x] is a coboundary."""
        sx, sy = self.H[a].parity[i], self.H[b].parity[j]
        sign = -1 if (a * b + sx * sy) % 2 else 1
        v = (self.product(a, i, b, j) - sign * self.product(b, j, a, i)) % self.p
        return is_coboundary(self.C, a + b, v)

    def graded_commutativity(self, max_total=None):
        """List of failing (a, i, b, j) over class pairs with a + b <= max_total."""
        max_total = self.top if max_total is None else max_total
        bad = []
        for a in range(1, max_total):
            for b in range(a, max_total - a + 1):
                if a + b > self.C.hi:
                    continue
                for i in range(self.H[a].dim):
                    for j in range(self.H[b].dim):
                        if not self.commutator_is_zero(a, i, b, j):
                            bad.append((a, i, b, j))
        return bad

    def new_generators(self):
        """Per degree: dim H^n minus the rank of products of lower positive-degree classes."""
        out = [0]
        for n in range(1, self.top + 1):
            rows = []
            for a in range(1, n):
                for i in range(self.H[a].dim):
                    for j in range(self.H[n - a].dim):
                        rows.append(self.product_coords(a, i, n - a, j))
            rk = fp.rank(np.array(rows, dtype=np.int64), self.p) if rows and self.H[n].dim else 0
            out.append(self.H[n].dim - rk)
        return out

    def product_table(self, a, b):
        """{(i, j): coordinate vector of [a_i][b_j] in H^{a+b}}."""
        return {(i, j): self.product_coords(a, i, b, j)
                for i in range(self.H[a].dim) for j in range(self.H[b].dim)}
