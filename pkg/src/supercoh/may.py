"""The restricted resolution X(L) = W(L) (x) Gamma'(L0) with the twisted differential d_t.

Basis monomials of Xbar are ``CGAMonomial`` triples (ext, gam, gamp); the
gamp part is the Gamma'(L0) factor.  The twisting cochain t is a family of
maps Gamma'_{2n}(L0) -> Y_{2n-1}(L0) stored on monomial bases, with values
as Y(L) elements {(u, m): c} in the U(L) ambient.
"""

import numpy as np
import scipy.sparse as sp

from . import fp
from .complexes import BlockRegistry, chain_homology_dims, encode_blocks, sparse_from_entries
from .env import _add
from .grading import CGAMonomial, cga_basis, cga_coproduct, _compositions
from .koszul import KoszulAlgebra, cga_weight, env_weight, hom_cochain_complex, s_map
from .liesuper import trivial_module, weight_lattice


class NoSolution(ArithmeticError):
    pass


class NotCocycle(ArithmeticError):
    pass


def gammap_basis(L, n):
    """Monomials gamma'_C(x) of external degree 2n."""
    zg = (0,) * L.t
    return [CGAMonomial((), zg, c) for c in sorted(_compositions(n, L.s))] if L.s else ([] if n else [CGAMonomial((), zg, ())])


def _split(m):
    """Split an Xbar monomial into its W part and its Gamma' part."""
    s = len(m.gamp)
    return CGAMonomial(m.ext, m.gam, (0,) * s), CGAMonomial((), (0,) * len(m.gam), m.gamp)


def _join(w, b):
    return CGAMonomial(w.ext, w.gam, b.gamp)


def _elem_len(y):
    return max((sum(u) + m.deg for (u, m) in y), default=-1)


class TwistingCochain:
    """t_{2n}: Gamma'_{2n}(L0) -> Y_{2n-1}(L0), solved degree by degree.

    ``values[n][b]`` is t_{2n}(b) and ``residual[n][b]`` the exact element
    d(t_{2n}(b)) - r_n(b) in Y(L0) (zero for n >= 2, the central element
    x^p - x^[p] for n = 1).
    """

    def __init__(self, L, top):
        self.L = L
        self.p = L.p
        self.top = top
        self.Y = KoszulAlgebra(L, "U")
        self.values = {}
        self.rn = {}
        self.solve()

    def t2(self, i):
        L, E = self.L, self.Y.E
        p = self.p
        u = [0] * L.n
        u[i] = p - 1
        x = CGAMonomial((i,), (0,) * L.t, (0,) * L.s)
        out = {(tuple(u), x): 1}
        for m, c in s_map(L, L.r[i]).items():
            _add(out, (E.one_mono, m), -c, p)
        return out

    def __call__(self, b):
        n = sum(b.gamp)
        return self.values.get(n, {}).get(b, {})

    def r(self, n, b):
        """r_n(b) = sum_{j=1}^{n-1} t_{2j} . t_{2(n-j)} through the Gamma' coproduct."""
        out = {}
        for c, b1, b2 in cga_coproduct(b, self.p):
            j = sum(b1.gamp)
            if j == 0 or j == n:
                continue
            prod = self.Y.mul(self(b1), self(b2))
            for key, v in prod.items():
                _add(out, key, c * v, self.p)
        return out

    def solve(self):
        L = self.L
        if L.s == 0:
            return
        self.values[1] = {}
        for b in gammap_basis(L, 1):
            i = b.gamp.index(1)
            self.values[1][b] = self.t2(i)
        for n in range(2, self.top + 1):
            self.values[n] = {}
            self.rn[n] = {}
            basis = gammap_basis(L, n)
            rhs = {b: self.r(n, b) for b in basis}
            self.rn[n] = rhs
            need = [b for b in basis if rhs[b]]
            if not need:
                continue
            sols = self._solve_filtered(n, [rhs[b] for b in need])
            for b, sol in zip(need, sols):
                self.values[n][b] = sol

    def _unknowns(self, n):
        """Basis u<x_J> of F_{np-1} Y_{2n-1}(L0)."""
        L = self.L
        bound = n * self.p - 1 - (2 * n - 1)
        zg = (0,) * L.t
        zp = (0,) * L.s
        exts = [m.ext for m in cga_basis(L.s, 0, 2 * n - 1)]
        out = []
        for ln in range(bound + 1):
            for comp in _compositions(ln, L.s):
                u = tuple(comp) + (0,) * L.t
                for J in exts:
                    out.append((u, CGAMonomial(J, zg, zp)))
        return out

    def _solve_filtered(self, n, rhs_list):
        p = self.p
        unk = self._unknowns(n)
        rows = {}
        ent = {}
        for j, (u, m) in enumerate(unk):
            for key, v in self.Y.d({(u, m): 1}).items():
                i = rows.setdefault(key, len(rows))
                ent[(i, j)] = v
        for r in rhs_list:
            for key in r:
                rows.setdefault(key, len(rows))
        A = np.zeros((len(rows), len(unk)), dtype=np.int64)
        for (i, j), v in ent.items():
            A[i, j] = v % p
        out = []
        for r in rhs_list:
            vec = np.zeros(len(rows), dtype=np.int64)
            for key, v in r.items():
                vec[rows[key]] = v % p
            if not unk:
                raise NoSolution(f"t_{2 * n}: nonzero r_{n} but Y_{2 * n - 1}(L0) is zero")
            x = fp.solve_linear(A, vec, p)
            if x is None:
                raise NoSolution(f"t_{2 * n}: no solution inside F_{n * p - 1}")
            sol = {}
            for j in np.nonzero(x)[0]:
                _add(sol, unk[j], int(x[j]), p)
            out.append(sol)
        return out

    def residual(self, n, b, ambient="U"):
        """d(t(b)) - r_n(b), computed in Y(L0) (ambient U) or after projecting to W (ambient V)."""
        Y = self.Y
        dt = Y.d(self(b))
        out = dict(dt)
        for key, v in (self.r(n, b) if n >= 2 else {}).items():
            _add(out, key, -v, self.p)
        if ambient == "V":
            V = KoszulAlgebra(self.L, "V")
            return to_ambient(out, V, Y)
        return out

    def filtration_certificate(self):
        return {n: max((_elem_len(v) for v in vals.values()), default=-1) for n, vals in self.values.items()}

    def dump(self):
        lines = []
        for n in sorted(self.values):
            for b in sorted(self.values[n]):
                terms = " + ".join(f"{c}*{u}{m.ext}" for (u, m), c in sorted(self.values[n][b].items()))
                lines.append(f"t_{2 * n}({b.gamp}) = {terms or '0'}")
        return "\n".join(lines)


def to_ambient(elem, target, source):
    """Re-normalize the coefficients of a Y element in another ambient."""
    out = {}
    for (u, m), c in elem.items():
        for u2, v in target.E.normalize(source.E.word(u), c).items():
            _add(out, (u2, m), v, target.p)
    return out


def solve_twisting_cochain(L, N):
    return TwistingCochain(L, max(1, (N + 1) // 2))


class MayComplex:
    """Xbar_n for n <= N with d_t over V(L) and filtration levels."""

    def __init__(self, L, N, t=None):
        self.L = L
        self.p = L.p
        self.N = N
        self.t = t if t is not None else solve_twisting_cochain(L, N)
        self.W = KoszulAlgebra(L, "V")
        self.E = self.W.E
        self.basis = {n: list(cga_basis(L.s, L.t, n, primed=True)) for n in range(N + 1)}
        self.index = {n: {m: i for i, m in enumerate(B)} for n, B in self.basis.items()}
        self._tV = {}
        self._d = {}

    def level(self, m):
        return len(m.ext) + sum(m.gam) + self.p * sum(m.gamp)

    def t_V(self, b):
        if b not in self._tV:
            self._tV[b] = to_ambient(self.t(b), self.W, self.t.Y)
        return self._tV[b]

    def cap(self, m, r=None):
        """(w (x) b) cap r = sum over Delta b of (-1)^{deg w} sigma(w, r(b')) (x) b''."""
        r = self.t_V if r is None else r
        w, b = _split(m)
        out = {}
        sign = -1 if w.deg % 2 else 1
        wel = {(self.E.one_mono, w): 1}
        for c, b1, b2 in cga_coproduct(b, self.p):
            if not any(b1.gamp):
                continue
            val = r(b1)
            if not val:
                continue
            for (u, mm), v in self.W.mul(wel, val).items():
                _add(out, (u, _join(mm, b2)), sign * c * v, self.p)
        return out

    def d(self, m):
        """d_t of a basis monomial as {(v, m'): c}."""
        if m in self._d:
            return self._d[m]
        w, b = _split(m)
        out = {}
        for (u, mm), c in self.W.d_mono(w).items():
            _add(out, (u, _join(mm, b)), c, self.p)
        for key, c in self.cap(m).items():
            _add(out, key, c, self.p)
        self._d[m] = out
        return out

    def d_elem(self, elem):
        E, p = self.E, self.p
        out = {}
        for (u, m), c in elem.items():
            for (u2, m2), c2 in self.d(m).items():
                for u3, c3 in E.mono_mul(u, u2).items():
                    _add(out, (u3, m2), c * c2 * c3, p)
        return out

    def check_d_squared(self):
        bad = []
        for n in range(2, self.N + 1):
            for m in self.basis[n]:
                if self.d_elem(self.d(m)):
                    bad.append(m)
        return bad

    def filtration_preserved(self):
        for n in range(1, self.N + 1):
            for m in self.basis[n]:
                lvl = self.level(m)
                for (u, m2) in self.d(m):
                    if sum(u) + self.level(m2) > lvl:
                        return False
        return True

    def gr_d(self, m):
        """Part of d_t that preserves the filtration level exactly."""
        lvl = self.level(m)
        return {(u, m2): c for (u, m2), c in self.d(m).items() if sum(u) + self.level(m2) == lvl}

    # -- k-linear chain complex V (x) Xbar
    def weights(self):
        W, _ = weight_lattice(self.L)
        return W

    def chain_matrices(self, top=None, gr=False):
        E, p = self.E, self.p
        top = self.N if top is None else top
        VB = E.basis()
        W = self.weights()
        vw = np.array([env_weight(W, v) for v in VB], dtype=np.int64).reshape(len(VB), -1)
        vp = np.array([E.parity(v) for v in VB], dtype=np.int64)
        dims, keys, mats = [], [], {}
        reg = BlockRegistry()
        for n in range(top + 1):
            ws, ps = [], []
            for m in self.basis[n]:
                ws.append(vw + cga_weight(self.L, W, m))
                ps.append((vp + m.par) % 2)
            if ws:
                keys.append(encode_blocks(np.vstack(ws), np.concatenate(ps), reg))
            else:
                keys.append(np.zeros(0, dtype=np.int64))
            dims.append(len(keys[-1]))
        nv = len(VB)
        for n in range(1, top + 1):
            src_idx = self.index[n - 1]
            ent = {}
            for j, m in enumerate(self.basis[n]):
                dm = self.gr_d(m) if gr else self.d(m)
                for a, v in enumerate(VB):
                    for (u, m2), c in dm.items():
                        for u3, c3 in E.mono_mul(v, u).items():
                            if gr and sum(u3) != sum(v) + sum(u):
                                continue
                            i = src_idx[m2] * nv + E.index(u3)
                            key = (i, j * nv + a)
                            ent[key] = ent.get(key, 0) + c * c3
            mats[n] = sparse_from_entries(ent, (dims[n - 1], dims[n]), p)
        return dims, mats, keys

    def homology(self, top=None):
        """dim H_n(V (x) Xbar) for n = 0..top-1."""
        dims, mats, keys = self.chain_matrices(top)
        return chain_homology_dims(dims, mats, self.p, keys)

    def cochain_complex(self, M=None, with_weights=True):
        L = self.L
        M = trivial_module(L) if M is None else M
        if with_weights:
            W, (Wm,) = weight_lattice(L, [M])
        else:
            W = Wm = None
        C = hom_cochain_complex(L, self.E, M, self.basis, self.d, self.N, W, Wm, levels=self.level)
        C.may = self
        return C


def build_X_complex(L, t=None, N=None):
    return MayComplex(L, N, t)


def cap_action(X, m, r):
    return X.cap(m, r)


def verify_resolution(X, top=None):
    """Homology dims of V (x) Xbar up to degree top-1 and whether they match a resolution of k."""
    h = X.homology(top)
    return h, (h[0] == 1 and all(x == 0 for x in h[1:]))


class SpecialCocycles:
    def __init__(self, f, g, complex_):
        self.f = f
        self.g = g
        self.complex = complex_


def _dual_vec(C, n, m):
    v = np.zeros(C.dim(n), dtype=np.int64)
    v[C.basis[n].index((0, m))] = 1
    return v


def special_cocycles(X, C=None):
    """f_i dual to gamma_p(y_i) in degree p and g_j dual to gamma'_1(x_j) in degree 2."""
    L, p = X.L, X.p
    C = X.cochain_complex() if C is None else C
    f, g = [], []
    zg, zp = (0,) * L.t, (0,) * L.s
    if X.N >= p:
        for i in range(L.t):
            a = [0] * L.t
            a[i] = p
            v = _dual_vec(C, p, CGAMonomial((), tuple(a), zp))
            if p < X.N and np.any(C.diff(p) @ v % p):
                raise NotCocycle(f"f_{i + 1}")
            f.append(v)
    if X.N >= 2:
        for j in range(L.s):
            c = [0] * L.s
            c[j] = 1
            v = _dual_vec(C, 2, CGAMonomial((), zg, tuple(c)))
            if 2 < X.N and np.any(C.diff(2) @ v % p):
                raise NotCocycle(f"g_{j + 1}")
            g.append(v)
    return SpecialCocycles(f, g, C)


class MuMap:
    """Chain map mu: X(L) -> B(V) lifting the identity, on the generators Xbar.

    ``images[n][m]`` is mu(m) as {(z1, ..., zn): c} with non-unit PBW
    monomials; it is built as mu'_n = s . mu'_{n-1} . d_t in the normalized
    bar complex and read in B(V) through the inclusion of non-unit tuples.
    """

    def __init__(self, X, B, top):
        self.X = X
        self.B = B
        self.top = top
        p = X.p
        one = B.one
        self.images = {0: {m: {(): 1} for m in X.basis[0]}}
        for n in range(1, top + 1):
            cur = {}
            for m in X.basis[n]:
                out = {}
                for (v, mk), c in X.d(m).items():
                    if v == one:
                        continue
                    for zs, c2 in self.images[n - 1][mk].items():
                        _add(out, (v,) + zs, c * c2, p)
                cur[m] = out
            self.images[n] = cur

    def matrix(self, n, C=None):
        """Matrix of mu_n from Xbar_n into the cobar basis ordering of non-unit tuples."""
        B = self.B
        d = len(B.nonunit)
        rows, cols, vals = [], [], []
        for j, m in enumerate(self.X.basis[n]):
            for zs, c in self.images[n][m].items():
                i = 0
                for z in zs:
                    i = i * d + B.nu_index[z]
                rows.append(i)
                cols.append(j)
                vals.append(c % self.X.p)
        return sp.csr_matrix((vals, (rows, cols)), shape=(d**n, len(self.X.basis[n])), dtype=np.int64)

    def pullback(self, n, M=None):
        """mu^*: cobar cochains M (x) (V*)^n -> Hom_V(X_n, M).

        Cobar columns are ordered (alpha, z) with alpha most significant;
        Hom rows follow ``hom_cochain_complex``: (generator k, alpha).
        """
        dm = 1 if M is None else M.dim
        mt = sp.coo_matrix(self.matrix(n).T)
        D = len(self.B.nonunit) ** n
        a = np.arange(dm)
        rows = (mt.row[:, None] * dm + a[None, :]).ravel()
        cols = (a[None, :] * D + mt.col[:, None]).ravel()
        vals = np.repeat(mt.data, dm)
        return sp.csr_matrix((vals, (rows, cols)), shape=(mt.shape[0] * dm, dm * D), dtype=np.int64)

    def check_chain_map(self):
        """d(mu(m)) = mu(d_t m) in the normalized bar complex, for all generators up to top."""
        B, X, p = self.B, self.X, self.X.p
        bad = []
        for n in range(1, self.top + 1):
            for m in X.basis[n]:
                lhs = B.d({(B.one, zs): c for zs, c in self.images[n][m].items()}, normalized=True)
                rhs = {}
                for (v, mk), c in X.d(m).items():
                    for zs, c2 in self.images[n - 1][mk].items():
                        _add(rhs, (v, zs), c * c2, p)
                if lhs != rhs:
                    bad.append(m)
        return bad

    def check_filtration(self):
        for n in range(self.top + 1):
            for m in self.X.basis[n]:
                lvl = self.X.level(m)
                for zs in self.images[n][m]:
                    if sum(sum(z) for z in zs) > lvl:
                        return False
        return True

    def tuples_containing_power(self, n, j):
        """Generators m of degree n whose image contains [y_j]^n."""
        B, L = self.B, self.X.L
        y = [0] * L.n
        y[L.s + j] = 1
        key = (tuple(y),) * n
        return [m for m in self.X.basis[n] if key in self.images[n][m]]


def mu_chain_map(X, B=None, top=None):
    from .bar import BarAlgebra

    B = BarAlgebra(X.L) if B is None else B
    return MuMap(X, B, X.N if top is None else top)
