"""The Koszul resolution Y(L) = U(L) (x) Lambda(L0) (x) Gamma(L1), its quotient W(L), and Lie superalgebra cohomology.

Elements of Y(L) (or W(L)) are dicts {(u, m): c} meaning c * u m with u a
PBW monomial of the ambient (U(L) or V(L)) and m a ``CGAMonomial``.  The
product of Y(L) is the smash product: for a generator z of L and m in
Lambda (x) Gamma,

    z m = (-1)^{|z||m|} m z + ad_z(m),

where ad_z is the even-degree derivation with ad_z(<x>) = s([z, x]),
ad_z(gamma_r(y)) = s([z, y]) gamma_{r-1}(y), and s sends an even vector w to
<w> and an odd one to gamma_1(w).
"""

from functools import lru_cache
from math import comb

import numpy as np

from . import fp
from .complexes import CochainComplex, sparse_from_entries
from .env import Env, _add
from .grading import CGAMonomial, cga_basis, cga_coproduct, cga_multiply, elem_add, elem_multiply


def _unit_mono(L):
    return CGAMonomial((), (0,) * L.t, (0,) * L.s)


def s_map(L, vec):
    """The degree-one embedding s: L -> Ybar_1."""
    out = {}
    zg = (0,) * L.t
    zp = (0,) * L.s
    for k in range(L.n):
        c = int(vec[k]) % L.p
        if not c:
            continue
        if k < L.s:
            m = CGAMonomial((k,), zg, zp)
        else:
            g = [0] * L.t
            g[k - L.s] = 1
            m = CGAMonomial((), tuple(g), zp)
        elem_add(out, m, c, L.p)
    return out


def _gamma_mono(L, gam, ext=()):
    return CGAMonomial(tuple(ext), tuple(gam), (0,) * L.s)


def _factors(L, m):
    """m as an ordered product of <x_i> and gamma_a(y_l) factors: (kind, index, a, parity)."""
    out = [("x", i, 1, 0) for i in m.ext]
    out += [("y", l, a, a % 2) for l, a in enumerate(m.gam) if a]
    return out


def _factor_mono(L, f):
    kind, i, a, _ = f
    if kind == "x":
        return _gamma_mono(L, (0,) * L.t, (i,))
    g = [0] * L.t
    g[i] = a
    return _gamma_mono(L, g)


class KoszulAlgebra:
    """Differential and smash product on Y(L) or W(L) for a fixed ambient."""

    def __init__(self, L, ambient="U"):
        self.L = L
        self.p = L.p
        self.ambient = ambient
        self.E = Env(L, restricted=(ambient == "V"))
        self.one = _unit_mono(L)
        self.half = pow(2, self.p - 2, self.p)
        self._ad = {}
        self._mgen = {}
        self._move = {}
        self._d = {}

    # -- derivation ad_z
    def ad(self, z, m):
        key = (z, m)
        if key in self._ad:
            return self._ad[key]
        L, p = self.L, self.p
        zpar = L.parity(z)
        facs = _factors(L, m)
        monos = [{_factor_mono(L, f): 1} for f in facs]
        out = {}
        prefix_par = 0
        for k, f in enumerate(facs):
            kind, i, a, fpar = f
            idx = i if kind == "x" else L.s + i
            img = s_map(L, L.c[z, idx])
            if img:
                if kind == "y" and a > 1:
                    g = [0] * L.t
                    g[i] = a - 1
                    img = elem_multiply(img, {_gamma_mono(L, g): 1}, p)
                sign = -1 if zpar and prefix_par else 1
                acc = {self.one: sign}
                for kk in range(len(facs)):
                    acc = elem_multiply(acc, img if kk == k else monos[kk], p)
                    if not acc:
                        break
                for mm, c in acc.items():
                    elem_add(out, mm, c, p)
            prefix_par ^= fpar
        self._ad[key] = out
        return out

    def mono_times_gen(self, m, z):
        """m * e_z as a dict {(u, m'): c} with u in {1, e_z}."""
        key = (m, z)
        if key in self._mgen:
            return self._mgen[key]
        L, p, E = self.L, self.p, self.E
        sign = -1 if L.parity(z) and m.par else 1
        out = {}
        zmono = next(iter(E.generator(z)))
        _add(out, (zmono, m), sign, p)
        for mm, c in self.ad(z, m).items():
            _add(out, (E.one_mono, mm), -sign * c, p)
        self._mgen[key] = out
        return out

    def move_past(self, m, u):
        """m * u for a PBW monomial u, rewritten as sum of u' m'."""
        key = (m, u)
        if key in self._move:
            return self._move[key]
        E, p = self.E, self.p
        cur = {(E.one_mono, m): 1}
        for z in E.word(u):
            nxt = {}
            for (u1, m1), c1 in cur.items():
                for (u2, m2), c2 in self.mono_times_gen(m1, z).items():
                    for u3, c3 in E.mono_mul(u1, u2).items():
                        _add(nxt, (u3, m2), c1 * c2 * c3, p)
            cur = nxt
        self._move[key] = cur
        return cur

    def mul(self, a, b):
        """Product in Y(L): (u1 m1)(u2 m2) = u1 (m1 u2) m2."""
        E, p = self.E, self.p
        out = {}
        for (u1, m1), c1 in a.items():
            for (u2, m2), c2 in b.items():
                for (u3, m3), c3 in self.move_past(m1, u2).items():
                    cm, m4 = cga_multiply(m3, m2, p)
                    if not cm:
                        continue
                    for u4, c4 in E.mono_mul(u1, u3).items():
                        _add(out, (u4, m4), c1 * c2 * c3 * c4 * cm, p)
        return out

    def lift(self, elem):
        """Embed a Lambda (x) Gamma element as 1 (x) elem."""
        return {(self.E.one_mono, m): c for m, c in elem.items()}

    # -- the differential
    def d_mono(self, m):
        """Explicit Koszul differential of a basis monomial, {(u, m'): c}."""
        if m in self._d:
            return self._d[m]
        out = self._koszul(m)
        self._d[m] = out
        return out

    def _koszul(self, m):
        L, p, E = self.L, self.p, self.E
        s, t = L.s, L.t
        ext, gam = m.ext, m.gam
        b = len(ext)
        zg = (0,) * t
        zp = (0,) * s
        out = {}

        def put(u, elem, c):
            for mm, v in elem.items():
                _add(out, (u, mm), c * v, p)

        def ext_mono(I):
            return CGAMonomial(tuple(I), zg, zp)

        def gam_mono(A):
            return CGAMonomial((), tuple(A), zp)

        def minus(A, *ls):
            B = list(A)
            for l in ls:
                B[l] -= 1
            return tuple(B)

        gam_elem = {gam_mono(gam): 1}
        one_u = E.one_mono
        # generators moved into the coefficient
        for j in range(b):
            rest = ext[:j] + ext[j + 1:]
            u = next(iter(E.generator(ext[j])))
            put(u, {CGAMonomial(rest, gam, zp): 1}, (-1) ** j)
        for l in range(t):
            if gam[l]:
                u = next(iter(E.generator(s + l)))
                put(u, {CGAMonomial(ext, minus(gam, l), zp): 1}, (-1) ** b)
        # <x> with <x>
        for j in range(b):
            for l in range(j + 1, b):
                br = s_map(L, L.c[ext[j], ext[l]])
                if not br:
                    continue
                rest = ext[:j] + ext[j + 1:l] + ext[l + 1:]
                prod = elem_multiply(elem_multiply(br, {ext_mono(rest): 1}, p), gam_elem, p)
                put(one_u, prod, (-1) ** (j + l))
        # <x> with gamma
        for j in range(b):
            rest = ext[:j] + ext[j + 1:]
            for l in range(t):
                if not gam[l]:
                    continue
                br = s_map(L, L.c[ext[j], s + l])
                if not br:
                    continue
                g = elem_multiply(br, {gam_mono(minus(gam, l)): 1}, p)
                prod = elem_multiply({ext_mono(rest): 1}, g, p)
                put(one_u, prod, (-1) ** (j + 1))
        # gamma with gamma
        ext_elem = {ext_mono(ext): 1}
        for j in range(t):
            if not gam[j]:
                continue
            for l in range(j + 1, t):
                if not gam[l]:
                    continue
                br = s_map(L, L.c[s + j, s + l])
                if not br:
                    continue
                prod = elem_multiply(elem_multiply(br, ext_elem, p), {gam_mono(minus(gam, j, l)): 1}, p)
                put(one_u, prod, -1)
            if gam[j] >= 2:
                br = s_map(L, L.c[s + j, s + j])
                if br:
                    prod = elem_multiply(elem_multiply(br, ext_elem, p), {gam_mono(minus(gam, j, j)): 1}, p)
                    put(one_u, prod, -self.half)
        return out

    def d(self, elem):
        """Differential on a general element, using d(u m) = u d(m)."""
        E, p = self.E, self.p
        out = {}
        for (u, m), c in elem.items():
            for (u2, m2), c2 in self.d_mono(m).items():
                for u3, c3 in E.mono_mul(u, u2).items():
                    _add(out, (u3, m2), c * c2 * c3, p)
        return out

    def coproduct(self, elem):
        """Coproduct on Lambda (x) Gamma elements (constant coefficients)."""
        out = {}
        for m, c in elem.items():
            for v, a, b in cga_coproduct(m, self.p):
                elem_add(out, (a, b), c * v, self.p)
        return out


def ybar_basis(L, n):
    return list(cga_basis(L.s, L.t, n))


def cga_weight(L, W, m):
    w = np.zeros(W.shape[1], dtype=np.int64)
    for i in m.ext:
        w += W[i]
    for l, a in enumerate(m.gam):
        w += a * W[L.s + l]
    for i, c in enumerate(m.gamp):
        w += c * L.p * W[i]
    return w


def env_weight(W, u):
    return np.asarray(u, dtype=np.int64) @ W if W.shape[1] else np.zeros(0, dtype=np.int64)


class KoszulComplex:
    """Bases of Ybar_n for n <= N together with the differential over U(L) or V(L)."""

    def __init__(self, L, N, ambient="U"):
        self.L = L
        self.N = N
        self.alg = KoszulAlgebra(L, ambient)
        self.E = self.alg.E
        self.basis = {n: ybar_basis(L, n) for n in range(N + 1)}
        self.index = {n: {m: i for i, m in enumerate(B)} for n, B in self.basis.items()}

    def d(self, m):
        return self.alg.d_mono(m)

    def check_d_squared(self):
        bad = []
        for n in range(2, self.N + 1):
            for m in self.basis[n]:
                if self.alg.d(self.d(m)):
                    bad.append(m)
        return bad

    def filtration_preserved(self):
        for n in range(1, self.N + 1):
            for m in self.basis[n]:
                lvl = n
                for (u, m2), _ in self.d(m).items():
                    if sum(u) + m2.deg > lvl:
                        return False
        return True


def build_Y_complex(L, N, ambient="U"):
    return KoszulComplex(L, N, ambient)


def koszul_differential(m, L, ambient="U"):
    return KoszulAlgebra(L, ambient).d_mono(m)


def hom_cochain_complex(L, E, M, bases, dmono, N, W=None, Wm=None, levels=None):
    """Cochains Hom_A(A (x) Xbar_n, M) = M (x) Xbar_n^* for a free complex over the ambient E.

    ``dmono(m)`` returns the differential of a basis monomial as {(u, m'): c}.
    The differential is (df)(x) = (-1)^n f(dx) with the super sign
    f(u x') = (-1)^{|u||f|} rho(u) f(x').
    """
    p = L.p
    C = CochainComplex(p, 0, N)
    C.module = M
    C.xbasis = bases
    use_w = W is not None and W.shape[1] > 0
    for n in range(N + 1):
        keys, par, wt, lv = [], [], [], []
        for m in bases[n]:
            wm = cga_weight(L, W, m) if use_w else None
            lvl = 0 if levels is None else levels(m)
            for a in range(M.dim):
                keys.append((a, m))
                par.append((M.parity[a] + m.par) % 2)
                lv.append(lvl)
                if use_w:
                    wt.append(wm - Wm[a])
        C.set_degree(n, keys, parity=par, level=lv, weight=wt if use_w else None)
    for n in range(N):
        sidx = {m: k for k, m in enumerate(bases[n])}
        ent = {}
        sgn_n = -1 if n % 2 else 1
        for r, mt in enumerate(bases[n + 1]):
            for (u, mk), c in dmono(mt).items():
                k = sidx[mk]
                rho = E.rho_mono(M, u)
                upar = E.parity(u)
                for a in range(M.dim):
                    fpar = (M.parity[a] + mk.par) % 2
                    s = -1 if upar and fpar else 1
                    col = k * M.dim + a
                    for bb in np.nonzero(rho[:, a])[0]:
                        key = (r * M.dim + int(bb), col)
                        ent[key] = ent.get(key, 0) + sgn_n * s * c * int(rho[bb, a])
        C.d[n] = sparse_from_entries(ent, (C.dim(n + 1), C.dim(n)), p)
    return C


def lie_cochain_complex(L, M, N, weights=True):
    """C^n(L, M) = M (x) Ybar_n^* for 0 <= n <= N (differential up to degree N-1 -> N)."""
    from .liesuper import weight_lattice

    K = KoszulComplex(L, N, "U")
    if weights:
        W, (Wm,) = weight_lattice(L, [M])
    else:
        W = Wm = None
    C = hom_cochain_complex(L, K.E, M, K.basis, K.d, N, W, Wm)
    C.koszul = K
    C.W = W
    return C


class LieCohomology:
    def __init__(self, complex_, betti, bases):
        self.complex = complex_
        self.betti = betti
        self.bases = bases


def lie_cohomology(L, M, N, with_bases=False):
    """dim H^n(L, M) for n < N (degree N only feeds the rank of d^{N-1})."""
    C = lie_cochain_complex(L, M, N)
    betti = [C.betti(n) for n in range(N)]
    bases = {n: C.cohomology(n) for n in range(N)} if with_bases else None
    return LieCohomology(C, betti, bases)


def abelian_lie_betti(s, t, n):
    return sum(comb(s, a) * comb(t + n - a - 1, n - a) for a in range(min(s, n) + 1)) if t else comb(s, n)


# -- cup product on C(L, k)


def cup_product_lie(f, g, basis_f, basis_g, basis_out, p):
    """(f . g)(m) = sum over Delta m of (-1)^{|m'||m''| + par m' par m''} f(m') g(m'')."""
    fi = {m: int(f[i]) % p for i, m in enumerate(basis_f) if int(f[i]) % p}
    gi = {m: int(g[i]) % p for i, m in enumerate(basis_g) if int(g[i]) % p}
    out = np.zeros(len(basis_out), dtype=np.int64)
    if not fi or not gi:
        return out
    for r, m in enumerate(basis_out):
        tot = 0
        for c, a, b in cga_coproduct(m, p):
            fa = fi.get(a)
            if fa is None:
                continue
            gb = gi.get(b)
            if gb is None:
                continue
            e = (a.deg * b.deg + a.par * b.par) % 2
            tot += (-1 if e else 1) * c * fa * gb
        out[r] = tot % p
    return out


class LieCochainAlgebra:
    """C(L, k) with cup product, built on a cochain complex for trivial coefficients."""

    def __init__(self, L, N):
        from .liesuper import trivial_module

        self.L = L
        self.p = L.p
        self.N = N
        self.C = lie_cochain_complex(L, trivial_module(L), N)
        self.basis = self.C.koszul.basis

    def cup(self, f, a, g, b):
        return cup_product_lie(f, g, self.basis[a], self.basis[b], self.basis[a + b], self.p)

    def delta(self, f, n):
        return np.asarray(self.C.diff(n) @ np.asarray(f, dtype=np.int64)) % self.p

    def dual(self, m):
        n = m.deg
        v = np.zeros(len(self.basis[n]), dtype=np.int64)
        v[self.C.koszul.index[n][m]] = 1
        return v

    def generator(self, k):
        """Degree-one cochain dual to the k-th basis vector of L."""
        (m,) = s_map(self.L, np.eye(self.L.n, dtype=np.int64)[k]).keys()
        return self.dual(m)

    def power(self, f, e):
        out = self.dual(_unit_mono(self.L))
        deg = 0
        for _ in range(e):
            out = self.cup(out, deg, f, 1)
            deg += 1
        return out


# -- independent oracle: Lambda_s(L*) with the Chevalley-Eilenberg derivation


def _pair_sign(pars):
    """Value of g_1 . ... . g_n on z_1 ... z_n for degree-one duals of parities pars."""
    e = 0
    n = len(pars)
    for i in range(n):
        for j in range(i + 1, n):
            e += 1 + pars[i] * pars[j]
    return -1 if e % 2 else 1


class ExteriorSymmetricOracle:
    """Free graded-commutative algebra on L* with x* anticommuting and y* commuting.

    Monomials are (I, A): x*_I (increasing) times prod y*_l^{A_l}.  The
    differential is the derivation determined on generators by the transpose
    of the bracket.  ``matrix(n)`` is expressed in the basis dual to the
    standard monomials of Ybar, so it can be compared entry by entry with the
    Koszul-side cochain complex.
    """

    def __init__(self, L):
        self.L = L
        self.p = L.p
        self.half = pow(2, self.p - 2, self.p)

    def _mono_par(self, A):
        return sum(A) % 2

    def mul(self, a, b):
        p = self.p
        out = {}
        for (I1, A1), c1 in a.items():
            for (I2, A2), c2 in b.items():
                if set(I1) & set(I2):
                    continue
                # y*^{A1} passes x*_{I2}: each pair anticommutes
                sgn = -1 if (sum(A1) * len(I2)) % 2 else 1
                seq = list(I1) + list(I2)
                inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
                if inv % 2:
                    sgn = -sgn
                key = (tuple(sorted(seq)), tuple(x + y for x, y in zip(A1, A2)))
                v = (out.get(key, 0) + sgn * c1 * c2) % p
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out

    def generator(self, k):
        L = self.L
        zA = (0,) * L.t
        if k < L.s:
            return {((k,), zA): 1}
        A = [0] * L.t
        A[k - L.s] = 1
        return {((), tuple(A)): 1}

    def d_generator(self, k):
        """Coefficient of e_k in the brackets, placed on the dual quadratic monomials."""
        L, p = self.L, self.p
        s = L.s
        out = {}

        def acc(elem, c):
            for key, v in elem.items():
                out[key] = (out.get(key, 0) + c * v) % p

        for i in range(s):
            for j in range(i + 1, s):
                c = int(L.c[i, j, k])
                if c:
                    # dual of <x_i x_j> is eps * x_i* x_j*
                    acc(self.mul(self.generator(i), self.generator(j)), c * _pair_sign([0, 0]))
            for l in range(L.t):
                c = int(L.c[i, s + l, k])
                if c:
                    acc(self.mul(self.generator(i), self.generator(s + l)), c * _pair_sign([0, 1]))
        for j in range(L.t):
            for l in range(j, L.t):
                c = int(L.c[s + j, s + l, k])
                if not c:
                    continue
                if l == j:
                    c = c * self.half
                acc(self.mul(self.generator(s + j), self.generator(s + l)), c * _pair_sign([1, 1]))
        return {key: v for key, v in out.items() if v}

    def d(self, elem):
        """Derivation of degree one: d(ab) = d(a) b + (-1)^{deg a} a d(b)."""
        p = self.p
        out = {}
        for (I, A), c in elem.items():
            factors = [self.generator(i) for i in I]
            for l, a in enumerate(A):
                factors += [self.generator(self.L.s + l)] * a
            for pos in range(len(factors)):
                term = {((), (0,) * self.L.t): (-1) ** pos * c}
                for q, f in enumerate(factors):
                    term = self.mul(term, self.d_generator(self._gen_index(f)) if q == pos else f)
                    if not term:
                        break
                for key, v in term.items():
                    out[key] = (out.get(key, 0) + v) % p
        return {key: v for key, v in out.items() if v}

    def _gen_index(self, f):
        ((I, A),) = f.keys()
        if I:
            return I[0]
        return self.L.s + A.index(1)

    def standard_sign(self, m):
        """Value of the ordered product of generator duals on the monomial m."""
        pars = [0] * len(m.ext) + [1] * sum(m.gam)
        return _pair_sign(pars)

    def matrix(self, n):
        """Matrix of d: degree n -> n+1 in the basis dual to Ybar standard monomials."""
        L, p = self.L, self.p
        src = ybar_basis(L, n)
        dst = ybar_basis(L, n + 1)
        didx = {(m.ext, m.gam): i for i, m in enumerate(dst)}
        out = np.zeros((len(dst), len(src)), dtype=np.int64)
        for j, m in enumerate(src):
            # dual basis element = sign * product of generators
            img = self.d({(m.ext, m.gam): self.standard_sign(m)})
            for key, v in img.items():
                i = didx[key]
                tgt = dst[i]
                out[i, j] = (v * self.standard_sign(tgt)) % p
        return out
