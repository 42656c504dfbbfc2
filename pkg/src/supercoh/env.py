"""PBW normal forms in U(L) and V(L), Hopf structure, and the dual bialgebra V(L)*.

A PBW monomial is an exponent tuple of length s+t: even exponents first
(capped at p-1 in V(L)), then odd exponents in {0, 1}.  Elements are dicts
{monomial: coefficient mod p}.  Normal forms are produced by right
multiplication by a single generator, moving it left past larger letters
with ab = (-1)^{|a||b|} ba + [a, b]; y y = 1/2 [y, y] for odd y and, in
V(L), x^p = x^[p].
"""

from functools import lru_cache
from math import comb

import numpy as np


class AmbientMismatch(ValueError):
    pass


def _add(acc, m, c, p):
    v = (acc.get(m, 0) + c) % p
    if v:
        acc[m] = v
    else:
        acc.pop(m, None)


class Env:
    def __init__(self, L, restricted=True):
        self.L = L
        self.p = L.p
        self.restricted = restricted
        self.s, self.t, self.n = L.s, L.t, L.n
        self.half = pow(2, self.p - 2, self.p)
        self.one_mono = (0,) * self.n
        self._par = tuple(L.parity(i) for i in range(self.n))
        self._rmul = lru_cache(maxsize=None)(self._rmul_gen)
        self._mmul = lru_cache(maxsize=None)(self._mono_mul)
        self._basis = None

    # -- small helpers
    def one(self):
        return {self.one_mono: 1}

    def generator(self, k):
        m = [0] * self.n
        m[k] = 1
        return {tuple(m): 1}

    def from_vector(self, vec):
        out = {}
        for k, c in enumerate(vec):
            if c % self.p:
                _add(out, self.generator(k).popitem()[0], int(c), self.p)
        return out

    def add(self, a, b):
        out = dict(a)
        for m, c in b.items():
            _add(out, m, c, self.p)
        return out

    def scale(self, a, c):
        c %= self.p
        if not c:
            return {}
        return {m: (v * c) % self.p for m, v in a.items()}

    def length(self, m):
        return sum(m)

    def parity(self, m):
        return sum(m[self.s:]) % 2

    def word(self, m):
        w = []
        for k, e in enumerate(m):
            w.extend([k] * e)
        return w

    def counit(self, a):
        return a.get(self.one_mono, 0) % self.p

    # -- normal form
    def _rmul_gen(self, m, g):
        """m * e_g as a tuple of (monomial, coeff)."""
        p = self.p
        L = self.L
        z = -1
        for k in range(self.n - 1, -1, -1):
            if m[k]:
                z = k
                break
        if g > z:
            mm = list(m)
            mm[g] += 1
            return ((tuple(mm), 1),)
        out = {}
        mm = list(m)
        mm[z] -= 1
        mp = tuple(mm)
        if g == z:
            if g < self.s:
                e = m[g] + 1
                if self.restricted and e == p:
                    for k in range(self.n):
                        c = int(L.r[g, k])
                        if c:
                            for mon, v in self._rmul(self._drop(m, g, e - 1), k):
                                _add(out, mon, c * v, p)
                    return tuple(out.items())
                mm = list(m)
                mm[g] = e
                return ((tuple(mm), 1),)
            # odd square: y y = 1/2 [y, y]
            for k in range(self.n):
                c = int(L.c[g, g, k])
                if c:
                    for mon, v in self._rmul(mp, k):
                        _add(out, mon, c * self.half * v, p)
            return tuple(out.items())
        # g < z : m' z g = (-1)^{|z||g|} m' g z + m' [z, g]
        sign = -1 if self._par[z] and self._par[g] else 1
        for mon, v in self._rmul(mp, g):
            for mon2, v2 in self._rmul(mon, z):
                _add(out, mon2, sign * v * v2, p)
        for k in range(self.n):
            c = int(L.c[z, g, k])
            if c:
                for mon, v in self._rmul(mp, k):
                    _add(out, mon, c * v, p)
        return tuple(out.items())

    def _drop(self, m, g, e):
        mm = list(m)
        mm[g] -= e
        return tuple(mm)

    def _mono_mul(self, m1, m2):
        if not any(m2):
            return ((m1, 1),)
        # peel the last letter of m2
        z = max(k for k in range(self.n) if m2[k])
        rest = self._drop(m2, z, 1)
        out = {}
        for mon, v in self._mmul(m1, rest):
            for mon2, v2 in self._rmul(mon, z):
                _add(out, mon2, v * v2, self.p)
        return tuple(out.items())

    def mul(self, a, b):
        out = {}
        p = self.p
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                for mon, v in self._mmul(m1, m2):
                    _add(out, mon, c1 * c2 * v, p)
        return out

    def mono_mul(self, m1, m2):
        return dict(self._mmul(m1, m2))

    def normalize(self, word, coeff=1):
        """Normal form of coeff * e_{w_1} ... e_{w_k}."""
        cur = {self.one_mono: coeff % self.p}
        for g in word:
            nxt = {}
            for mon, v in cur.items():
                for mon2, v2 in self._rmul(mon, g):
                    _add(nxt, mon2, v * v2, self.p)
            cur = nxt
        return cur

    pbw_normalize = normalize

    def power_of_generator(self, i, e):
        return self.normalize([i] * e)

    def convert(self, a, other):
        """Re-normalize an element of another ambient (e.g. U -> V) in this one."""
        out = {}
        for m, c in a.items():
            for mon, v in self.normalize(other.word(m) if other else self.word(m), c).items():
                _add(out, mon, v, self.p)
        return out

    # -- Hopf structure
    def mono_coproduct(self, m):
        """Coproduct of a PBW monomial as a list of (coeff, left, right)."""
        s, p = self.s, self.p
        terms = [((), (), 1)]
        for k in range(s):
            e = m[k]
            new = []
            for l, r, c in terms:
                for i in range(e + 1):
                    b = comb(e, i) % p
                    if b:
                        new.append((l + (i,), r + (e - i,), c * b))
            terms = new
        odd = [k for k in range(s, self.n) if m[k]]
        out = []
        for l, r, c in terms:
            for mask in range(1 << len(odd)):
                left = [0] * self.t
                right = [0] * self.t
                sign = 1
                for a, k in enumerate(odd):
                    if mask >> a & 1:
                        left[k - s] = 1
                        # letters of the right part that precede k
                        for b in range(a):
                            if not (mask >> b & 1):
                                sign = -sign
                    else:
                        right[k - s] = 1
                out.append(((c * sign) % p, l + tuple(left), r + tuple(right)))
        return [x for x in out if x[0]]

    def coproduct(self, a):
        out = {}
        for m, c in a.items():
            for v, l, r in self.mono_coproduct(m):
                _add(out, (l, r), c * v, self.p)
        return out

    def antipode(self, a):
        out = {}
        for m, c in a.items():
            w = self.word(m)
            k = len(w)
            nodd = sum(1 for g in w if self._par[g])
            sign = (-1) ** k * (-1) ** (nodd * (nodd - 1) // 2)
            for mon, v in self.normalize(list(reversed(w)), sign * c).items():
                _add(out, mon, v, self.p)
        return out

    def tensor_mul(self, a, b):
        """Product in V (x) V with the super sign (a'(x)a'')(b'(x)b'')."""
        out = {}
        for (a1, a2), c1 in a.items():
            for (b1, b2), c2 in b.items():
                sign = -1 if self.parity(a2) and self.parity(b1) else 1
                for m1, v1 in self._mmul(a1, b1):
                    for m2, v2 in self._mmul(a2, b2):
                        _add(out, (m1, m2), sign * c1 * c2 * v1 * v2, self.p)
        return out

    # -- finite basis of V(L)
    def basis(self):
        if not self.restricted:
            raise AmbientMismatch("U(L) is infinite dimensional")
        if self._basis is None:
            ranges = [range(self.p)] * self.s + [range(2)] * self.t
            monos = [()]
            for r in ranges:
                monos = [m + (e,) for m in monos for e in r]
            monos.sort(key=lambda m: (sum(m), m))
            self._basis = monos
            self._index = {m: i for i, m in enumerate(monos)}
        return self._basis

    def index(self, m):
        self.basis()
        return self._index[m]

    def dim(self):
        return len(self.basis())

    def left_mult_matrix(self, a):
        """Matrix of left multiplication by a on the PBW basis."""
        B = self.basis()
        M = np.zeros((len(B), len(B)), dtype=np.int64)
        for j, m in enumerate(B):
            for mon, v in self.mul(a, {m: 1}).items():
                M[self._index[mon], j] = v
        return M

    def structure_constants(self):
        """Array T[i, j, k] with m_i m_j = sum_k T[i, j, k] m_k."""
        B = self.basis()
        d = len(B)
        T = np.zeros((d, d, d), dtype=np.int64)
        for i, a in enumerate(B):
            for j, b in enumerate(B):
                for mon, v in self._mmul(a, b):
                    T[i, j, self._index[mon]] = v
        return T

    def gr_structure_constants(self):
        """Associated graded multiplication for the monomial-length filtration."""
        B = self.basis()
        T = self.structure_constants()
        ln = np.array([sum(m) for m in B])
        keep = ln[None, None, :] == (ln[:, None, None] + ln[None, :, None])
        return np.where(keep, T, 0)

    def rho(self, M, a):
        """Action matrix of an element on a supermodule M."""
        out = np.zeros((M.dim, M.dim), dtype=np.int64)
        for m, c in a.items():
            out = (out + c * self.rho_mono(M, m)) % self.p
        return out

    def rho_mono(self, M, m):
        key = (id(M), m)
        cache = self.__dict__.setdefault("_rho_cache", {})
        if key not in cache:
            r = np.eye(M.dim, dtype=np.int64)
            for g in self.word(m):
                r = (r @ M.rho[g]) % self.p
            cache[key] = r
        return cache[key]


class DualBialgebra:
    """V(L)* on the basis dual to PBW monomials.

    ``prod[a, b, c]`` is the coefficient of xi_c in xi_a xi_b (transpose of the
    coproduct of V) and ``cop[c, a, b]`` the coefficient of xi_a (x) xi_b in
    Delta(xi_c) (transpose of the multiplication of V).  Both carry the sign
    (-1)^{|a||b|} from evaluating a tensor of functionals on a tensor.
    """

    def __init__(self, V):
        self.V = V
        self.p = V.p
        B = V.basis()
        d = len(B)
        self.basis = B
        self.dim = d
        self.level = np.array([sum(m) for m in B], dtype=np.int64)
        self.par = np.array([V.parity(m) for m in B], dtype=np.int64)
        prod = np.zeros((d, d, d), dtype=np.int64)
        for c, m in enumerate(B):
            for v, l, r in V.mono_coproduct(m):
                a, b = V.index(l), V.index(r)
                sign = -1 if self.par[a] and self.par[b] else 1
                prod[a, b, c] = (prod[a, b, c] + sign * v) % self.p
        self.prod = prod
        T = V.structure_constants()
        sgn = np.where((self.par[:, None] * self.par[None, :]) % 2 == 1, -1, 1)
        self.cop = (np.transpose(T, (2, 0, 1)) * sgn[None, :, :]) % self.p
        self.unit = np.zeros(d, dtype=np.int64)
        self.unit[V.index(V.one_mono)] = 1

    def mul(self, f, g):
        return np.einsum("a,b,abc->c", f, g, self.prod) % self.p

    def power(self, f, k):
        out = self.unit.copy()
        for _ in range(k):
            out = self.mul(out, f)
        return out

    def coproduct(self, f):
        return np.einsum("c,cab->ab", f, self.cop) % self.p

    def in_ideal_power(self, f, n):
        """Membership in I_eps^n: f vanishes on all monomials of length < n."""
        f = np.asarray(f) % self.p
        return not np.any(f[self.level < n])

    def filtration_level(self, f):
        f = np.asarray(f) % self.p
        nz = np.nonzero(f)[0]
        if nz.size == 0:
            return None
        return int(self.level[nz].min())
