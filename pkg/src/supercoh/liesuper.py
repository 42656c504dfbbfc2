"""Restricted Lie superalgebras given by structure constants, and their supermodules.

Basis vectors are indexed 0..s-1 (even, x_1..x_s) followed by s..s+t-1 (odd,
y_1..y_t).  Brackets are stored as a dense array ``c[i, j, k]`` with
[e_i, e_j] = sum_k c[i, j, k] e_k, restrictions as ``r[i, k]`` for even i.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .fp import PrimeField


class ValidationError(ValueError):
    pass


@dataclass
class ValidationReport:
    ok: bool = True
    problems: list = field(default_factory=list)

    def fail(self, rule, witness, detail=""):
        self.ok = False
        self.problems.append((rule, witness, detail))

    def raise_if_bad(self):
        if not self.ok:
            rule, witness, detail = self.problems[0]
            raise ValidationError(f"{rule} violated at {witness} {detail}".strip())

    def __str__(self):
        if self.ok:
            return "valid"
        return "; ".join(f"{r} at {w}" for r, w, _ in self.problems)


class LieSuperAlgebra:
    def __init__(self, p, even, odd, brackets=None, restriction=None, name=""):
        self.field = PrimeField(p)
        self.p = self.field.p
        self.even = tuple(even)
        self.odd = tuple(odd)
        self.names = self.even + self.odd
        if len(set(self.names)) != len(self.names):
            raise ValidationError("basis names must be unique")
        self.s = len(self.even)
        self.t = len(self.odd)
        self.n = self.s + self.t
        self.name = name
        n = self.n
        self.c = np.zeros((n, n, n), dtype=np.int64)
        self.r = np.zeros((self.s, n), dtype=np.int64)
        self._given = {}
        for (a, b), combo in (brackets or {}).items():
            self.set_bracket(a, b, combo)
        for a, combo in (restriction or {}).items():
            i = self.index(a)
            if i >= self.s:
                raise ValidationError(f"restriction given for odd element {a}")
            for k, v in self._combo(combo).items():
                self.r[i, k] = v % self.p

    # -- construction helpers
    def index(self, name):
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown basis element {name!r}") from None

    def _combo(self, combo):
        if isinstance(combo, dict):
            return {self.index(k): int(v) for k, v in combo.items()}
        vec = np.asarray(combo, dtype=np.int64)
        return {k: int(v) for k, v in enumerate(vec) if v}

    def parity(self, i):
        return 0 if i < self.s else 1

    def set_bracket(self, a, b, combo):
        i, j = self.index(a), self.index(b)
        vals = self._combo(combo)
        # [e_j, e_i] = -(-1)^{|i||j|} [e_i, e_j]
        flip = 1 if self.parity(i) and self.parity(j) else -1
        self.c[i, j, :] = 0
        self.c[j, i, :] = 0
        for k, v in vals.items():
            self.c[i, j, k] = v % self.p
            if i != j:
                self.c[j, i, k] = (flip * v) % self.p
        self._given[(i, j)] = vals

    def copy_with(self, c=None, r=None):
        L = LieSuperAlgebra(self.p, self.even, self.odd, name=self.name)
        L.c = (self.c if c is None else c).copy() % self.p
        L.r = (self.r if r is None else r).copy() % self.p
        return L

    def abelianized(self):
        """Same superspace, zero bracket and zero restriction."""
        return self.copy_with(c=np.zeros_like(self.c), r=np.zeros_like(self.r))

    def even_part(self):
        L = LieSuperAlgebra(self.p, self.even, (), name=self.name + "_even")
        s = self.s
        L.c = self.c[:s, :s, :s].copy()
        L.r = self.r[:, :s].copy()
        return L

    # -- semantics
    def bracket_basis(self, i, j):
        return self.c[i, j]

    def bracket(self, a, b):
        """Bilinear extension of the table to coefficient vectors."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.einsum("i,j,ijk->k", a, b, self.c) % self.p

    extend_bracket = bracket

    def vec(self, name_or_combo):
        v = np.zeros(self.n, dtype=np.int64)
        if isinstance(name_or_combo, (str, int, np.integer)):
            v[self.index(name_or_combo)] = 1
        else:
            for k, c in self._combo(name_or_combo).items():
                v[k] = c % self.p
        return v

    def is_abelian(self):
        return not self.c.any()

    def has_trivial_restriction(self):
        return not self.r.any()

    def fingerprint_data(self):
        return (self.p, self.even, self.odd, self.c.tolist(), self.r.tolist())

    def __repr__(self):
        return f"LieSuperAlgebra({self.name or '?'}, p={self.p}, s={self.s}, t={self.t})"

    # -- validation
    def validate(self, check_centrality=True):
        return validate_algebra(self, check_centrality)


def validate_algebra(L, check_centrality=True):
    rep = ValidationReport()
    p, n, c = L.p, L.n, L.c
    par = [L.parity(i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if c[i, j, k] and par[k] != (par[i] + par[j]) % 2:
                    rep.fail("parity", (L.names[i], L.names[j]), f"-> {L.names[k]}")
    for i in range(n):
        for j in range(n):
            sgn = -1 if par[i] and par[j] else 1
            if np.any((c[i, j] + sgn * c[j, i]) % p):
                rep.fail("super skew-symmetry", (L.names[i], L.names[j]))
    for a in range(n):
        for b in range(n):
            for d in range(n):
                # (-1)^{ad}[a,[b,d]] + (-1)^{ba}[b,[d,a]] + (-1)^{db}[d,[a,b]] = 0
                tot = np.zeros(n, dtype=np.int64)
                for x, y, z in ((a, b, d), (b, d, a), (d, a, b)):
                    sgn = -1 if par[x] and par[z] else 1
                    tot += sgn * (c[y, z] @ c[x])
                if np.any(tot % p):
                    rep.fail("super Jacobi", (L.names[a], L.names[b], L.names[d]))
    for i in range(L.s):
        if np.any(L.r[i, L.s:] % p):
            rep.fail("restriction lands in even part", (L.names[i],))
    if check_centrality and rep.ok:
        from .env import Env

        U = Env(L, restricted=False)
        for i in range(L.s):
            z = U.add(U.power_of_generator(i, p), U.scale(U.from_vector(L.r[i]), -1))
            for k in range(n):
                g = U.generator(k)
                com = U.add(U.mul(z, g), U.scale(U.mul(g, z), -1))
                if com:
                    rep.fail("centrality of x^p - x^[p]", (L.names[i], L.names[k]))
    return rep


class Supermodule:
    def __init__(self, L, dim, parity, action, name=""):
        self.L = L
        self.p = L.p
        self.dim = int(dim)
        self.parity = tuple(int(x) % 2 for x in parity)
        if len(self.parity) != self.dim:
            raise ValidationError("parity vector has wrong length")
        a = np.zeros((L.n, self.dim, self.dim), dtype=np.int64)
        if isinstance(action, dict):
            for k, m in action.items():
                a[L.index(k)] = np.asarray(m, dtype=np.int64).reshape(self.dim, self.dim)
        else:
            a[:] = np.asarray(action, dtype=np.int64).reshape(L.n, self.dim, self.dim)
        self.rho = a % L.p
        self.name = name

    def act(self, i, vec):
        return (self.rho[i] @ np.asarray(vec, dtype=np.int64)) % self.p

    def validate(self, restricted=True):
        return validate_supermodule(self, self.L, restricted)


def trivial_module(L):
    return Supermodule(L, 1, (0,), np.zeros((L.n, 1, 1), dtype=np.int64), name="k")


def adjoint_module(L):
    rho = np.zeros((L.n, L.n, L.n), dtype=np.int64)
    for i in range(L.n):
        rho[i] = L.c[i].T
    return Supermodule(L, L.n, [L.parity(i) for i in range(L.n)], rho, name="adjoint")


def matpow(m, e, p):
    out = np.eye(m.shape[0], dtype=np.int64)
    base = m % p
    while e:
        if e & 1:
            out = (out @ base) % p
        base = (base @ base) % p
        e >>= 1
    return out


def validate_supermodule(M, L, restricted=True):
    rep = ValidationReport()
    p = L.p
    for i in range(L.n):
        for b in range(M.dim):
            for a in range(M.dim):
                if M.rho[i, b, a] and M.parity[b] != (M.parity[a] + L.parity(i)) % 2:
                    rep.fail("module parity", (L.names[i], a, b))
    for i in range(L.n):
        for j in range(L.n):
            sgn = -1 if L.parity(i) and L.parity(j) else 1
            lhs = np.einsum("k,kab->ab", L.c[i, j], M.rho) % p
            rhs = (M.rho[i] @ M.rho[j] - sgn * (M.rho[j] @ M.rho[i])) % p
            if np.any((lhs - rhs) % p):
                rep.fail("bracket compatibility", (L.names[i], L.names[j]))
    if restricted:
        for i in range(L.s):
            lhs = matpow(M.rho[i], p, p)
            rhs = np.einsum("k,kab->ab", L.r[i], M.rho) % p
            if np.any((lhs - rhs) % p):
                rep.fail("restricted compatibility", (L.names[i],))
    return rep


def weight_lattice(L, modules=()):
    """Integer gradings compatible with brackets, restriction and module actions.

    Returns (W, Wm) with W of shape (n, r) for the basis of L and one array of
    shape (dim M, r) per module; every structure constant is homogeneous.
    """
    import sympy

    nvars = L.n + sum(M.dim for M in modules)
    rows = []

    def row(pairs):
        v = [0] * nvars
        for k, c in pairs:
            v[k] += c
        rows.append(v)

    n = L.n
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if L.c[i, j, k]:
                    row([(k, 1), (i, -1), (j, -1)])
    for i in range(L.s):
        for k in range(n):
            if L.r[i, k]:
                row([(k, 1), (i, -L.p)])
    off = n
    for M in modules:
        for i in range(n):
            for b in range(M.dim):
                for a in range(M.dim):
                    if M.rho[i, b, a]:
                        row([(off + b, 1), (i, -1), (off + a, -1)])
        off += M.dim
    if rows:
        ns = sympy.Matrix(rows).nullspace()
    else:
        ns = [sympy.Matrix([1 if k == i else 0 for k in range(nvars)]) for i in range(nvars)]
    cols = []
    for v in ns:
        den = lcm(*[Fraction(str(x)).denominator for x in v]) if len(v) else 1
        cols.append([int(Fraction(str(x)) * den) for x in v])
    W = np.array(cols, dtype=np.int64).T if cols else np.zeros((nvars, 0), dtype=np.int64)
    out_m = []
    off = n
    for M in modules:
        out_m.append(W[off:off + M.dim])
        off += M.dim
    return W[:n], out_m
