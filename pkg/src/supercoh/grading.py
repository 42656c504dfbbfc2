"""(Z x Z/2)-graded signs and the monomial algebras Lambda(L0) (x) Gamma(L1) (x) Gamma'(L0).

A monomial <x_I> g_A(y) g'_C(x) is stored as a ``CGAMonomial`` with
``ext`` the strictly increasing tuple I, ``gam`` the exponent tuple A (one
entry per odd basis vector) and ``gamp`` the exponent tuple C (one entry per
even basis vector).  Elements are plain dicts {monomial: coefficient mod p}.
"""

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import NamedTuple


class Bidegree(NamedTuple):
    deg: int
    par: int

    def __add__(self, other):
        return Bidegree(self.deg + other.deg, (self.par + other.par) % 2)


def twist_sign(a, b):
    """Sign of v (x) w -> w (x) v for v of bidegree a and w of bidegree b."""
    e = (a[0] * b[0] + a[1] * b[1]) % 2
    return -1 if e else 1


def map_tensor_sign(g, v):
    """Sign picked up when a map of bidegree g moves past a vector of bidegree v."""
    return twist_sign(g, v)


class BasisMismatch(ValueError):
    pass


class CGAMonomial(NamedTuple):
    ext: tuple
    gam: tuple
    gamp: tuple = ()

    @property
    def deg(self):
        return len(self.ext) + sum(self.gam) + 2 * sum(self.gamp)

    @property
    def par(self):
        return sum(self.gam) % 2

    @property
    def bidegree(self):
        return Bidegree(self.deg, self.par)

    @property
    def primed_weight(self):
        return sum(self.gamp)

    def without_primed(self):
        return CGAMonomial(self.ext, self.gam, (0,) * len(self.gamp))


def unit(s, t, primed=True):
    return CGAMonomial((), (0,) * t, (0,) * s if primed else ())


def sort_sign(seq):
    """Sign of the permutation sorting seq, or 0 if seq has a repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def exterior_product(I, J):
    """<x_I><x_J> = sign <x_K>; returns (sign, K) with sign 0 on collision."""
    s = sort_sign(I + J)
    if s == 0:
        return 0, None
    return s, tuple(sorted(I + J))


def _binom_tuple(a, b, p):
    c = 1
    out = []
    for r, s in zip(a, b):
        c = (c * comb(r + s, r)) % p
        if c == 0:
            return 0, None
        out.append(r + s)
    return c, tuple(out)


@lru_cache(maxsize=None)
def cga_multiply(m1, m2, p):
    """Product of two monomials as (coefficient, monomial); coefficient 0 means zero."""
    if len(m1.gam) != len(m2.gam) or len(m1.gamp) != len(m2.gamp):
        raise BasisMismatch("monomials over different bases")
    # E1 G1 P1 E2 G2 P2 -> E1 E2 G1 G2 P1 P2 ; E2 passes G1 (P1 is even, degree even)
    sign = -1 if (sum(m1.gam) * len(m2.ext)) % 2 else 1
    es, ext = exterior_product(m1.ext, m2.ext)
    if es == 0:
        return 0, None
    cg, gam = _binom_tuple(m1.gam, m2.gam, p)
    if cg == 0:
        return 0, None
    cp, gamp = _binom_tuple(m1.gamp, m2.gamp, p)
    if cp == 0:
        return 0, None
    return (sign * es * cg * cp) % p, CGAMonomial(ext, gam, gamp)


def elem_add(acc, m, c, p):
    v = (acc.get(m, 0) + c) % p
    if v:
        acc[m] = v
    else:
        acc.pop(m, None)


def elem_multiply(a, b, p):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            c, m = cga_multiply(m1, m2, p)
            if c:
                elem_add(out, m, c * c1 * c2, p)
    return out


def tensor_multiply(a, b, p):
    """Product in A (x) A of dicts {(m', m''): c} with the graded twist."""
    out = {}
    for (a1, a2), c1 in a.items():
        for (b1, b2), c2 in b.items():
            s = twist_sign(a2.bidegree, b1.bidegree)
            x, m1 = cga_multiply(a1, b1, p)
            if not x:
                continue
            y, m2 = cga_multiply(a2, b2, p)
            if not y:
                continue
            key = (m1, m2)
            v = (out.get(key, 0) + s * x * y * c1 * c2) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def _generator_factors(m):
    s = len(m.gamp)
    t = len(m.gam)
    zero_g = (0,) * t
    zero_p = (0,) * s
    facs = []
    for i in m.ext:
        facs.append(("x", CGAMonomial((i,), zero_g, zero_p)))
    for j, a in enumerate(m.gam):
        if a:
            facs.append(("y", j, a))
    for i, c in enumerate(m.gamp):
        if c:
            facs.append(("xp", i, c))
    return facs


@lru_cache(maxsize=None)
def cga_coproduct(m, p):
    """Coproduct as a tuple of (coefficient, left, right).

    <x> and gamma_1(y) are primitive, gamma_r(y) -> sum gamma_i (x) gamma_{r-i},
    and the map is multiplicative for the graded tensor product.
    """
    s = len(m.gamp)
    t = len(m.gam)
    one = CGAMonomial((), (0,) * t, (0,) * s)
    acc = {(one, one): 1}
    for f in _generator_factors(m):
        if f[0] == "x":
            g = f[1]
            d = {(g, one): 1, (one, g): 1}
        elif f[0] == "y":
            _, j, a = f
            d = {}
            for i in range(a + 1):
                l = list((0,) * t)
                r = list((0,) * t)
                l[j] = i
                r[j] = a - i
                d[(CGAMonomial((), tuple(l), (0,) * s), CGAMonomial((), tuple(r), (0,) * s))] = 1
        else:
            _, j, c = f
            d = {}
            for i in range(c + 1):
                l = list((0,) * s)
                r = list((0,) * s)
                l[j] = i
                r[j] = c - i
                d[(CGAMonomial((), (0,) * t, tuple(l)), CGAMonomial((), (0,) * t, tuple(r)))] = 1
        acc = tensor_multiply(acc, d, p)
    return tuple(sorted(((c, a, b) for (a, b), c in acc.items()), key=lambda z: (z[1], z[2])))


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def cga_basis(s, t, n, primed=False, max_gam=None):
    """Standard monomials of external degree n, in the fixed monomial order.

    With primed=False the gamma' part is fixed to zero (this is the basis of
    Ybar_n); with primed=True the full Lambda (x) Gamma (x) Gamma' slice.
    """
    out = []
    for b in range(min(s, n) + 1):
        for ext in combinations(range(s), b):
            rest = n - b
            cmax = rest // 2 if primed and s else 0
            for c in range(cmax + 1):
                a = rest - 2 * c
                for gam in _compositions(a, t):
                    if max_gam is not None and any(g > max_gam for g in gam):
                        continue
                    for gamp in (_compositions(c, s) if primed else [()]):
                        if not primed:
                            gamp = (0,) * s
                        out.append(CGAMonomial(ext, gam, gamp))
    out.sort()
    return tuple(out)


def dim_ext_gamma(s, t, n):
    """dim of the degree-n slice of Lambda(k^s) (x) Gamma(k^t)."""
    tot = 0
    for a in range(min(s, n) + 1):
        b = n - a
        tot += comb(s, a) * (comb(t + b - 1, b) if t else (1 if b == 0 else 0))
    return tot
