"""Invariant battery behind ``supercoh verify``."""

import random
from dataclasses import dataclass

import numpy as np

from . import fp
from .bar import BarAlgebra, BudgetExceeded, DEFAULT_BUDGET, beta_cross_term, beta_map, cobar_complex
from .koszul import KoszulComplex
from .liesuper import trivial_module, validate_algebra
from .may import MayComplex, NotCocycle, mu_chain_map, special_cocycles, verify_resolution

PASS, FAIL, SKIP = "pass", "FAIL", "skipped"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""

    @property
    def failed(self):
        return self.status == FAIL


def _run(name, fn):
    try:
        ok, detail = fn()
    except BudgetExceeded as exc:
        return Check(name, SKIP, f"budget: {exc}")
    except NotCocycle as exc:
        return Check(name, FAIL, f"not a cocycle: {exc}")
    if ok is None:
        return Check(name, SKIP, detail)
    return Check(name, PASS if ok else FAIL, detail)


def even_one_cocycles(C):
    """Basis (rows) of the even 1-cocycles of a cobar complex with trivial coefficients."""
    B, p = C.bar, C.p
    even = np.nonzero(B.par[1:] == 0)[0]
    d1 = fp.to_dense(C.diff(1), p)
    K = fp.rank_kernel_image(d1[:, even], p).kernel
    Z = np.zeros((K.shape[0], C.dim(1)), dtype=np.int64)
    Z[:, even] = K
    return Z


def beta_identities(C, max_pairs=4096):
    """Semilinearity on all even 1-cochain basis vectors and additivity on pairs of even cocycles.

    Every pair from the span of the cocycle basis is tried when there are at
    most ``max_pairs`` of them; otherwise the basis pairs are used.
    """
    B, p = C.bar, C.p
    Z = even_one_cocycles(C)
    bad = []
    even = np.nonzero(B.par[1:] == 0)[0]
    for k in even:
        f = np.zeros(C.dim(1), dtype=np.int64)
        f[k] = 1
        for lam in range(p):
            if np.any((beta_map(lam * f, B) - pow(lam, p, p) * beta_map(f, B)) % p):
                bad.append(("semilinear", int(k), lam))
    r = Z.shape[0]
    if p ** (2 * r) <= max_pairs:
        coeffs = np.array(np.meshgrid(*[range(p)] * r, indexing="ij")).reshape(r, -1).T if r else np.zeros((1, 0), int)
        span = (coeffs @ Z) % p if r else np.zeros((1, C.dim(1)), dtype=np.int64)
    else:
        span = np.vstack([np.zeros(C.dim(1), dtype=np.int64), Z])
    d1, d2 = C.diff(1), C.diff(2)
    for f1 in span:
        if np.any((d2 @ beta_map(f1, B)) % p):
            bad.append(("cocycle", tuple(f1)))
        for f2 in span:
            # beta(f1 + f2) - beta(f1) - beta(f2) = d(sum c(p,i) f1^i f2^(p-i))
            lhs = beta_map((f1 + f2) % p, B) - beta_map(f1, B) - beta_map(f2, B)
            lhs = (lhs - d1 @ beta_cross_term(f1, f2, B)) % p
            if np.any(lhs):
                bad.append(("additive", tuple(f1), tuple(f2)))
    return bad, r, len(span)


def homotopy_check(B, n, samples=6, seed=0):
    """ds + sd = id on random normalized chains of degree n."""
    rng = random.Random(seed)
    p = B.p
    for _ in range(samples):
        chain = {}
        for _ in range(3):
            key = (rng.choice(B.basis), tuple(rng.choice(B.nonunit) for _ in range(n)))
            chain[key] = (chain.get(key, 0) + rng.randrange(1, p)) % p
        lhs = B.d(B.s(chain, True), True)
        for k, v in B.s(B.d(chain, True), True).items():
            lhs[k] = (lhs.get(k, 0) + v) % p
        lhs = {k: v % p for k, v in lhs.items() if v % p}
        # s kills chains whose coefficient is 1 in the normalized complex; compare on the rest
        want = {k: v for k, v in chain.items() if v % p}
        if lhs != want:
            return False
    return True


def verify_battery(L, N, budget=DEFAULT_BUDGET, bar_top=None):
    p = L.p
    out = []
    rep = validate_algebra(L)
    out.append(Check("validate algebra", PASS if rep.ok else FAIL, str(rep)))
    if not rep.ok:
        return out
    K = KoszulComplex(L, N, "U")
    out.append(_run("Koszul d^2 = 0 (U)", lambda: (not K.check_d_squared(), "")))
    KV = KoszulComplex(L, N, "V")
    out.append(_run("Koszul d^2 = 0 (V)", lambda: (not KV.check_d_squared(), "")))
    out.append(_run("Koszul filtration", lambda: (K.filtration_preserved(), "")))
    X = MayComplex(L, N)
    t = X.t

    def twisting():
        if L.s == 0:
            return None, "no even basis"
        lines = []
        ok = True
        for n, vals in t.values.items():
            for b in vals:
                if n >= 2 and t.residual(n, b, "U"):
                    ok = False
                    lines.append(f"residual t_{2 * n}")
        cert = t.filtration_certificate()
        for n, m in cert.items():
            if n >= 2 and m > n * p - 1:
                ok = False
                lines.append(f"t_{2 * n} leaves F_{n * p - 1}")
        nz = [2 * n for n, v in t.values.items() if n >= 2 and any(v.values())]
        return ok, "; ".join(lines) or "higher nonzero: " + (",".join(f"t_{k}" for k in nz) or "none")

    out.append(_run("twisting cochain", twisting))
    out.append(_run("d_t^2 = 0", lambda: (not X.check_d_squared(), "")))
    out.append(_run("d_t filtration", lambda: (X.filtration_preserved(), "")))

    def exact():
        h, ok = verify_resolution(X, N)
        return ok, "H = " + ",".join(map(str, h))

    out.append(_run("X(L) exact", exact))

    def gr_abelian():
        Xa = MayComplex(L.abelianized(), N)
        _, m1, _ = X.chain_matrices(N, gr=True)
        _, m2, _ = Xa.chain_matrices(N)
        same = all(not ((m1[n] - m2[n]).toarray() % p).any() for n in m1)
        return same, ""

    out.append(_run("gr X(L) = X(L_ab)", gr_abelian))

    def cocycles():
        if N < 2:
            return None, "out of range"
        sc = special_cocycles(X)
        note = "" if N >= p or not L.t else "f_i out of range"
        return True, f"{len(sc.f)} f_i, {len(sc.g)} g_j" + (f"; {note}" if note else "")

    out.append(_run("special cocycles", cocycles))
    B = BarAlgebra(L)
    top = min(N, 4) if bar_top is None else bar_top

    def mu():
        m = mu_chain_map(X, B, min(N, top))
        bad = m.check_chain_map()
        return (not bad) and m.check_filtration(), ""

    out.append(_run("mu chain map", mu))
    out.append(_run("bar d^2 = 0 / homotopy", lambda: (all(homotopy_check(B, n) for n in range(1, 4)), "")))

    def cobar():
        C = cobar_complex(L, trivial_module(L), top=top, budget=budget, B=B)
        return not C.check_d_squared(), f"degrees <= {top}"

    out.append(_run("cobar d^2 = 0", cobar))

    def beta():
        if L.s == 0:
            return None, "no even part"
        C = cobar_complex(L, trivial_module(L), top=3, budget=budget, B=B)
        bad, r, k = beta_identities(C)
        return not bad, f"{r} even 1-cocycles, {k} in span"

    out.append(_run("beta identities", beta))
    return out
