from math import comb

import numpy as np
import pytest
import scipy.sparse as sp
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from supercoh.bar import cobar_complex
from supercoh.complexes import CochainComplex
from supercoh.examples import builtin
from supercoh.koszul import lie_cohomology
from supercoh.liesuper import adjoint_module, trivial_module
from supercoh.may import MayComplex, mu_chain_map, special_cocycles
from supercoh.specseq import (
    ExplicitPages,
    FilteredComplex,
    NotInPage,
    compare_E_D,
    e1_closed_form,
    gr_zero,
    jantzen_index,
    lambda_s_dim,
    reindex,
)

P = 3


@st.composite
def elementary_complexes(draw, top=3, max_level=4):
    """A filtered complex built from pairs x -> y and singletons, scrambled by filtered automorphisms.

    Returns the complex and the predicted page dimensions {(r, i, n): dim}.
    """
    pieces = {n: [] for n in range(top + 1)}  # (level, partner index or None)
    pairs = []
    for n in range(top + 1):
        for _ in range(draw(st.integers(0, 3))):
            pieces[n].append(draw(st.integers(0, max_level)))
    for n in range(top):
        for _ in range(draw(st.integers(0, 2))):
            a = draw(st.integers(0, max_level))
            b = draw(st.integers(a, max_level + 1))
            pieces[n].append(a)
            pieces[n + 1].append(b)
            pairs.append((n, len(pieces[n]) - 1, len(pieces[n + 1]) - 1))
    C = CochainComplex(P, 0, top)
    for n in range(top + 1):
        C.set_degree(n, range(len(pieces[n])), level=pieces[n])
    mats = {}
    for n in range(top):
        mats[n] = np.zeros((len(pieces[n + 1]), len(pieces[n])), dtype=np.int64)
    for n, c, r in pairs:
        mats[n][r, c] = 1
    g = {}
    for n in range(top + 1):
        lv = pieces[n]
        k = len(lv)
        m = np.eye(k, dtype=np.int64)
        for r in range(k):
            for c in range(k):
                if (lv[r], r) > (lv[c], c):
                    m[r, c] = draw(st.integers(0, P - 1))
        g[n] = m
    for n in range(top):
        if g[n].size:
            ginv = np.array(sympy.Matrix(g[n]).inv_mod(P), dtype=np.int64)
        else:
            ginv = g[n]
        C.d[n] = sp.csr_matrix((g[n + 1] @ mats[n] @ ginv) % P)
    pred = {}
    paired = {(n, c) for n, c, _ in pairs} | {(n + 1, r) for n, _, r in pairs}
    life = {}
    for n, c, r in pairs:
        life[(n, c)] = life[(n + 1, r)] = pieces[n + 1][r] - pieces[n][c]
    for n in range(top + 1):
        for k, lvl in enumerate(pieces[n]):
            for rr in range(0, max_level + 4):
                if (n, k) in paired and rr > life[(n, k)]:
                    continue
                pred[(rr, lvl, n)] = pred.get((rr, lvl, n), 0) + 1
    return C, pred


@settings(max_examples=60, deadline=None)
@given(elementary_complexes())
def test_rank_formula_matches_elementary_decomposition(data):
    C, pred = data
    F = FilteredComplex(C, top=C.hi)
    for r in range(0, 7):
        for n in range(C.hi):
            for i in range(-1, 7):
                assert int(F.page_dim(r, i, n).sum()) == pred.get((r, i, n), 0), (r, i, n)


@settings(max_examples=40, deadline=None)
@given(elementary_complexes())
def test_explicit_pages_agree_with_rank_formula(data):
    C, _ = data
    F = FilteredComplex(C)
    E = ExplicitPages(F)
    bad, pages = E.verify(4)
    assert bad == []
    for r, pg in enumerate(pages):
        for (i, n), sq in pg.spots.items():
            if n <= F.top:
                assert sq.dim == int(F.page_dim(r, i, n).sum())


@settings(max_examples=40, deadline=None)
@given(elementary_complexes())
def test_infinity_page_sums_to_cohomology(data):
    C, _ = data
    F = FilteredComplex(C)
    assert F.total_dims(10**6) == F.betti()


def test_trivial_filtration_and_zero_differential():
    C = CochainComplex(P, 0, 2)
    for n in range(3):
        C.set_degree(n, range(2))
    C.d[0] = sp.csr_matrix(np.array([[1, 0], [0, 0]]))
    C.d[1] = sp.csr_matrix(np.array([[0, 0], [0, 0]]))
    F = FilteredComplex(C)
    for r in (1, 2, 5):
        assert [int(F.page_dim(r, 0, n).sum()) for n in range(2)] == F.betti()
    Z = CochainComplex(P, 0, 2)
    for n in range(3):
        Z.set_degree(n, range(2), level=[n, n + 1])
    G = FilteredComplex(Z)
    assert G.page_table(0) == G.page_table(10**6)


def test_closed_form_examples():
    s, t = 2, 1
    assert e1_closed_form(s, t, P, 1, 0) == s + t
    assert e1_closed_form(s, t, P, P, 2 - P) == s
    assert e1_closed_form(s, t, P, 1, 5) == 0
    assert lambda_s_dim(1, 1, 3) == 2


@pytest.mark.parametrize("s,t", [(1, 1), (2, 1), (0, 1), (1, 0)])
def test_closed_form_totals_match_hilbert_series(s, t):
    for n in range(7):
        tot = sum(e1_closed_form(s, t, P, i, n - i) for i in range(n * P + 1))
        want = sum(lambda_s_dim(s, t, n - 2 * c) * comb(s + c - 1, c) if s else (c == 0) * lambda_s_dim(s, t, n)
                   for c in range(n // 2 + 1))
        assert tot == want


def test_abelian_e1_totals():
    F = FilteredComplex(cobar_complex(builtin("abelian-1-1", 3), top=5))
    assert F.total_dims(1, 4) == [1, 2, 3, 4, 5]
    assert F.total_dims(10**6, 4) == [1, 2, 3, 4, 5]


def test_permanent_cycles_on_both_sides():
    L = builtin("abelian-1-1", 3)
    X = MayComplex(L, 5)
    CD = X.cochain_complex()
    FD = FilteredComplex(CD)
    sc = special_cocycles(X, CD)
    assert gr_zero(FD, 2) and gr_zero(FD, 3)
    assert FD.track_class(2, sc.g[0]).survives
    assert FD.track_class(3, sc.f[0]).survives
    C = cobar_complex(L, top=5)
    FE = FilteredComplex(C)
    y = (0, 1)
    v = C.delta(3, 0, [y, y, y])
    assert FE.track_class(3, v).survives
    mu = mu_chain_map(X, C.bar, 4)
    assert np.array_equal(mu.pullback(3) @ v % 3, sc.f[0])


def test_hit_class_is_reported():
    # f_1 of the odd Heisenberg algebra is a coboundary in Hom(X, k)
    L = builtin("heisenberg-odd", 3)
    X = MayComplex(L, 6)
    CD = X.cochain_complex()
    sc = special_cocycles(X, CD)
    tr = FilteredComplex(CD).track_class(3, sc.f[0])
    assert tr.permanent and tr.dies_at is not None
    assert CD.is_coboundary(3, sc.f[0])


def test_track_rejects_classes_dead_on_e1():
    C = CochainComplex(P, 0, 1)
    C.set_degree(0, [0], level=[0])
    C.set_degree(1, [0], level=[0])
    C.d[0] = sp.csr_matrix(np.array([[1]]))
    with pytest.raises(NotInPage):
        FilteredComplex(C, top=1).track_class(1, np.array([1]))


@pytest.mark.parametrize("name", ["abelian-1-1", "k0bar", "heisenberg-odd"])
def test_comparison_bijective(name):
    L = builtin(name, 3)
    C = cobar_complex(L, top=5)
    X = MayComplex(L, 5)
    mu = mu_chain_map(X, C.bar, 4)
    rep = compare_E_D(FilteredComplex(C), FilteredComplex(X.cochain_complex()), {n: mu.pullback(n) for n in range(5)}, 4)
    assert rep.bijective
    assert rep.spots[(0, 0)] == (1, 1, 1)


def test_jantzen_reindex_examples():
    L = builtin("abelian-2-1", 3)
    F = FilteredComplex(MayComplex(L, 6).cochain_complex())
    raw = {(1, i, j): int(sum(v)) for (i, j), v in F.page_table(1, 5).items()}
    J = reindex(raw, "jantzen", 3)
    for (r, a, b), dim in J.items():
        if a + b <= 4:
            assert dim == lambda_s_dim(L.s, L.t, b - a) * comb(L.s + a - 1, a)
    H = lie_cohomology(L, trivial_module(L), 5).betti
    for a in range(3):
        assert J.get((0, a, a), 0) == H[0] * comb(L.s + a - 1, a)
    FP = reindex(raw, "friedlander-parshall", 3)
    assert all(i % 2 == 0 for (_, i, _) in FP)


def test_jantzen_index_inverse():
    for a in range(4):
        for b in range(4):
            assert jantzen_index((P - 1) * a + b, -(P - 2) * a, P) == (a, b)
    assert jantzen_index(2, 1, 5) == (None, None)


def test_reindex_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        reindex({}, "bogus", 3)


@pytest.mark.parametrize("name,module,top", [("abelian-1-1", "k", 4), ("k0bar-toral", "k", 4), ("borel", "adjoint", 3)])
def test_convergence(name, module, top):
    L = builtin(name, 3)
    M = trivial_module(L) if module == "k" else adjoint_module(L)
    F = FilteredComplex(cobar_complex(L, M, top=top + 1))
    H = [MayComplex(L, top + 1).cochain_complex(M).betti(n) for n in range(top + 1)]
    assert F.total_dims(10**6, top) == H
