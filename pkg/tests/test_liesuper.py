import numpy as np
import pytest
from hypothesis import given, settings

from supercoh.examples import builtin_examples
from supercoh.liesuper import (
    LieSuperAlgebra,
    Supermodule,
    ValidationError,
    adjoint_module,
    trivial_module,
    validate_algebra,
    validate_supermodule,
    weight_lattice,
)

from strategies import algebras


@pytest.mark.parametrize("name,p,L", builtin_examples(extra=True), ids=lambda x: str(x) if not hasattr(x, "p") else "")
def test_builtins_valid(name, p, L):
    assert validate_algebra(L).ok
    assert validate_supermodule(adjoint_module(L), L).ok
    assert validate_supermodule(trivial_module(L), L).ok


def test_borel_with_unit_bracket_p5():
    L = LieSuperAlgebra(5, ["h", "e"], [], {("h", "e"): {"e": 1}}, {"h": {"h": 1}})
    assert validate_algebra(L).ok
    assert validate_supermodule(adjoint_module(L), L).ok


def test_parity_violation_reported():
    L = LieSuperAlgebra(3, [], ["y"])
    L.c[0, 0, 0] = 1
    rep = validate_algebra(L)
    assert not rep.ok and any(rule == "parity" for rule, *_ in rep.problems)
    with pytest.raises(ValidationError):
        rep.raise_if_bad()


def test_mutated_bracket_fails_jacobi():
    L = LieSuperAlgebra(3, ["x"], ["y"], {("y", "y"): {"x": 1}, ("x", "y"): {"y": 1}})
    assert not validate_algebra(L).ok


def test_bracket_examples():
    L = LieSuperAlgebra(5, ["h", "e"], [], {("h", "e"): {"e": 1}})
    e, h = L.vec("e"), L.vec("h")
    assert not np.any(L.bracket(np.zeros(2, dtype=np.int64), e))
    assert list(L.bracket(e, h)) == [0, 4]
    H = LieSuperAlgebra(3, ["x"], ["y"], {("y", "y"): {"x": 1}})
    assert list(H.bracket(H.vec("y"), H.vec("y"))) == [1, 0]


def test_restricted_module_condition():
    L = LieSuperAlgebra(3, ["x"], [])
    M = Supermodule(L, 1, [0], {"x": [[1]]})
    assert validate_supermodule(M, L, restricted=False).ok
    assert not validate_supermodule(M, L, restricted=True).ok


def test_odd_action_must_swap_parity():
    L = LieSuperAlgebra(3, [], ["y"])
    M = Supermodule(L, 2, [0, 0], {"y": [[0, 1], [0, 0]]})
    assert not validate_supermodule(M, L).ok


def test_abelianized_and_even_part():
    L = LieSuperAlgebra(3, ["h", "e"], ["y"], {("h", "e"): {"e": 2}, ("h", "y"): {"y": 1}, ("y", "y"): {"e": 1}},
                        {"h": {"h": 1}})
    A = L.abelianized()
    assert A.is_abelian() and A.has_trivial_restriction()
    E = L.even_part()
    assert E.t == 0 and validate_algebra(E).ok


@settings(max_examples=25, deadline=None)
@given(algebras())
def test_weight_lattice_makes_structure_homogeneous(L):
    M = adjoint_module(L)
    W, (Wm,) = weight_lattice(L, [M])
    n = L.n
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if L.c[i, j, k]:
                    assert np.array_equal(W[k], W[i] + W[j])
        if i < L.s:
            for k in range(n):
                if L.r[i, k]:
                    assert np.array_equal(W[k], L.p * W[i])
    for i in range(n):
        for b in range(M.dim):
            for a in range(M.dim):
                if M.rho[i, b, a]:
                    assert np.array_equal(Wm[b], W[i] + Wm[a])


@settings(max_examples=25, deadline=None)
@given(algebras())
def test_skew_symmetry_holds(L):
    for i in range(L.n):
        for j in range(L.n):
            sgn = -1 if L.parity(i) and L.parity(j) else 1
            assert not np.any((L.c[i, j] + sgn * L.c[j, i]) % L.p)
