"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from supercoh.examples import BUILTINS, builtin
from supercoh.grading import CGAMonomial

SMALL = ["k0bar", "k0bar-toral", "k1bar", "abelian-1-1", "abelian-1-2", "heisenberg-odd", "borel", "superborel"]


@st.composite
def algebras(draw, names=SMALL, primes=(3, 5)):
    return builtin(draw(st.sampled_from(list(names))), draw(st.sampled_from(primes)))


@st.composite
def cga_monomials(draw, s, t, primed=True, max_pow=4):
    ext = tuple(sorted(draw(st.sets(st.integers(0, s - 1), max_size=s)))) if s else ()
    gam = tuple(draw(st.integers(0, max_pow)) for _ in range(t))
    gamp = tuple(draw(st.integers(0, 2)) for _ in range(s)) if primed else (0,) * s
    return CGAMonomial(ext, gam, gamp)


assert set(SMALL) <= set(BUILTINS)
