"""Built-in restricted Lie superalgebras for p in {3, 5}."""

from .liesuper import LieSuperAlgebra


def _k0bar(p):
    return LieSuperAlgebra(p, ["x"], [], name="k0bar")


def _k0bar_toral(p):
    return LieSuperAlgebra(p, ["x"], [], restriction={"x": {"x": 1}}, name="k0bar-toral")


def _k1bar(p):
    return LieSuperAlgebra(p, [], ["y"], name="k1bar")


def _abelian(s, t):
    def make(p):
        even = ["x"] if s == 1 else [f"x{i + 1}" for i in range(s)]
        odd = ["y"] if t == 1 else [f"y{j + 1}" for j in range(t)]
        return LieSuperAlgebra(p, even, odd, name=f"abelian-{s}-{t}")
    return make


def _heisenberg_odd(p):
    return LieSuperAlgebra(p, ["x"], ["y"], brackets={("y", "y"): {"x": 1}}, name="heisenberg-odd")


def _borel(p):
    return LieSuperAlgebra(p, ["h", "e"], [], brackets={("h", "e"): {"e": 2}},
                           restriction={"h": {"h": 1}}, name="borel")


def _superborel(p):
    # [h,[y,y]] = 2[[h,y],y] forces [h,e] = 2e once [y,y] = e
    return LieSuperAlgebra(p, ["h", "e"], ["y"],
                           brackets={("h", "e"): {"e": 2}, ("h", "y"): {"y": 1}, ("y", "y"): {"e": 1}},
                           restriction={"h": {"h": 1}}, name="superborel")


def _superborel_split(p):
    return LieSuperAlgebra(p, ["h", "e"], ["y"],
                           brackets={("h", "e"): {"e": 2}, ("h", "y"): {"y": 1}},
                           restriction={"h": {"h": 1}}, name="superborel-split")


def _sl2(p):
    return LieSuperAlgebra(p, ["h", "e", "f"], [],
                           brackets={("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}},
                           restriction={"h": {"h": 1}}, name="sl2")


BUILTINS = {
    "k0bar": _k0bar,
    "k0bar-toral": _k0bar_toral,
    "k1bar": _k1bar,
    "abelian-1-1": _abelian(1, 1),
    "abelian-2-1": _abelian(2, 1),
    "abelian-1-2": _abelian(1, 2),
    "heisenberg-odd": _heisenberg_odd,
    "borel": _borel,
    "superborel": _superborel,
    "superborel-split": _superborel_split,
}

# outside the required list; exercises a nonzero t_4
EXTRA = {"sl2": _sl2}

PRIMES = (3, 5)


class UnknownExample(KeyError):
    pass


def builtin(name, p=3):
    table = {**BUILTINS, **EXTRA}
    if name not in table:
        raise UnknownExample(name)
    return table[name](p)


def builtin_examples(primes=PRIMES, extra=False):
    """List of (name, p, algebra) for every built-in example."""
    names = list(BUILTINS) + (list(EXTRA) if extra else [])
    return [(name, p, builtin(name, p)) for p in primes for name in names]


def restricted_dim(L):
    return L.p ** L.s * 2 ** L.t
