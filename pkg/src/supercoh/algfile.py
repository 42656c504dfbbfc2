"""Text format for restricted Lie superalgebras and their supermodules.

Grammar (statements end at a newline or a ';' outside brackets; '#' starts a
comment)::

    statement  := "p" "=" INT
                | ("even" | "odd") "=" namelist
                | "[" NAME "," NAME "]" "=" combo
                | NAME "^[p]" "=" combo
                | "module" NAME
                | "parity" "=" intlist          (inside a module)
                | "act" NAME "=" matrix         (inside a module)
                | "end"                         (closes a module)
    namelist   := "[" NAME ("," NAME)* "]" | NAME ("," NAME)* | "[" "]"
    combo      := term (("+" | "-") term)* | "0"
    term       := [INT ["*"]] NAME
    matrix     := "[" row ("," row)* "]" with row := "[" INT ("," INT)* "]"

Omitted brackets and restrictions are zero.  Action matrices act on column
vectors: act a = A means a . e_j = sum_i A[i][j] e_i.
"""

import json
import re

import numpy as np

from .liesuper import LieSuperAlgebra, Supermodule, ValidationError, validate_algebra, validate_supermodule

NAME = r"[A-Za-z_][A-Za-z0-9_']*"


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _statements(text):
    """Yield (line_number, statement) pairs."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        depth, cur = 0, []
        for ch in line:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            if ch == ";" and depth == 0:
                if "".join(cur).strip():
                    yield no, "".join(cur).strip()
                cur = []
            else:
                cur.append(ch)
        if "".join(cur).strip():
            yield no, "".join(cur).strip()


def _names(s, no):
    s = s.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise ParseError("unterminated name list", no)
        s = s[1:-1]
    out = [x.strip() for x in s.split(",") if x.strip()]
    for x in out:
        if not re.fullmatch(NAME, x):
            raise ParseError(f"bad basis name {x!r}", no)
    return out


_TERM = re.compile(rf"\s*([+-])?\s*(\d+)?\s*\*?\s*({NAME})?\s*")


def parse_combo(s, no=None):
    """'2 e - h' -> {'e': 2, 'h': -1}."""
    s = s.strip()
    if s in ("0", ""):
        return {}
    out = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse linear combination {s!r}", no)
        sign, coef, name = m.groups()
        if sign is None and not first:
            raise ParseError(f"missing '+' or '-' in {s!r}", no)
        if name is None:
            raise ParseError(f"term without a basis name in {s!r}", no)
        c = int(coef) if coef else 1
        if sign == "-":
            c = -c
        out[name] = out.get(name, 0) + c
        pos = m.end()
        first = False
    return out


class AlgebraFile:
    """Parsed contents: the algebra and any declared modules (by name)."""

    def __init__(self, algebra, modules):
        self.algebra = algebra
        self.modules = modules


def parse_algebra_text(text, validate=True, name=""):
    p = None
    even, odd = [], []
    brackets, restr = [], []
    modules, cur = [], None
    for no, st in _statements(text):
        if cur is not None:
            if st == "end":
                modules.append(cur)
                cur = None
                continue
            key, _, val = st.partition("=")
            key = key.strip()
            if key == "parity":
                try:
                    cur["parity"] = [int(x) for x in json.loads(val)] if val.strip().startswith("[") \
                        else [int(x) for x in val.split(",")]
                except (ValueError, TypeError) as exc:
                    raise ParseError(f"bad parity vector: {exc}", no) from None
            elif key.startswith("act "):
                elt = key[4:].strip()
                try:
                    cur["act"][elt] = (np.array(json.loads(val), dtype=np.int64), no)
                except (ValueError, TypeError) as exc:
                    raise ParseError(f"bad matrix for {elt}: {exc}", no) from None
            else:
                raise ParseError(f"unexpected statement in module block: {st!r}", no)
            continue
        if st.startswith("module"):
            parts = st.split()
            if len(parts) != 2:
                raise ParseError("expected 'module NAME'", no)
            cur = {"name": parts[1], "parity": None, "act": {}, "line": no}
            continue
        if "=" not in st:
            raise ParseError(f"expected '=' in {st!r}", no)
        lhs, rhs = (x.strip() for x in st.split("=", 1))
        if lhs == "p":
            try:
                p = int(rhs)
            except ValueError:
                raise ParseError(f"p must be an integer, got {rhs!r}", no) from None
        elif lhs in ("even", "odd"):
            (even if lhs == "even" else odd).extend(_names(rhs, no))
        elif lhs.startswith("["):
            m = re.fullmatch(rf"\[\s*({NAME})\s*,\s*({NAME})\s*\]", lhs)
            if not m:
                raise ParseError(f"bad bracket {lhs!r}", no)
            brackets.append((m.group(1), m.group(2), parse_combo(rhs, no), no))
        elif lhs.endswith("^[p]"):
            restr.append((lhs[:-4].strip(), parse_combo(rhs, no), no))
        else:
            raise ParseError(f"unknown statement {st!r}", no)
    if cur is not None:
        raise ParseError(f"module {cur['name']!r} is not closed with 'end'", cur["line"])
    if p is None:
        raise ParseError("missing 'p = ...'")
    try:
        L = LieSuperAlgebra(p, even, odd, name=name)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    declared = set(L.names)
    for a, b, combo, no in brackets:
        for nm in (a, b, *combo):
            if nm not in declared:
                raise ParseError(f"undeclared name {nm!r}", no)
        L.set_bracket(a, b, combo)
    for a, combo, no in restr:
        for nm in (a, *combo):
            if nm not in declared:
                raise ParseError(f"undeclared name {nm!r}", no)
        if L.index(a) >= L.s:
            raise ValidationError(f"line {no}: restriction given for odd element {a}")
        L.r[L.index(a), :] = 0
        for k, v in combo.items():
            L.r[L.index(a), L.index(k)] = v % p
    if validate:
        validate_algebra(L).raise_if_bad()
    mods = {}
    for spec in modules:
        par = spec["parity"]
        if par is None:
            raise ParseError(f"module {spec['name']!r} needs a parity vector", spec["line"])
        dim = len(par)
        act = {}
        for elt, (mat, no) in spec["act"].items():
            if elt not in declared:
                raise ParseError(f"undeclared name {elt!r}", no)
            if mat.shape != (dim, dim):
                raise ParseError(f"action of {elt} must be {dim}x{dim}", no)
            act[elt] = mat
        M = Supermodule(L, dim, par, act, name=spec["name"])
        if validate:
            validate_supermodule(M, L).raise_if_bad()
        mods[spec["name"]] = M
    return AlgebraFile(L, mods)


def parse_algebra_file(path, validate=True):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_algebra_text(text, validate=validate, name=str(path))


def _fmt_combo(names, vec, p):
    terms = []
    for k, v in enumerate(vec):
        v = int(v) % p
        if v:
            terms.append(names[k] if v == 1 else f"{v} {names[k]}")
    return " + ".join(terms) if terms else "0"


def serialize_algebra(L, modules=None):
    """Normalized text form: nonzero brackets with i <= j and all coefficients in [0, p)."""
    lines = [f"p = {L.p}", f"even = [{', '.join(L.even)}]", f"odd = [{', '.join(L.odd)}]"]
    for i in range(L.n):
        for j in range(i, L.n):
            if L.c[i, j].any():
                lines.append(f"[{L.names[i]},{L.names[j]}] = {_fmt_combo(L.names, L.c[i, j], L.p)}")
    for i in range(L.s):
        if L.r[i].any():
            lines.append(f"{L.names[i]}^[p] = {_fmt_combo(L.names, L.r[i], L.p)}")
    for name, M in (modules or {}).items():
        lines.append(f"module {name}")
        lines.append(f"parity = [{', '.join(str(x) for x in M.parity)}]")
        for k in range(L.n):
            if M.rho[k].any():
                lines.append(f"act {L.names[k]} = {json.dumps((M.rho[k] % L.p).tolist())}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def normalized_key(L, modules=None):
    mods = tuple(sorted((n, M.parity, (M.rho % L.p).tolist().__repr__()) for n, M in (modules or {}).items()))
    return (L.p, L.even, L.odd, (L.c % L.p).tolist().__repr__(), (L.r % L.p).tolist().__repr__(), mods)
