"""``supercoh`` command-line front end.

Every command writes a plain-text report: a versioned header (command echo
and algebra fingerprint) followed by CSV sections.  Reports contain no
timestamps unless ``--timing`` is given, so reruns are byte-identical.

Exit codes: 0 success, 1 a verification or agreement check failed, 2 bad
input (parse or validation error), 3 size budget exceeded.
"""

import argparse
import csv
import hashlib
import io
import os
import sys
import time

from .algfile import ParseError, parse_algebra_file, serialize_algebra
from .bar import DEFAULT_BUDGET, BudgetExceeded, CohomologyRing, cobar_complex
from .examples import BUILTINS, EXTRA, PRIMES, UnknownExample, builtin, builtin_examples, restricted_dim
from .koszul import lie_cochain_complex
from .liesuper import ValidationError, adjoint_module, trivial_module, validate_algebra
from .may import MayComplex, NotCocycle, mu_chain_map, special_cocycles
from .specseq import (
    FilteredComplex,
    NotInPage,
    compare_E_D,
    e1_closed_form,
    gr_zero,
    reindex,
)
from .verify import FAIL, verify_battery

REPORT_VERSION = "supercoh-report v1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
SCHEMES = ("may-original", "jantzen", "friedlander-parshall")


class InputError(Exception):
    pass


class Report:
    def __init__(self, argv, L=None, modules=None, timing=False):
        self.timing = timing
        self.t0 = time.perf_counter()
        self.buf = io.StringIO()
        self.failed = False
        self.line(f"# {REPORT_VERSION}")
        self.line("# command: supercoh " + " ".join(argv))
        if L is not None:
            digest = hashlib.sha256(serialize_algebra(L, modules).encode()).hexdigest()[:16]
            self.line(f"# algebra: {L.name or '(unnamed)'} p={L.p} dim={L.s}|{L.t}")
            self.line(f"# fingerprint: {digest}")

    def line(self, text=""):
        self.buf.write(text + "\n")

    def table(self, title, header, rows):
        self.line()
        self.line(f"## {title}")
        w = csv.writer(self.buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    def check(self, name, status, detail=""):
        if status == FAIL:
            self.failed = True
        self._checks.append((name, status, detail))

    def begin_checks(self):
        self._checks = []

    def end_checks(self, title="verification"):
        self.table(title, ["check", "status", "detail"], self._checks)

    def text(self):
        if self.timing:
            self.line()
            self.line(f"# elapsed_s: {time.perf_counter() - self.t0:.3f}")
        return self.buf.getvalue()


# ---------------------------------------------------------------- inputs


def load(args):
    """(algebra, file modules) from a builtin name or a path."""
    src = args.algebra
    if os.path.exists(src):
        af = parse_algebra_file(src)
        if args.prime is not None and args.prime != af.algebra.p:
            raise InputError(f"--prime {args.prime} disagrees with p = {af.algebra.p} in {src}")
        return af.algebra, af.modules
    try:
        L = builtin(src, 3 if args.prime is None else args.prime)
    except UnknownExample:
        raise InputError(f"{src!r} is neither a file nor a built-in example "
                         f"({', '.join(list(BUILTINS) + list(EXTRA))})") from None
    validate_algebra(L).raise_if_bad()
    return L, {}


def pick_module(L, modules, name):
    if name in (None, "k", "trivial"):
        return trivial_module(L)
    if name == "adjoint":
        return adjoint_module(L)
    if name in modules:
        return modules[name]
    raise InputError(f"unknown module {name!r}; choose k, adjoint or one of {sorted(modules)}")


def default_degree(args, L):
    return 2 * L.p if args.max_degree is None else args.max_degree


def parse_pages(spec):
    lo, sep, hi = spec.partition("..")
    try:
        lo = int(lo)
        hi = int(hi) if sep else lo
    except ValueError:
        raise InputError(f"bad page range {spec!r}; use R or R0..R1") from None
    if lo < 0 or hi < lo:
        raise InputError(f"bad page range {spec!r}")
    return list(range(lo, hi + 1))


# ---------------------------------------------------------------- commands


def cmd_check(args, rep, L, modules):
    rep.begin_checks()
    rep.check("validate algebra", "pass")
    for name, M in modules.items():
        rep.check(f"validate module {name}", "pass", f"dim {M.dim}")
    rep.end_checks()


def cmd_examples(args, rep):
    rows = []
    for name, p, L in builtin_examples(PRIMES, extra=args.extra):
        rows.append([name, p, L.s, L.t, restricted_dim(L)])
    rep.table("examples", ["name", "p", "s", "t", "dim_V"], rows)


def _split_table(C, N):
    rows = []
    for n in range(N + 1):
        e, o = C.betti_parity(n)
        rows.append([n, e + o, e, o])
    return rows


def cmd_cohomology(args, rep, L, modules):
    N = default_degree(args, L)
    M = pick_module(L, modules, args.module)
    if args.lie:
        C = lie_cochain_complex(L, M, N + 1)
        rep.table("betti lie", ["n", "dim", "even", "odd"], _split_table(C, N))
        return
    tables = {}
    if args.method in ("may", "both"):
        tables["may"] = _split_table(MayComplex(L, N + 1).cochain_complex(M), N)
    if args.method in ("bar", "both"):
        tables["bar"] = _split_table(cobar_complex(L, M, top=N + 1, budget=args.budget), N)
    for method, rows in tables.items():
        rep.table(f"betti restricted {method}", ["n", "dim", "even", "odd"], rows)
    if args.method == "both":
        same = tables["may"] == tables["bar"]
        rep.begin_checks()
        rep.check("may and bar agree", "pass" if same else FAIL)
        rep.end_checks()


def cmd_ring(args, rep, L, modules):
    N = 4 if args.max_degree is None else args.max_degree
    C = cobar_complex(L, trivial_module(L), top=N + 1, budget=args.budget)
    R = CohomologyRing(C, N)
    rep.line("# exploratory: degree-bounded evidence, not a proof of finite generation")
    betti = R.betti()
    gens = R.new_generators()
    rep.table("ring", ["n", "dim", "new_generators"], [[n, betti[n], gens[n]] for n in range(N + 1)])
    rep.table("class parities", ["n", "class", "parity"],
              [[n, i, int(R.H[n].parity[i])] for n in range(1, N + 1) for i in range(R.H[n].dim)])
    rows = []
    half = N // 2
    for a in range(1, half + 1):
        for b in range(a, half + 1):
            for (i, j), v in sorted(R.product_table(a, b).items()):
                rows.append([a, i, b, j, " ".join(str(int(x)) for x in v)])
    rep.table("products", ["deg_a", "class_a", "deg_b", "class_b", "coords"], rows)
    bad = R.graded_commutativity(N)
    rep.begin_checks()
    rep.check(f"graded commutativity through total degree {N}", FAIL if bad else "pass",
              "; ".join(map(str, bad)))
    rep.end_checks()


def _filtered(L, M, seq, N, budget):
    if seq == "E":
        C = cobar_complex(L, M, top=N + 1, budget=budget)
    else:
        C = MayComplex(L, N + 1).cochain_complex(M)
    return FilteredComplex(C)


def _raw_pages(F, pages, N):
    out = {}
    for r in pages:
        for (i, j), dims in F.page_table(r, N).items():
            out[(r, i, j)] = dims
    return out


def cmd_specseq(args, rep, L, modules):
    N = default_degree(args, L)
    M = pick_module(L, modules, args.module)
    p = L.p
    pages = parse_pages(args.pages)
    F = _filtered(L, M, args.sequence, N, args.budget)
    if args.reindex == "may-original":
        raw = pages
    elif args.reindex == "jantzen":
        raw = sorted({(p - 2) * r + 1 for r in pages})
    else:
        raw = sorted({(p - 2) * (r // 2) + 1 for r in pages if r % 2 == 0})
    table = reindex(_raw_pages(F, raw, N), args.reindex, p)
    rows = [[r, i, j, e, o] for (r, i, j), (e, o) in sorted(table.items()) if r in pages]
    rep.table(f"pages {args.sequence} {args.reindex}", ["page", "i", "j", "even", "odd"], rows)
    inf = F.page_table(10**8, N)
    rep.table(f"infinity {args.sequence} may-original", ["i", "j", "even", "odd"],
              [[i, j, e, o] for (i, j), (e, o) in sorted(inf.items())])
    if args.verify:
        rep.begin_checks()
        _specseq_checks(rep, L, M, F, args, N)
        rep.end_checks()


def _specseq_checks(rep, L, M, F, args, N):
    p = L.p
    e1 = F.page_table(1, N)
    bad = [(i, n - i) for n in range(N + 1) for i in range(0, n * p + 1)
           if sum(e1.get((i, n - i), (0, 0))) != e1_closed_form(L.s, L.t, p, i, n - i, M.dim)]
    rep.check("E_1 closed form", FAIL if bad else "pass", f"mismatch at {bad}" if bad else f"i+j <= {N}")
    H = [F.C.betti(n) for n in range(N + 1)]
    tot = F.total_dims(10**8, N)
    rep.check("E_infinity sums to H^n", "pass" if tot == H else FAIL, f"H = {H}")
    if args.sequence == "D":
        zero = all(gr_zero(F, n) for n in range(N + 1))
        rep.check("D_0 differential zero", "pass" if zero else FAIL)
        if M.dim == 1 and not any(M.rho.reshape(-1)):
            X = F.C.may
            try:
                sc = special_cocycles(X, F.C)
            except NotCocycle as exc:
                rep.check("special cocycles", FAIL, str(exc))
                return
            for label, deg, vecs in (("f", p, sc.f), ("g", 2, sc.g)):
                for k, v in enumerate(vecs, start=1):
                    if deg > F.top:
                        rep.check(f"{label}_{k} permanent", "skipped", "out of range")
                        continue
                    _track(rep, F, f"{label}_{k}", deg, v)
            if len(sc.f) < L.t:
                rep.check("f_i permanent", "skipped", f"out of range (needs N > {p})")
        return
    # E-side: bar representatives of f_i and the comparison map
    C = F.C
    if M.dim == 1 and not any(M.rho.reshape(-1)):
        for j in range(L.t):
            if p > F.top:
                rep.check(f"bar f_{j + 1} permanent", "skipped", "out of range")
                continue
            y = [0] * L.n
            y[L.s + j] = 1
            v = C.delta(p, 0, [tuple(y)] * p)
            _track(rep, F, f"bar f_{j + 1}", p, v, informative=True)
    top = min(N, 5)
    X = MayComplex(L, top + 1)
    mu = mu_chain_map(X, C.bar, top)
    FD = FilteredComplex(X.cochain_complex(M))
    stars = {n: mu.pullback(n, M) for n in range(top + 1)}
    cmp = compare_E_D(F, FD, stars, top)
    bad = {k: v for k, v in cmp.spots.items() if not v[0] == v[1] == v[2]}
    rep.check(f"E_1 -> D_1 bijective (i+j <= {top})", "pass" if cmp.bijective else FAIL,
              f"failing spots {bad}" if bad else "")


def _track(rep, F, name, n, vec, informative=False):
    try:
        tr = F.track_class(n, vec)
    except NotInPage:
        rep.check(f"{name} permanent", "info" if informative else FAIL, "zero on E_1")
        return
    status = "pass" if tr.permanent else ("info" if informative else FAIL)
    rep.check(f"{name} permanent", status, tr.verdict())


def cmd_verify(args, rep, L, modules):
    N = default_degree(args, L)
    rep.begin_checks()
    for c in verify_battery(L, N, budget=args.budget):
        rep.check(c.name, c.status, c.detail)
    rep.end_checks()


# ---------------------------------------------------------------- argument parsing


def build_parser():
    ap = argparse.ArgumentParser(prog="supercoh", description="Cohomology of restricted Lie superalgebras over F_p.")
    ap.add_argument("--timing", action="store_true", help="append wall-clock time to the report")
    ap.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="verb", required=True)

    def with_algebra(name, help_):
        sp_ = sub.add_parser(name, help=help_)
        sp_.add_argument("algebra", help="built-in example name or path to an algebra file")
        sp_.add_argument("-p", "--prime", type=int, help="prime for built-in examples (default 3)")
        return sp_

    with_algebra("check", "parse and validate an algebra file or example")
    ex = sub.add_parser("examples", help="list built-in examples")
    ex.add_argument("--extra", action="store_true", help="include examples beyond the standard list")

    c = with_algebra("cohomology", "Betti table of H^n(V(L), M) or H^n(L, M)")
    kind = c.add_mutually_exclusive_group()
    kind.add_argument("--lie", action="store_true", help="ordinary Lie superalgebra cohomology")
    kind.add_argument("--restricted", action="store_true", help="restricted cohomology (default)")
    c.add_argument("-N", "--max-degree", type=int)
    c.add_argument("--module", default="k")
    c.add_argument("--method", choices=("may", "bar", "both"), default="may")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    r = with_algebra("ring", "cup products on H^*(V(L), k) in low degrees")
    r.add_argument("-N", "--max-degree", type=int, help="top degree (default 4)")
    r.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    s = with_algebra("specseq", "page dimensions of the May spectral sequence (E) or its X(L) model (D)")
    s.add_argument("--sequence", choices=("E", "D"), default="E")
    s.add_argument("--pages", default="0..2", help="page or range, e.g. 1 or 0..3")
    s.add_argument("--reindex", choices=SCHEMES, default="may-original")
    s.add_argument("--module", default="k")
    s.add_argument("-N", "--max-degree", type=int)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--verify", action="store_true")

    v = with_algebra("verify", "run the invariant battery")
    v.add_argument("-N", "--max-degree", type=int)
    v.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    return ap


COMMANDS = {
    "check": cmd_check,
    "cohomology": cmd_cohomology,
    "ring": cmd_ring,
    "specseq": cmd_specseq,
    "verify": cmd_verify,
}


def run(argv):
    """Run one command; returns (exit code, report text or error message)."""
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "examples":
            rep = Report(argv, timing=args.timing)
            cmd_examples(args, rep)
        else:
            L, modules = load(args)
            rep = Report(argv, L, modules, timing=args.timing)
            COMMANDS[args.verb](args, rep, L, modules)
    except (ParseError, ValidationError, InputError) as exc:
        return EXIT_INPUT, f"error: {type(exc).__name__}: {exc}\n"
    except BudgetExceeded as exc:
        return EXIT_BUDGET, f"error: {exc}\n"
    return (EXIT_FAIL if rep.failed else EXIT_OK), rep.text()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    code, text = run(argv)
    target = build_parser().parse_args(argv).output
    if code in (EXIT_INPUT, EXIT_BUDGET):
        sys.stderr.write(text)
    elif target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
