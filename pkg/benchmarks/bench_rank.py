"""Dense rank over F_p: numba kernel vs the pure-numpy fallback.

    python3 benchmarks/bench_rank.py [--sizes 100 200 400] [--p 3] [--repeat 3]

Also times one realistic workload (the cobar complex of the Borel example)
in a subprocess per backend, since the backend is chosen at import time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from supercoh import fp

WORKLOAD = (
    "import time; from supercoh.examples import builtin; from supercoh.bar import cobar_complex;"
    "t=time.perf_counter(); C=cobar_complex(builtin('borel',3),top=5);"
    "[C.betti(n) for n in range(5)]; print(time.perf_counter()-t)"
)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workload(disable):
    env = dict(os.environ, SUPERCOH_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.split()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-workload", action="store_true")
    args = ap.parse_args()
    p = args.p
    inv = fp.inverse_table(p)
    rng = np.random.default_rng(0)
    if not fp.USE_NUMBA:
        print("numba disabled; only the fallback is timed")
    print("n,rank,numpy_s,numba_s,speedup")
    for n in args.sizes:
        # rank-deficient so both elimination paths do real work
        m = (rng.integers(0, p, (n, n // 2)) @ rng.integers(0, p, (n // 2, n))) % p
        t_np = best_of(lambda: fp._rref_numpy(m.copy(), p, inv), args.repeat)
        if fp.USE_NUMBA:
            fp._rref_kernel(m.copy(), p, inv)  # compile
            t_nb = best_of(lambda: fp._rref_kernel(m.copy(), p, inv), args.repeat)
            print(f"{n},{fp.rank(m, p)},{t_np:.4f},{t_nb:.4f},{t_np / t_nb:.1f}")
        else:
            print(f"{n},{fp.rank(m, p)},{t_np:.4f},,")
    if not args.skip_workload:
        a, b = workload(False), workload(True)
        print(f"borel p=3 cobar betti n<5: numba {a:.2f}s, numpy {b:.2f}s")


if __name__ == "__main__":
    main()
