"""Compare the compiled and numpy Jacobi kernels.

    python benchmarks/bench_kernels.py [--dims 2,4,8,16,32] [--repeats 50] [--out bench.json]

Prints a table to stderr and a JSON summary to stdout (or ``--out``).
"""
import argparse
import json
import sys
import timeit

import numpy as np

from qgt import config
from qgt._backend import available_backends, load_backend


def _matrices(dim, count, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for _ in range(count):
        m = rng.standard_normal((dim, dim))
        out.append(m + m.T)
    return out


def bench(kernels, mats, repeats):
    tol, sweeps = config.JACOBI_REL_TOL, config.JACOBI_MAX_SWEEPS

    def eig():
        for m in mats:
            kernels.jacobi_eigh(m, tol, sweeps)

    decs = [kernels.jacobi_eigh(m, tol, sweeps) for m in mats]

    def rec():
        for w, v, _ in decs:
            kernels.reconstruct(v, np.exp(0.1 * w))

    n = len(mats)
    t_eig = min(timeit.repeat(eig, number=1, repeat=repeats)) / n
    t_rec = min(timeit.repeat(rec, number=1, repeat=repeats)) / n
    return {"jacobi_us": t_eig * 1e6, "reconstruct_us": t_rec * 1e6}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="2,4,8,16,32")
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--count", type=int, default=20, help="matrices per dimension")
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    dims = [int(d) for d in args.dims.split(",")]
    backends = available_backends()
    results = []
    for dim in dims:
        mats = _matrices(dim, args.count, seed=dim)
        row = {"dim": dim}
        for name in backends:
            row[name] = bench(load_backend(name), mats, args.repeats)
        if "cython" in row:
            row["jacobi_speedup"] = row["python"]["jacobi_us"] / row["cython"]["jacobi_us"]
        results.append(row)
        cells = "  ".join(f"{b}: eig {row[b]['jacobi_us']:9.1f}us rec {row[b]['reconstruct_us']:7.1f}us"
                          for b in backends)
        print(f"dim={dim:<3d} {cells}", file=sys.stderr)

    text = json.dumps({"backends": backends, "results": results}, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    main()
