"""Compare the compiled and pure-Python kernel backends.

Times the three kernels on matched inputs and checks that the backends
produce bit-identical outputs.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--size 200] [--repeats 3]

The compiled backend is required for the sub-second schedule gate in the
acceptance suite; this script documents the gap when only the pure backend
is available.
"""

import argparse
import time

import numpy as np

from tightpack.kernels import available_backends
from tightpack.matchings import _csr, largest_k
from tightpack.rng import random_bipartite
from tightpack.schedule import digraph_schedule, hyper_schedule


def _time(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _report(name, rows, identical):
    print(f"\n{name}")
    base = rows[0][1]
    for backend, secs in rows:
        speed = base / secs if secs > 0 else float("inf")
        print(f"  {backend:<8} {secs * 1e3:10.2f} ms   x{speed:.1f} vs {rows[0][0]}")
    print(f"  outputs identical across backends: {identical}")


def bench_max_flow(backends, size, repeats):
    G = random_bipartite(size, 0.5, 7)
    indptr, cols = _csr(G)
    k = int(size * 0.5 * 0.7)
    rows, outs = [], []
    for mod in backends:
        secs, out = _time(
            lambda m=mod: m.max_flow_bipartite(size, indptr, cols, k), repeats
        )
        rows.append((mod.BACKEND, secs))
        outs.append(out)
    same = all(
        o[0] == outs[0][0]
        and np.array_equal(np.asarray(o[1]), np.asarray(outs[0][1]))
        and np.array_equal(np.asarray(o[2]), np.asarray(outs[0][2]))
        for o in outs
    )
    _report(f"max_flow_bipartite  m={size} p=0.5 k={k}", rows, same)
    return same


def bench_decompose(backends, size, repeats):
    G = random_bipartite(size, 0.5, 7)
    k = largest_k(G)
    indptr, cols = _csr(G)
    _, used, _ = backends[0].max_flow_bipartite(size, indptr, cols, k)
    arr = G.edge_array[np.asarray(used)]
    sub_indptr = np.zeros(size + 1, dtype=np.int64)
    np.add.at(sub_indptr, arr[:, 0] + 1, 1)
    np.cumsum(sub_indptr, out=sub_indptr)
    sub_cols = arr[:, 1].astype(np.int64)
    rows, outs = [], []
    for mod in backends:
        secs, out = _time(
            lambda m=mod: m.decompose_k_regular(size, sub_indptr, sub_cols, k),
            repeats,
        )
        rows.append((mod.BACKEND, secs))
        outs.append(out)
    same = all(np.array_equal(o, outs[0]) for o in outs)
    _report(f"decompose_k_regular  m={size} k={k}", rows, same)
    return same


def bench_schedule(backends, repeats):
    same = True
    for sched in (digraph_schedule(100, 0.3, 0.6), hyper_schedule(20, 0.5, 0.6)):
        rows, outs = [], []
        for mod in backends:
            secs, out = _time(
                lambda m=mod, s=sched: m.schedule_scan(
                    s.eps0, s.p0, s.drift, s.denom, s.p_stop, 10**9
                ),
                repeats,
            )
            rows.append((mod.BACKEND, secs))
            outs.append(out)
        same = same and all(o == outs[0] for o in outs)
        _report(
            f"schedule_scan  {sched.kind} n={sched.n} eps={sched.eps0} "
            f"p={sched.p0} (T={sched.T})",
            rows,
            all(o == outs[0] for o in outs),
        )
    return same


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=200, help="bipartite side size")
    ap.add_argument("--repeats", type=int, default=3, help="best-of repeats")
    args = ap.parse_args()

    backends = available_backends()
    print("backends:", ", ".join(mod.BACKEND for mod in backends))
    if len(backends) == 1:
        print("compiled backend not built; timing the pure backend only")

    ok = bench_max_flow(backends, args.size, args.repeats)
    ok &= bench_decompose(backends, args.size, args.repeats)
    ok &= bench_schedule(backends, args.repeats)
    if not ok:
        raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
