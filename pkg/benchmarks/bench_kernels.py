"""Time the compiled and numpy evaluation kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The inputs mimic one modular pass of relation verification over the
conductor-819 field (level 1 of the 91 tower at p = 3).
"""

import argparse
import time

import numpy as np

from circunits import _kernels_py as py

try:
    from circunits import _ckernels as cy
except ImportError:
    cy = None

Q = 2_147_483_497


def make_inputs(N=819, groups=40, per_group=24, points=300, seed=0):
    rng = np.random.default_rng(seed)
    W = rng.integers(0, Q, size=N).astype(np.int64)
    X = rng.integers(1, N, size=groups * per_group).astype(np.int64)
    offsets = np.arange(0, groups * per_group + 1, per_group, dtype=np.int64)
    T = rng.integers(1, N, size=points).astype(np.int64)
    rowptr, idx, exps = [0], [], []
    for _ in range(60):
        cols = rng.choice(groups, size=6, replace=False)
        idx.extend(int(c) for c in cols)
        exps.extend(int(e) for e in rng.integers(-9, 10, size=6))
        rowptr.append(len(idx))
    rel = (np.array(rowptr, dtype=np.int64), np.array(idx, dtype=np.int64),
           np.array(exps, dtype=np.int64))
    return (W, X, offsets, T, N), rel


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sv, rel = make_inputs()
    rows = []
    t_py, V = best_of(lambda: py.symbol_values(*sv, Q), args.repeat)
    r_py, PQ = best_of(lambda: py.relation_products(V, *rel, Q), args.repeat)
    rows.append(("numpy", t_py, r_py))
    if cy is not None:
        t_c, Vc = best_of(lambda: cy.symbol_values(*sv, Q), args.repeat)
        r_c, PQc = best_of(lambda: cy.relation_products(V, *rel, Q), args.repeat)
        assert np.array_equal(np.asarray(Vc), V)
        assert all(np.array_equal(np.asarray(a), b) for a, b in zip(PQc, PQ))
        rows.append(("cython", t_c, r_c))
    print(f"{'backend':<8} {'symbol_values':>14} {'relation_products':>18}")
    for name, a, b in rows:
        print(f"{name:<8} {a * 1e3:>12.2f}ms {b * 1e3:>16.2f}ms")
    if len(rows) == 2:
        print(f"speedup  {t_py / rows[1][1]:>13.1f}x {r_py / rows[1][2]:>17.1f}x")
    else:
        print("compiled kernels not available; only the fallback was timed")


if __name__ == "__main__":
    main()
