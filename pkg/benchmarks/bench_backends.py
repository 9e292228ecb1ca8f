"""Benchmark the numba kernels against the pure-numpy fallback.

Backend selection happens at import time, so the --both mode re-runs this
script in a subprocess per backend and prints a side-by-side table.

Usage:
    python benchmarks/bench_backends.py [--n 10000] [--repeats 3] [--both]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def make_fixture(n, seed=42):
    rng = np.random.default_rng(seed)
    half = n // 2
    xy = np.vstack([
        rng.uniform(-0.05, 0.05, (half, 2)) + [-1.0, 0.0],
        rng.uniform(-0.05, 0.05, (n - half, 2)) + [1.0, 0.0],
    ])
    gam = rng.uniform(0.1, 1.0, n)
    return xy, gam


def run_current_backend(n, repeats):
    import vortexlab
    from vortexlab.kernels import (KernelParams, QuadTree, direct_velocity,
                                   tree_velocity)

    xy, gam = make_fixture(n)
    params = KernelParams(blob_radius=0.01, opening_angle=0.5,
                          deterministic=True)

    results = {"backend": vortexlab.backend_name(), "n": n}

    def timed(label, fn):
        fn()  # warm up (jit compile on the numba backend)
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        results[label] = best

    timed("direct_s", lambda: direct_velocity(xy, gam, None, params,
                                              self_interaction=True))
    timed("tree_s", lambda: tree_velocity(xy, gam, None, params,
                                          self_interaction=True))
    timed("build_s", lambda: QuadTree(xy, gam))

    u_direct = direct_velocity(xy, gam, None, params, self_interaction=True)
    u_tree = tree_velocity(xy, gam, None, params, self_interaction=True)
    err = np.hypot(*(u_tree - u_direct).T).max()
    results["tree_rel_err"] = float(err / np.hypot(*u_direct.T).max())
    return results


def run_both(n, repeats):
    rows = []
    for backend in ("numba", "numpy"):
        env = dict(os.environ, VORTEXLAB_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--n", str(n),
             "--repeats", str(repeats), "--json"],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(1)
        rows.append(json.loads(proc.stdout.splitlines()[-1]))

    print(f"{'backend':>8} {'n':>7} {'direct [s]':>11} {'tree [s]':>10} "
          f"{'build [s]':>10} {'tree rel err':>13}")
    for row in rows:
        print(f"{row['backend']:>8} {row['n']:>7} {row['direct_s']:>11.4f} "
              f"{row['tree_s']:>10.4f} {row['build_s']:>10.4f} "
              f"{row['tree_rel_err']:>13.2e}")
    if rows[1]["tree_s"] > 0:
        print(f"numba speedup: direct x"
              f"{rows[1]['direct_s'] / rows[0]['direct_s']:.1f}, "
              f"tree x{rows[1]['tree_s'] / rows[0]['tree_s']:.1f}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--both", action="store_true",
                        help="compare numba and numpy backends")
    parser.add_argument("--json", action="store_true",
                        help="emit one JSON line (used by --both)")
    args = parser.parse_args()

    if args.both:
        run_both(args.n, args.repeats)
        return

    results = run_current_backend(args.n, args.repeats)
    if args.json:
        print(json.dumps(results))
    else:
        for key, val in results.items():
            print(f"{key}: {val}")


if __name__ == "__main__":
    main()
