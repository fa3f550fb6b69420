"""Time the compiled kernels against the pure-Python fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from lvrkit._backend import _kernels_py
from lvrkit.oracle.wick import Trace, _index_structure
from lvrkit.ribbon import vertex_set


def wick_case():
    # (1/N) Tr X^2 with two p=3 interaction vertices: 8 M symbols, 8! pairings
    factors = [Trace.power(2), Trace.power(3), Trace.power(3)]
    m_row, m_col, c_row, c_col, nvars, consts = _index_structure(factors)
    return (m_row, m_col, c_row, c_col, nvars, len(consts))


def ribbon_case():
    vs = vertex_set(2, 3, n_cilia=2)  # 3 quartic vertices + 2 cilium pairs: 8 pairs
    return (list(vs.sigma), list(vs.m_darts), list(vs.md_darts), list(vs.vertex_of),
            vs.n_vertices, list(vs.leaf_kind))


def mc_case(sweeps=200, chains=4, n=4):
    rng = np.random.default_rng(0)
    normals = rng.standard_normal((sweeps, chains, n, n, 2))
    uniforms = rng.random((sweeps, chains, n, n))
    return n, chains, normals, uniforms


def timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        from lvrkit import _kernels as compiled
    except ImportError:
        print("compiled kernels not built; nothing to compare")
        return

    n, chains, normals, uniforms = mc_case()

    def mc(mod):
        def go():
            M = np.zeros((chains, n, n), dtype=complex)
            obs = np.zeros((normals.shape[0], chains, 2))
            acc = mod.metropolis_sweeps(M, 0.05, 2, np.full(chains, 0.5), normals, uniforms, obs)
            return acc, obs
        return go

    cases = {
        "wick_class_histogram (8! pairings)": lambda mod: (lambda: mod.wick_class_histogram(*wick_case())),
        "ribbon_scan (8! matchings)": lambda mod: (lambda: mod.ribbon_scan(*ribbon_case())),
        f"metropolis_sweeps ({normals.shape[0]} sweeps x {chains} chains, N={n})": mc,
    }
    print(f"{'kernel':58s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, make in cases.items():
        tp, outp = timed(make(_kernels_py), args.repeat)
        tc, outc = timed(make(compiled), args.repeat)
        same = all(np.allclose(np.asarray(a), np.asarray(b), atol=1e-12) for a, b in zip(outp, outc))
        flag = "" if same else "  OUTPUTS DIFFER"
        print(f"{name:58s} {tp:11.4f} {tc:13.4f} {tp / tc:8.1f}{flag}")


if __name__ == "__main__":
    main()
