#!/usr/bin/env python3
"""Benchmark: compiled evaluation kernel vs the pure-Python fallback.

Builds the large expression DAGs that dominate a classification run (the
deepest pseudoinvariant of the 3-dimensional route and the degree-eleven
fifth-root invariant of the non-collinear route), then times both kernels
on identical programs and points.

Run:  python benchmarks/bench_eval.py [--points 256] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from odecubic import normalize_to_cubic
from odecubic.expr import node_count
from odecubic.invariants import InvariantEngine
from odecubic.probing import Probe
from odecubic.program import compile_program
from odecubic import _kernel_py

try:
    from odecubic import _kernel  # type: ignore[attr-defined]
except ImportError:
    _kernel = None


def build_workloads():
    pr = Probe()
    out = {}

    eng = InvariantEngine(normalize_to_cubic("2*y*y'' - y'^2 + 1 = 0"), pr)
    out["K (3-dim route)"] = eng.K

    eng = InvariantEngine(normalize_to_cubic("y'' = y'/y - y'^2/y"), pr)
    out["I7 (non-collinear)"] = eng.general_exprs()["I7"]

    eng = InvariantEngine(
        normalize_to_cubic("x*y*y'' - 2*x*y'^2 + (y + 1)*y' = 0"), pr)
    out["I3 (slope-coupled)"] = eng.first_case_exprs()["I3"]

    eng = InvariantEngine(normalize_to_cubic("y'' = 6*y^2"), pr)
    out["L (half-square)"] = eng.L
    return out


def run_kernel(kernel, prog, pts, atol=1e-9):
    out = np.zeros((len(pts), len(prog.roots)), dtype=np.float64)
    scale = np.zeros_like(out)
    err = np.zeros(len(pts), dtype=np.int32)
    kernel.run(prog.ops, prog.arg1, prog.arg2, prog.consts,
               np.ascontiguousarray(prog.roots, dtype=np.int32),
               pts, atol, out, err, scale)
    return out, err


def bench(kernel, prog, pts, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out, err = run_kernel(kernel, prog, pts)
        best = min(best, time.perf_counter() - t0)
    return best, out, err


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    pts = np.ascontiguousarray(rng.uniform(0.5, 2.5, size=(args.points, 4)))

    print(f"{args.points} points per run, best of {args.repeat}")
    header = f"{'expression':<22}{'nodes':>8}{'python':>12}{'compiled':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, expr in build_workloads().items():
        prog = compile_program([expr])
        t_py, out_py, err_py = bench(_kernel_py, prog, pts, args.repeat)
        row = f"{name:<22}{node_count(expr):>8}{t_py * 1e3:>10.2f}ms"
        if _kernel is not None:
            t_c, out_c, err_c = bench(_kernel, prog, pts, args.repeat)
            ok = (err_py == err_c).all() and np.array_equal(
                out_py[err_py == 0], out_c[err_c == 0])
            row += f"{t_c * 1e3:>10.2f}ms{t_py / t_c:>8.1f}x"
            if not ok:
                row += "  MISMATCH"
        else:
            row += f"{'n/a':>12}{'n/a':>9}"
        print(row)
    if _kernel is None:
        print("\ncompiled kernel not available; showing fallback only")


if __name__ == "__main__":
    main()
