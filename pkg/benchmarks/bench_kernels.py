"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each workload through the compiled kernels and again with every kernel
swapped for its uncompiled Python implementation (the same code the package
runs when EIGENPSD_DISABLE_NUMBA=1 is set). Sizes are kept small so the
Python side finishes in seconds; scale with the flags for longer runs.

    python benchmarks/bench_kernels.py [--pairs 500] [--duration 0.25]
"""

import argparse
import time
from contextlib import contextmanager

import numpy as np

from eigenpsd import _backend
from eigenpsd import _kernels as k
from eigenpsd import pipeline
from eigenpsd.simulate import ScenarioSpec, simulate_scenario
from eigenpsd.spatial import ArrayScene

KERNEL_NAMES = (
    "cholesky_lower",
    "solve_lower_matrix",
    "solve_lower_herm_matrix",
    "jacobi_eigh",
    "gevd_with_chol",
    "rank_one_update",
    "tracked_enhance",
)


@contextmanager
def python_kernels():
    """Temporarily rebind every kernel to its uncompiled implementation."""
    saved = {name: getattr(k, name) for name in KERNEL_NAMES}
    for name, fn in saved.items():
        setattr(k, name, _backend.python_impl(fn))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(k, name, fn)


def bench_gevd(n_pairs, m=5, seed=0):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_pairs):
        b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        gamma = b @ b.conj().T / m + 0.5 * np.eye(m)
        c = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        psi = 0.5 * (c + c.conj().T)
        chol, _ = k.cholesky_lower(gamma)
        pairs.append((np.ascontiguousarray(psi), chol))

    def run():
        acc = 0.0
        for psi, chol in pairs:
            lam, _, _ = k.gevd_with_chol(psi, chol, 1e-14, 100)
            acc += lam[0]
        return acc

    return run


def bench_pipeline(duration, seed=0):
    scene = ArrayScene.linear(5, 0.08)
    sc = simulate_scenario(ScenarioSpec(scene=scene, duration=duration,
                                        snr_db=5.0, seed=seed))

    def run():
        return pipeline.enhance_all(sc.mixture, scene, tau=0.5)

    return run


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=500,
                        help="number of 5x5 GEVD problems")
    parser.add_argument("--duration", type=float, default=0.25,
                        help="seconds of audio for the tracking workload")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats (best of) for the compiled path")
    args = parser.parse_args()

    workloads = [
        (f"gevd 5x5 x {args.pairs}", bench_gevd(args.pairs)),
        (f"tracked enhance {args.duration:g}s/5ch", bench_pipeline(args.duration)),
    ]

    if not _backend.NUMBA_ENABLED:
        print("numba disabled (EIGENPSD_DISABLE_NUMBA set); timing numpy path only")
        for name, fn in workloads:
            print(f"{name:<28} numpy {timeit(fn, 1):8.3f} s")
        return

    print(f"{'workload':<28} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    for name, fn in workloads:
        fn()  # JIT warmup
        compiled = timeit(fn, args.repeats)
        with python_kernels():
            fallback = timeit(fn, 1)
        print(f"{name:<28} {compiled:>9.4f}s {fallback:>9.3f}s {fallback / compiled:>8.1f}x")


if __name__ == "__main__":
    main()
