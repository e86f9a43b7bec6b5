#!/usr/bin/env python3
"""Benchmark the numba kernel build against the pure-numpy fallback.

Runs each hot kernel on a large coordinate batch and the full Cartesian FD
divergence sweep on the default verification grid, for both backends, and
prints the timings side by side.  numba timings exclude JIT compilation
(one untimed warmup call per kernel).

    python benchmarks/bench_backends.py [--n 1000000] [--repeat 5]
"""
import argparse
import time

import numpy as np

from slipball import _backend, family, kernels, oracle, verify


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(impls, n, rng):
    r = rng.uniform(0.05, 1.0, n)
    theta = rng.uniform(0.0, np.pi, n)
    phi = rng.uniform(0.0, 2 * np.pi, n)
    mask = (theta > np.pi / 4) & (theta < 3 * np.pi / 4) & (r > 0.25)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    h, hp, _ = impls["default_profile_jet"](r)
    g, g_t, g_p, g_tt, g_tp, g_pp = impls["default_angular_jet"](theta, phi)
    gg = impls["big_g_values"](sin_t, cos_t, g_t, g_tt, g_pp, mask)
    x, y, z = impls["sph_to_cart"](r, theta, phi)
    return {
        "default_profile_jet": lambda: impls["default_profile_jet"](r),
        "default_angular_jet": lambda: impls["default_angular_jet"](theta, phi),
        "big_g_values": lambda: impls["big_g_values"](sin_t, cos_t, g_t, g_tt, g_pp, mask),
        "omega_assembly": lambda: impls["omega_assembly"](r, sin_t, h, hp, g_t, g_p, gg, mask),
        "cart_to_sph": lambda: impls["cart_to_sph"](x, y, z),
        "vec_sph_to_cart": lambda: impls["vec_sph_to_cart"](theta, phi, g_t, g_p, gg),
    }


def fd_divergence_case(backend):
    """End-to-end: Cartesian FD divergence of u over the default interior grid."""
    saved = {name: getattr(kernels, name) for name in kernels.KERNEL_NAMES}
    impls = kernels.get_impls(backend)
    for name, fn in impls.items():
        setattr(kernels, name, fn)
    try:
        f = family.default_field()
        mesh = verify.GridSpec().interior_mesh()
        div = oracle.cartesian_divergence_grid(
            f.u_components, mesh["r"], mesh["theta"], mesh["phi"])
        return float(np.max(np.abs(div)))
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1_000_000, help="batch size for kernel timings")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"]
    if _backend.NUMBA_AVAILABLE:
        backends.append("numba")
    else:
        print("numba unavailable: timing the numpy fallback only")

    rng = np.random.default_rng(7)
    results = {}
    for backend in backends:
        impls = kernels.get_impls(backend)
        cases = kernel_cases(impls, args.n, rng)
        for name, fn in cases.items():
            fn()  # warmup (JIT compile on the numba side)
            results.setdefault(name, {})[backend] = best_of(fn, args.repeat)

    for backend in backends:
        fd_divergence_case(backend)  # warmup
        t0 = time.perf_counter()
        sup = fd_divergence_case(backend)
        results.setdefault("fd_divergence_sweep", {})[backend] = time.perf_counter() - t0
        print(f"fd divergence sweep [{backend}]: sup |div u| = {sup:.3e}")

    print(f"\nbatch n={args.n}, best of {args.repeat}")
    header = f"{'kernel':24s} " + " ".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, times in results.items():
        row = f"{name:24s} " + " ".join(f"{times[b]*1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f" {times['numpy'] / times['numba']:8.2f}x"
        print(row)


if __name__ == "__main__":
    main()
