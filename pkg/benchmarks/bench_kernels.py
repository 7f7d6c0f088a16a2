"""Compare the compiled kernels against the pure-Python fallback.

Runs each kernel on representative small-matrix workloads (the package's
hot paths) and prints per-call times plus the speedup. Both backends are
imported directly, so this works regardless of AQEC_BACKEND.

Usage: python3 benchmarks/bench_kernels.py [repeats]
"""

from __future__ import annotations

import sys
import time

import numpy as np

from aqec._core import _py_kernels

try:
    from aqec._core import _kernels
except ImportError:
    _kernels = None


def _random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2.0


def _workloads():
    rng = np.random.default_rng(0)
    from aqec.channel import RateProfile, kraus_set, lindblad_generator
    from aqec.codes import repetition_code, probe_state

    profile = RateProfile(3, (0.2, 0.2, 1.0))
    kset = kraus_set(profile, 0.1)
    probe = probe_state(repetition_code(3))
    extended = kset.extended(2)
    jumps = lindblad_generator(profile, dim_a=2).jump_operators()
    herm = _random_hermitian(rng, 16)
    state = repetition_code(3).reduced_state()

    return [
        ("kraus_apply (16x16, 8 ops)", 2000,
         lambda k: k.kraus_apply(probe.rho, extended)),
        ("lindblad_rk4 (16x16, t=0.5)", 5,
         lambda k: k.lindblad_rk4(probe.rho, jumps, 0.5, 1e-3)),
        ("eigvalsh_herm (16x16)", 2000,
         lambda k: k.eigvalsh_herm(herm)),
        ("deviation_terms (8x8, 8 ops)", 500,
         lambda k: k.deviation_terms(state, kset.elements)),
    ]


def _time_per_call(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def main() -> int:
    scale = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
    print(f"{'kernel':<34}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, repeats, call in _workloads():
        repeats = max(1, int(repeats * scale))
        t_py = _time_per_call(lambda: call(_py_kernels), repeats)
        if _kernels is None:
            print(f"{name:<34}{t_py * 1e6:>10.1f}us{'(absent)':>12}{'-':>10}")
            continue
        t_cy = _time_per_call(lambda: call(_kernels), repeats)
        print(
            f"{name:<34}{t_py * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us"
            f"{t_py / t_cy:>9.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
