"""Time the compiled kernels against the NumPy fallback.

Runs the three hot operations on a 1-D and a 3-D problem sized like the
default propagator grids, reports best-of-5 wall times per backend and
the speedup, and verifies both backends produce identical moments.

Usage: python benchmarks/bench_kernels.py [points_per_axis_3d]
"""
from __future__ import annotations

import sys
import timeit

import numpy as np

from packetlab._kernels import _core, _numpy


def make_case(shape):
    rng = np.random.default_rng(7)
    amplitude = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    energy = 1.0 + rng.random(shape)
    coords = [np.linspace(-50.0, 50.0, n) for n in shape]
    rho = _numpy.abs_squared(amplitude)
    return amplitude, energy, rho, coords


def best_of(fn, repeats=5, number=3):
    return min(timeit.repeat(fn, repeat=repeats, number=number)) / number


def run(shape):
    amplitude, energy, rho, coords = make_case(shape)
    label = "x".join(str(n) for n in shape)
    print(f"\n--- grid {label} ({amplitude.size} samples) ---")
    cases = [
        ("apply_time_phase", lambda impl: impl.apply_time_phase(amplitude, energy, 12.5)),
        ("abs_squared", lambda impl: impl.abs_squared(amplitude)),
        ("density_moments", lambda impl: impl.density_moments(rho, coords)),
    ]
    for name, call in cases:
        t_np = best_of(lambda: call(_numpy))
        t_cy = best_of(lambda: call(_core))
        print(
            f"{name:18s} numpy {t_np * 1e3:9.3f} ms   "
            f"cython {t_cy * 1e3:9.3f} ms   speedup {t_np / t_cy:5.2f}x"
        )
    s_np = _numpy.density_moments(rho, coords)
    s_cy = _core.density_moments(rho, coords)
    worst = max(
        abs(a - b) / max(abs(a), 1e-300)
        for a, b in zip(np.ravel(s_np[0:1] + s_np[1] + s_np[2]),
                        np.ravel(s_cy[0:1] + s_cy[1] + s_cy[2]))
    )
    print(f"moment agreement between backends: worst rel delta {worst:.2e}")


def main() -> int:
    n3 = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    run((1 << 17,))
    run((n3, n3, n3))
    return 0


if __name__ == "__main__":
    sys.exit(main())
