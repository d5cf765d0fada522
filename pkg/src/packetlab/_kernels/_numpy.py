"""Pure NumPy implementations of the hot kernels.

Always importable; the compiled extension in _core replaces these when it
built successfully. Both backends must agree to rounding-level accuracy,
which tests enforce.
"""
from __future__ import annotations

import numpy as np


def apply_time_phase(amplitude, energy, t):
    """Multiply a momentum amplitude by the free-evolution phase exp(-i*t*E)."""
    amplitude = np.asarray(amplitude, dtype=np.complex128)
    energy = np.asarray(energy, dtype=np.float64)
    if amplitude.shape != energy.shape:
        raise ValueError(
            f"amplitude shape {amplitude.shape} != energy shape {energy.shape}"
        )
    return amplitude * np.exp((-1j * t) * energy)


def abs_squared(values):
    """|z|**2 elementwise, returned as float64."""
    values = np.asarray(values, dtype=np.complex128)
    return values.real**2 + values.imag**2


def density_moments(rho, coords):
    """Raw moment sums of a sampled density over a rectangular grid.

    Returns (S0, S1, S2) with S0 = sum(rho), S1_j = sum(x_j * rho) and
    S2_j = sum(x_j**2 * rho); no cell volume factor is applied. coords is
    one 1-D coordinate array per grid axis.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if len(coords) != rho.ndim:
        raise ValueError(f"got {len(coords)} coordinate arrays for ndim={rho.ndim}")
    s0 = float(rho.sum())
    s1 = []
    s2 = []
    for axis, x in enumerate(coords):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (rho.shape[axis],):
            raise ValueError(f"coords[{axis}] has shape {x.shape}, "
                             f"expected ({rho.shape[axis]},)")
        other = tuple(i for i in range(rho.ndim) if i != axis)
        marginal = rho.sum(axis=other)
        s1.append(float(marginal @ x))
        s2.append(float(marginal @ (x * x)))
    return s0, tuple(s1), tuple(s2)
