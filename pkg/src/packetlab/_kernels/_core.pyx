# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled hot kernels: free-evolution phase, |psi|**2, density moments.

Mirrors _numpy exactly; the fused loops avoid the large complex
temporaries the NumPy expressions allocate on 3-D grids.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def apply_time_phase(amplitude, energy, double t):
    """Multiply a momentum amplitude by the free-evolution phase exp(-i*t*E)."""
    amp = np.ascontiguousarray(amplitude, dtype=np.complex128)
    en = np.ascontiguousarray(energy, dtype=np.float64)
    if amp.shape != en.shape:
        raise ValueError(
            f"amplitude shape {amp.shape} != energy shape {en.shape}"
        )
    out = np.empty_like(amp)
    cdef const double complex[::1] a = amp.reshape(-1)
    cdef const double[::1] e = en.reshape(-1)
    cdef double complex[::1] o = out.reshape(-1)
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double ph, c, s, ar, ai
    with nogil:
        for i in range(n):
            ph = -t * e[i]
            c = cos(ph)
            s = sin(ph)
            ar = a[i].real
            ai = a[i].imag
            o[i] = (ar * c - ai * s) + 1j * (ar * s + ai * c)
    return out


def abs_squared(values):
    """|z|**2 elementwise, returned as float64."""
    vals = np.ascontiguousarray(values, dtype=np.complex128)
    out = np.empty(vals.shape, dtype=np.float64)
    cdef const double complex[::1] v = vals.reshape(-1)
    cdef double[::1] o = out.reshape(-1)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double re, im
    with nogil:
        for i in range(n):
            re = v[i].real
            im = v[i].imag
            o[i] = re * re + im * im
    return out


def density_moments(rho, coords):
    """Raw moment sums of a sampled density over a rectangular grid.

    Returns (S0, S1, S2) with S0 = sum(rho), S1_j = sum(x_j * rho) and
    S2_j = sum(x_j**2 * rho); no cell volume factor is applied. coords is
    one 1-D coordinate array per grid axis. Supports 1-D and 3-D grids.
    """
    r = np.ascontiguousarray(rho, dtype=np.float64)
    if len(coords) != r.ndim:
        raise ValueError(f"got {len(coords)} coordinate arrays for ndim={r.ndim}")
    cs = [np.ascontiguousarray(c, dtype=np.float64) for c in coords]
    for axis, c in enumerate(cs):
        if c.shape != (r.shape[axis],):
            raise ValueError(f"coords[{axis}] has shape {c.shape}, "
                             f"expected ({r.shape[axis]},)")
    if r.ndim == 1:
        return _moments_1d(r, cs[0])
    if r.ndim == 3:
        return _moments_3d(r, cs[0], cs[1], cs[2])
    raise ValueError(f"density_moments supports 1-D and 3-D grids, got ndim={r.ndim}")


def _moments_1d(const double[::1] rho, const double[::1] x):
    cdef Py_ssize_t i, n = rho.shape[0]
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0
    cdef double r, xi
    with nogil:
        for i in range(n):
            r = rho[i]
            xi = x[i]
            s0 += r
            s1 += xi * r
            s2 += xi * xi * r
    return s0, (s1,), (s2,)


def _moments_3d(const double[:, :, ::1] rho, const double[::1] x1, const double[::1] x2,
                const double[::1] x3):
    cdef Py_ssize_t i, j, l
    cdef Py_ssize_t n1 = rho.shape[0], n2 = rho.shape[1], n3 = rho.shape[2]
    cdef double s0 = 0.0, s1a = 0.0, s1b = 0.0, s1c = 0.0
    cdef double s2a = 0.0, s2b = 0.0, s2c = 0.0
    # row-local partial sums limit error growth over the ~N**3 terms
    cdef double row0, rowc, rowcc, r, xa, xb, xc
    with nogil:
        for i in range(n1):
            xa = x1[i]
            for j in range(n2):
                xb = x2[j]
                row0 = 0.0
                rowc = 0.0
                rowcc = 0.0
                for l in range(n3):
                    r = rho[i, j, l]
                    xc = x3[l]
                    row0 += r
                    rowc += xc * r
                    rowcc += xc * xc * r
                s0 += row0
                s1a += xa * row0
                s1b += xb * row0
                s1c += rowc
                s2a += xa * xa * row0
                s2b += xb * xb * row0
                s2c += rowcc
    return s0, (s1a, s1b, s1c), (s2a, s2b, s2c)
