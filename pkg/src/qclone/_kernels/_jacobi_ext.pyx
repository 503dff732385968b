# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi eigenvalue kernel."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, fmax

cnp.import_array()

OFF_TOL = 1e-13
MAX_SWEEPS = 100


def symmetric_eigenvalues(a, double tol=OFF_TOL, int max_sweeps=MAX_SWEEPS):
    """Eigenvalues of a real symmetric matrix, ascending."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] m = arr
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t p, q, r, sweep
    cdef double frob = 0.0, off, thresh, apq, theta, t, c, s, tau, g, h
    if n == 0:
        return np.zeros(0)
    for p in range(n):
        for q in range(n):
            frob += m[p, q] * m[p, q]
    thresh = fmax(tol, 1e-15 * sqrt(frob))

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += m[p, q] * m[p, q]
        if sqrt(2.0 * off) < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                m[p, p] -= t * apq
                m[q, q] += t * apq
                m[p, q] = 0.0
                m[q, p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    g = m[r, p]
                    h = m[r, q]
                    m[r, p] = g - s * (h + g * tau)
                    m[p, r] = m[r, p]
                    m[r, q] = h + s * (g - h * tau)
                    m[q, r] = m[r, q]
    return np.sort(np.diagonal(arr).copy())
