"""Pure-Python cyclic Jacobi eigenvalue kernel (fallback backend)."""

from __future__ import annotations

import math

import numpy as np

OFF_TOL = 1e-13
MAX_SWEEPS = 100


def symmetric_eigenvalues(a, tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix, ascending.

    Runs cyclic Jacobi sweeps until the Frobenius norm of the off-diagonal
    part drops below ``tol`` (scaled up only for matrices whose norm makes
    ``tol`` unreachable in double precision).
    """
    m = [list(map(float, row)) for row in np.asarray(a, dtype=float)]
    n = len(m)
    if n == 0:
        return np.zeros(0)
    frob = math.sqrt(sum(x * x for row in m for x in row))
    thresh = max(tol, 1e-15 * frob)

    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n):
            row = m[p]
            for q in range(p + 1, n):
                off += row[q] * row[q]
        if math.sqrt(2.0 * off) < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p][q]
                if apq == 0.0:
                    continue
                theta = (m[q][q] - m[p][p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                m[p][p] -= t * apq
                m[q][q] += t * apq
                m[p][q] = m[q][p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    g = m[r][p]
                    h = m[r][q]
                    gp = g - s * (h + g * tau)
                    hq = h + s * (g - h * tau)
                    m[r][p] = m[p][r] = gp
                    m[r][q] = m[q][r] = hq
    return np.sort(np.array([m[i][i] for i in range(n)]))
