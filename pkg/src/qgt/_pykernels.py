"""Pure-Python (numpy) fallback for the compiled kernels in ``_ckernels.pyx``.

Same cyclic Jacobi schedule and rotation formulas, with each rotation applied
as vectorized row/column updates.
"""
import math

import numpy as np


def _rotate(a, v, p, q):
    apq = a[p, q]
    if apq == 0.0:
        return
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    x = a[:, p].copy()
    y = a[:, q].copy()
    a[:, p] = c * x - s * y
    a[:, q] = s * x + c * y
    x = a[p, :].copy()
    y = a[q, :].copy()
    a[p, :] = c * x - s * y
    a[q, :] = s * x + c * y
    a[p, q] = 0.0
    a[q, p] = 0.0
    x = v[:, p].copy()
    y = v[:, q].copy()
    v[:, p] = c * x - s * y
    v[:, q] = s * x + c * y


def jacobi_eigh(m, rel_tol, max_sweeps):
    """Return ``(eigenvalues, basis, sweeps)``; ``sweeps == -1`` on non-convergence."""
    a = np.array(m, dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n)
    fro = math.sqrt(float(np.sum(a * a)))
    iu = np.triu_indices(n, 1)
    sweeps = -1
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= rel_tol * fro:
            sweeps = sweep
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order]), sweeps


def reconstruct(basis, values):
    out = (basis * values) @ basis.T
    return 0.5 * (out + out.T)
